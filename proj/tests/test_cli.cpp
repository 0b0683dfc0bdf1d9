#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace
{
fs::path workdir()
{
    auto const d = fs::temp_directory_path()
                   / ("csbp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run(std::string const& args, fs::path const& dir)
{
    std::string const cmd = std::string(CSBP_CLI) + " " + args + " >" + (dir / "stdout").string()
                            + " 2>" + (dir / "stderr").string();
    int const status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(fs::path const& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

constexpr char const* kFeller = R"('{"a": -1, "sigma": 1.4142135623730951}')";
}  // namespace

TEST(Cli, HelpListsSubcommandsAndSchema)
{
    auto const d = workdir();
    EXPECT_EQ(run("--help", d), 0);
    auto const out = slurp(d / "stdout");
    for (char const* s : {"mechanism", "laplace", "simulate", "condition", "lamperti", "verify",
                          "--threads", "--out-dir", "\"levy\""})
        EXPECT_NE(out.find(s), std::string::npos) << s;
}

TEST(Cli, MechanismDescribes)
{
    auto const d = workdir();
    EXPECT_EQ(run(std::string("--out-dir ") + d.string() + " --mech " + kFeller + " mechanism", d), 0);
    auto const j = nlohmann::json::parse(slurp(d / "mechanism.json"));
    EXPECT_EQ(j["criticality"], "subcritical");
    EXPECT_EQ(j["version"], "0.1.0");
    EXPECT_TRUE(j.contains("config"));
}

TEST(Cli, ExitCodes)
{
    auto const d = workdir();
    EXPECT_EQ(run(R"(--mech '{"a": 0, "sigma": -1}' mechanism)", d), 2);
    EXPECT_NE(slurp(d / "stderr").find("mechanism.sigma"), std::string::npos);
    EXPECT_EQ(run("frobnicate", d), 2);
    EXPECT_EQ(run(std::string("--mech ") + kFeller + " verify nosuchsuite", d), 2);
    EXPECT_EQ(run(std::string("--out-dir ") + d.string() + " --mech " + kFeller + " verify laplace", d), 0);
}

TEST(Cli, LaplaceCsv)
{
    auto const d = workdir();
    EXPECT_EQ(run(std::string("--out-dir ") + d.string() + " --mech " + kFeller + " laplace", d), 0);
    std::ifstream is(d / "laplace.csv");
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "t,theta,u,csbp_laplace,qprocess_laplace");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    EXPECT_EQ(rows, 5);
}

TEST(Cli, SimulateReplaysBitExactly)
{
    auto const d = workdir();
    auto const a = d / "a", b = d / "b";
    std::string const args = std::string(" --mech ") + kFeller
                             + " simulate --paths 4 --T 0.5 --dt 1e-2 --seed 3 --qprocess --out run";
    ASSERT_EQ(run("--out-dir " + a.string() + args, d), 0);
    ASSERT_EQ(run("--threads 2 --out-dir " + b.string() + args, d), 0);
    EXPECT_EQ(slurp(a / "run.bin"), slurp(b / "run.bin"));
    EXPECT_EQ(slurp(a / "run.csv"), slurp(b / "run.csv"));
    // Replay from the embedded configuration
    auto const c = d / "c";
    ASSERT_EQ(run("--config " + (a / "config.json").string() + " --out-dir " + c.string()
                      + " simulate --qprocess --out run",
                  d),
              0);
    EXPECT_EQ(slurp(a / "run.bin"), slurp(c / "run.bin"));
}

TEST(Cli, ConditionAndLamperti)
{
    auto const d = workdir();
    std::string const base = "--out-dir " + d.string() + " --mech " + kFeller;
    ASSERT_EQ(run(base + " condition --mode mark --paths 200", d), 0);
    auto const j = nlohmann::json::parse(slurp(d / "condition.json"));
    EXPECT_EQ(j["mode"], "mark");
    EXPECT_TRUE(j.contains("stderr"));
    // Subcritical survival to t + s = 21 is about e^{-20}: statistical failure
    EXPECT_EQ(run(base + " condition --mode reject --paths 400", d), 1);
    std::string const quad = "--out-dir " + d.string() + R"( --mech '{"a": 0, "sigma": 1.4142135623730951}')";
    ASSERT_EQ(run(quad + " condition --mode reject --s 2 --paths 400", d), 0);
    auto const r = nlohmann::json::parse(slurp(d / "condition.json"));
    EXPECT_TRUE(r.contains("acceptance_rate"));
    EXPECT_NEAR(r["acceptance_oracle"].get<double>(), 1 - std::exp(-1.0 / 3), 1e-6);
    ASSERT_EQ(run(base + " lamperti --direction roundtrip --paths 3", d), 0);
    EXPECT_TRUE(nlohmann::json::parse(slurp(d / "lamperti.json")).contains("sup_time_error"));
}
