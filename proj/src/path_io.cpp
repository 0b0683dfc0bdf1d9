#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "csbp/error.hpp"
#include "csbp/simulate.hpp"

namespace csbp
{
namespace
{
constexpr char kMagic[8] = {'C', 'S', 'B', 'P', 'P', 'T', 'H', '1'};

static_assert(std::endian::native == std::endian::little
                  || std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template<class T>
T to_little(T v)
{
    if constexpr (std::endian::native == std::endian::big)
    {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

void put_u8(std::ostream& os, std::uint8_t v)
{
    os.put(static_cast<char>(v));
}

void put_u64(std::ostream& os, std::uint64_t v)
{
    v = to_little(v);
    os.write(reinterpret_cast<char const*>(&v), sizeof v);
}

void put_f64(std::ostream& os, double v)
{
    put_u64(os, std::bit_cast<std::uint64_t>(v));
}

std::uint8_t get_u8(std::istream& is)
{
    char c;
    if (!is.get(c))
        throw DomainError("path dump truncated");
    return static_cast<std::uint8_t>(c);
}

std::uint64_t get_u64(std::istream& is)
{
    std::uint64_t v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
        throw DomainError("path dump truncated");
    return to_little(v);
}

double get_f64(std::istream& is)
{
    return std::bit_cast<double>(get_u64(is));
}
}  // namespace

void write_path_binary(std::ostream& os, SimPath const& p)
{
    os.write(kMagic, sizeof kMagic);
    put_u8(os, static_cast<std::uint8_t>(p.kind));
    put_u8(os, static_cast<std::uint8_t>(p.config.truncation));
    put_u8(os, static_cast<std::uint8_t>(p.config.small_jumps));
    put_u8(os, p.config.record_thinned ? 1 : 0);
    put_u64(os, p.config.seed);
    put_f64(os, p.config.thinning_margin);
    put_f64(os, p.config.scale_reference);
    put_u64(os, p.config.path_index);
    put_u64(os, p.config.max_jumps);
    for (double v : {p.x0, p.config.horizon, p.config.dt, p.config.eps,
                     p.absorption_time, p.zero_hit_time, p.end_time})
        put_f64(os, v);
    put_u64(os, p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        put_f64(os, p.times[i]);
        put_f64(os, p.values[i]);
        put_f64(os, p.left_values[i]);
        put_f64(os, p.brownian_increments[i]);
        put_f64(os, p.small_jump_increments[i]);
    }
    put_u64(os, p.atoms.size());
    for (auto const& a : p.atoms)
    {
        for (double v : {a.t, a.nu, a.r, a.u, a.z_before, a.z_after})
            put_f64(os, v);
        put_u8(os, static_cast<std::uint8_t>(a.source));
        put_u8(os, a.applied ? 1 : 0);
        for (int i = 0; i < 6; ++i)
            put_u8(os, 0);
    }
}

SimPath read_path_binary(std::istream& is)
{
    char magic[8];
    if (!is.read(magic, sizeof magic)
        || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw DomainError("not a path dump (bad magic)");
    SimPath p;
    p.kind = static_cast<PathKind>(get_u8(is));
    p.config.truncation = static_cast<Truncation>(get_u8(is));
    p.config.small_jumps = static_cast<SmallJumps>(get_u8(is));
    p.config.record_thinned = get_u8(is) != 0;
    p.config.seed = get_u64(is);
    p.config.thinning_margin = get_f64(is);
    p.config.scale_reference = get_f64(is);
    p.config.path_index = get_u64(is);
    p.config.max_jumps = get_u64(is);
    p.x0 = get_f64(is);
    p.config.horizon = get_f64(is);
    p.config.dt = get_f64(is);
    p.config.eps = get_f64(is);
    p.absorption_time = get_f64(is);
    p.zero_hit_time = get_f64(is);
    p.end_time = get_f64(is);
    std::uint64_t const n = get_u64(is);
    for (std::uint64_t i = 0; i < n; ++i)
    {
        p.times.push_back(get_f64(is));
        p.values.push_back(get_f64(is));
        p.left_values.push_back(get_f64(is));
        p.brownian_increments.push_back(get_f64(is));
        p.small_jump_increments.push_back(get_f64(is));
    }
    std::uint64_t const m = get_u64(is);
    for (std::uint64_t i = 0; i < m; ++i)
    {
        JumpAtom a;
        a.t = get_f64(is);
        a.nu = get_f64(is);
        a.r = get_f64(is);
        a.u = get_f64(is);
        a.z_before = get_f64(is);
        a.z_after = get_f64(is);
        a.source = static_cast<AtomSource>(get_u8(is));
        a.applied = get_u8(is) != 0;
        for (int k = 0; k < 6; ++k)
            get_u8(is);
        p.atoms.push_back(a);
    }
    return p;
}

void write_path_csv(std::ostream& os, SimPath const& p)
{
    auto const old_prec = os.precision(17);
    os << "t,value,is_jump,r,nu,u\n";
    std::size_t a = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        double const t = p.times[i];
        while (a < p.atoms.size() && p.atoms[a].t < t)
            ++a;
        if (a < p.atoms.size() && p.atoms[a].t == t)
        {
            auto const& atom = p.atoms[a];
            os << t << ',' << p.values[i] << ",1," << atom.r << ','
               << atom.nu << ',' << atom.u << '\n';
        }
        else
        {
            os << t << ',' << p.values[i] << ",0,,,\n";
        }
    }
    os.precision(old_prec);
}

}  // namespace csbp
