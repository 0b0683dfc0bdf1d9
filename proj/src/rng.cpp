#include "csbp/rng.hpp"

#include <cmath>

#include "csbp/error.hpp"

namespace csbp
{
namespace
{
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a,
                    std::uint32_t b,
                    std::uint32_t& hi,
                    std::uint32_t& lo)
{
    std::uint64_t const p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}
}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter c, Key k) noexcept
{
    for (int round = 0; round < 10; ++round)
    {
        if (round > 0)
        {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

StreamEngine::StreamEngine(std::uint64_t seed,
                           std::uint64_t path_index,
                           Stream stream)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)}
    , stream_(static_cast<std::uint32_t>(stream))
    , path_(static_cast<std::uint32_t>(path_index))
{
    if (path_index > 0xFFFFFFFFull)
    {
        throw DomainError("path index must fit in 32 bits");
    }
}

auto StreamEngine::operator()() -> result_type
{
    if (next_ == 2)
    {
        out_ = Philox4x32::apply({static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  stream_,
                                  path_},
                                 key_);
        ++block_;
        next_ = 0;
    }
    int const i = 2 * next_++;
    return (static_cast<result_type>(out_[i + 1]) << 32) | out_[i];
}

double exponential1(StreamEngine& eng)
{
    return -std::log(uniform01_open_low(eng));
}

double NormalStream::operator()()
{
    if (has_cached_)
    {
        has_cached_ = false;
        return cached_;
    }
    double v1, v2, s;
    do
    {
        v1 = 2.0 * uniform01(eng_) - 1.0;
        v2 = 2.0 * uniform01(eng_) - 1.0;
        s = v1 * v1 + v2 * v2;
    } while (s >= 1.0 || s == 0.0);
    double const f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v2 * f;
    has_cached_ = true;
    return v1 * f;
}

}  // namespace csbp
