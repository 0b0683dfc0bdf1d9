#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace csbp
{
//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based bijection (Salmon et al., Random123).
 *
 * Maps a 128-bit counter and 64-bit key to 128 pseudo-random bits. There is
 * no hidden state: the same (counter, key) always gives the same block.
 */
struct Philox4x32
{
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) noexcept;
};

//! Independent random streams used by one simulated path.
enum class Stream : std::uint32_t
{
    brownian = 0,
    jump_epochs = 1,
    jump_sizes = 2,
    selection = 3,  //!< nu coordinates
    marks = 4,      //!< u_n uniforms
    immigrant_epochs = 5,
    immigrant_sizes = 6,
    bridge = 7,  //!< Brownian-bridge crossing tests
    small_jumps = 8,  //!< Gaussian stand-in for dropped small jumps
    user = 15,
};

//---------------------------------------------------------------------------//
/*!
 * UniformRandomBitGenerator producing 64-bit words from Philox.
 *
 * The counter is (block index lo, block index hi, stream id, path index) and
 * the key is the run seed, so every (seed, path, stream) triple addresses a
 * disjoint sequence of 2^64 blocks.
 */
class StreamEngine
{
  public:
    using result_type = std::uint64_t;

    StreamEngine(std::uint64_t seed, std::uint64_t path_index, Stream stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max()
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()();

    //! Number of Philox blocks consumed so far
    std::uint64_t blocks() const { return block_; }

  private:
    Philox4x32::Key key_;
    std::uint32_t stream_;
    std::uint32_t path_;
    std::uint64_t block_{0};
    Philox4x32::Counter out_{};
    int next_{2};  // index into the two 64-bit halves of out_
};

//! Uniform double on [0, 1) with 53 random bits.
inline double uniform01(StreamEngine& eng)
{
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

//! Uniform double on (0, 1], safe as a log argument.
inline double uniform01_open_low(StreamEngine& eng)
{
    return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

//! Standard exponential by inversion.
double exponential1(StreamEngine& eng);

//! Standard normal source over one stream (Marsaglia polar, pair-cached).
class NormalStream
{
  public:
    NormalStream(std::uint64_t seed, std::uint64_t path_index, Stream stream)
        : eng_(seed, path_index, stream)
    {
    }

    double operator()();

  private:
    StreamEngine eng_;
    double cached_{0};
    bool has_cached_{false};
};

}  // namespace csbp
