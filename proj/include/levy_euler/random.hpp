#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace levy_euler {

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 block function (Salmon et al., SC 2011).
 *
 * Pure function of (counter, key); used as the bit source of every random
 * stream in the library.
 */
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

//! SplitMix64 finalizer, used for key derivation.
std::uint64_t splitmix64_mix(std::uint64_t z);

/*!
 * Derive a stream key from the master seed, a purpose label, and an index.
 *
 * Labels in use: "rate/level" (index = coarse step count), "rate/reference"
 * (index = reference step count), "one-step" (index = step count of the
 * sweep level), "generator" (index = 0), "sample-stable" (index = 0).
 */
std::uint64_t derive_key(std::uint64_t master_seed, std::string_view label,
                         std::uint64_t index);

//---------------------------------------------------------------------------//
/*!
 * Counter-based random stream.
 *
 * A stream is identified by (key, stream id); the Philox counter carries the
 * stream id in its upper two words and the block index in the lower two, so
 * streams never overlap and may be created in any order by any worker.
 * Satisfies UniformRandomBitGenerator.
 */
class RandomStream
{
  public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t key, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max()
    {
        return std::numeric_limits<result_type>::max();
    }
    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64();

    //! Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    //! Standard normal (Box-Muller; the second variate is cached).
    double normal();
    //! Standard exponential.
    double exponential();

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace levy_euler
