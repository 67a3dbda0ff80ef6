#include "levy_euler/random.hpp"

#include <cmath>
#include <numbers>

namespace levy_euler {

namespace {
constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi)
{
    std::uint64_t const p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key)
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMulA, ctr[0], lo0, hi0);
        mulhilo(kMulB, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return ctr;
}

std::uint64_t splitmix64_mix(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t derive_key(std::uint64_t master_seed, std::string_view label,
                         std::uint64_t index)
{
    std::uint64_t k = splitmix64_mix(master_seed);
    k = splitmix64_mix(k ^ fnv1a(label));
    return splitmix64_mix(k ^ splitmix64_mix(index));
}

RandomStream::RandomStream(std::uint64_t key, std::uint64_t stream_id)
    : key_{static_cast<std::uint32_t>(key),
           static_cast<std::uint32_t>(key >> 32)},
      counter_{0u, 0u, static_cast<std::uint32_t>(stream_id),
               static_cast<std::uint32_t>(stream_id >> 32)}
{
}

void RandomStream::refill()
{
    block_ = philox4x32(counter_, key_);
    if (++counter_[0] == 0)
    {
        ++counter_[1];
    }
    used_ = 0;
}

std::uint64_t RandomStream::next_u64()
{
    if (used_ > 2)
    {
        refill();
    }
    std::uint64_t const v = (static_cast<std::uint64_t>(block_[used_ + 1]) << 32)
                            | block_[used_];
    used_ += 2;
    return v;
}

double RandomStream::uniform()
{
    // midpoint of one of 2^53 equal cells: never 0 or 1
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal()
{
    if (has_cached_normal_)
    {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double const r = std::sqrt(-2.0 * std::log(uniform()));
    double const phi = 2.0 * std::numbers::pi * uniform();
    cached_normal_ = r * std::sin(phi);
    has_cached_normal_ = true;
    return r * std::cos(phi);
}

double RandomStream::exponential()
{
    return -std::log(uniform());
}

}  // namespace levy_euler
