#include "slm/rng.hpp"

namespace slm {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) noexcept
{
    return mix64(mix64(seed) ^ (purpose * 0xd1342543de82ef95ULL));
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream), key_(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL)))
{
}

std::uint64_t RandomStream::bits_at(std::uint64_t counter) const noexcept
{
    return mix64(key_ ^ mix64(counter * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
}

double RandomStream::uniform_at(std::uint64_t counter) const noexcept
{
    // 53 random mantissa bits, centred in the cell so 0 and 1 are never hit.
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(bits_at(counter) >> 11) + 0.5) * scale;
}

}  // namespace slm
