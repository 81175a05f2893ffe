#pragma once

#include <cstdint>

namespace slm {

/// Counter-based uniform generator.
///
/// A draw is a pure function of (seed, stream, counter), so particle i at
/// generation g always sees the same value no matter how the work is split
/// across threads or how many steps were taken before.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    /// Raw 64-bit output at an explicit counter position.
    [[nodiscard]] std::uint64_t bits_at(std::uint64_t counter) const noexcept;

    /// Uniform in the open interval (0, 1) at an explicit counter position.
    [[nodiscard]] double uniform_at(std::uint64_t counter) const noexcept;

    /// Sequential interface: uniform in (0, 1), advances the internal counter.
    double next_uniform() noexcept { return uniform_at(counter_++); }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }
    [[nodiscard]] std::uint64_t position() const noexcept { return counter_; }
    void seek(std::uint64_t counter) noexcept { counter_ = counter; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Derives an independent seed for a named purpose (initial states,
/// parameter draws, bootstrap, ...) from a user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) noexcept;

namespace purpose {
inline constexpr std::uint64_t initial_state = 0x1a17;
inline constexpr std::uint64_t parameter = 0x9a2a;
inline constexpr std::uint64_t path = 0x7a74;
inline constexpr std::uint64_t bootstrap = 0xb007;
}  // namespace purpose

}  // namespace slm
