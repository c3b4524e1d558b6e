#pragma once

#include <cstdint>
#include <limits>

namespace prodwalk {

// SplitMix64 finalizer applied to (seed, index). Every independent stream in
// the library (one per path, per restart, per trial) is keyed this way so
// results never depend on how work is chunked across threads.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;
[[nodiscard]] std::uint64_t subseed(std::uint64_t seed, std::uint64_t index) noexcept;

// SplitMix64 stream. Satisfies UniformRandomBitGenerator; uniform() is the
// portable 53-bit mapping (std::uniform_real_distribution is not
// bit-reproducible across standard libraries).
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive. Modulo bias is negligible for the
    // tiny ranges used here.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>((*this)() % span);
    }

private:
    std::uint64_t state_;
};

} // namespace prodwalk
