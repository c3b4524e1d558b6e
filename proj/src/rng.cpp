#include "prodwalk/rng.hpp"

namespace prodwalk {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t subseed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed + 0x9E3779B97F4A7C15ULL) ^ (index * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
}

} // namespace prodwalk
