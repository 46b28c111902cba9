#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mcusnn {

/// splitmix64 finalizer; used to derive independent streams from one seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E37'79B9'7F4A'7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58'476D'1CE4'E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D0'49BB'1331'11EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF2'9CE4'8422'2325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x0000'0100'0000'01B3ull;
    }
    return h;
}

/// Uniform integer in [0, n) by rejection; unlike std::uniform_int_distribution
/// the output sequence is identical across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

/// Counter-based uniform draw in [0, 1): a pure function of its coordinates,
/// so generator spikes do not depend on evaluation order.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                                 std::uint64_t tick) noexcept {
    std::uint64_t h = mix64(seed ^ 0x5851'F42D'4C95'7F2Dull);
    h = mix64(h ^ stream);
    h = mix64(h ^ index);
    h = mix64(h ^ tick);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace mcusnn
