#pragma once

#include <bit>
#include <cstdint>

namespace mcusnn {

/// IEEE 754 binary16 bit pattern. Storage only: all arithmetic is done after
/// widening to float.
struct Half16 {
    std::uint16_t bits = 0;

    friend constexpr bool operator==(Half16, Half16) = default;
};

inline constexpr std::uint16_t kHalfQuietNan = 0x7E00;
inline constexpr std::uint16_t kHalfPosInf = 0x7C00;
inline constexpr float kHalfMax = 65504.0f;

/// Narrow a float to binary16 with round-to-nearest-even. Subnormals are
/// produced exactly; every NaN maps to kHalfQuietNan.
constexpr Half16 encode(float x) noexcept {
    const std::uint32_t f = std::bit_cast<std::uint32_t>(x);
    const auto sign = static_cast<std::uint16_t>((f >> 16) & 0x8000u);
    const std::uint32_t mag = f & 0x7FFF'FFFFu;

    if (mag > 0x7F80'0000u) {
        return {kHalfQuietNan};
    }
    // 65520 is the midpoint between 65504 and the next (unrepresentable)
    // step; ties go to the even pattern, which is infinity.
    if (mag >= 0x477F'F000u) {
        return {static_cast<std::uint16_t>(sign | kHalfPosInf)};
    }

    const std::uint32_t exp = mag >> 23;
    if (mag < 0x3880'0000u) {
        // Result is a binary16 subnormal (or zero): value / 2^-24.
        if (exp < 102) {
            return {sign};
        }
        const std::uint32_t significand = (mag & 0x007F'FFFFu) | 0x0080'0000u;
        const std::uint32_t shift = 126 - exp;  // 14..24
        std::uint32_t q = significand >> shift;
        const std::uint32_t rem = significand & ((1u << shift) - 1);
        const std::uint32_t halfway = 1u << (shift - 1);
        if (rem > halfway || (rem == halfway && (q & 1u))) {
            ++q;
        }
        return {static_cast<std::uint16_t>(sign | q)};
    }

    std::uint32_t q = ((exp - 112) << 10) | ((mag & 0x007F'FFFFu) >> 13);
    const std::uint32_t rem = mag & 0x1FFFu;
    if (rem > 0x1000u || (rem == 0x1000u && (q & 1u))) {
        ++q;  // a mantissa carry rolls into the exponent, which is correct
    }
    return {static_cast<std::uint16_t>(sign | q)};
}

/// Widen binary16 to float. Exact for every pattern.
constexpr float decode(Half16 h) noexcept {
    const std::uint32_t sign = static_cast<std::uint32_t>(h.bits & 0x8000u) << 16;
    std::uint32_t exp = (h.bits >> 10) & 0x1Fu;
    std::uint32_t mant = h.bits & 0x03FFu;

    if (exp == 0x1F) {
        return std::bit_cast<float>(sign | 0x7F80'0000u | (mant << 13));
    }
    if (exp == 0) {
        if (mant == 0) {
            return std::bit_cast<float>(sign);
        }
        // Renormalize the subnormal into float's normal range.
        exp = 113;
        while ((mant & 0x0400u) == 0) {
            mant <<= 1;
            --exp;
        }
        mant &= 0x03FFu;
        return std::bit_cast<float>(sign | (exp << 23) | (mant << 13));
    }
    return std::bit_cast<float>(sign | ((exp + 112) << 23) | (mant << 13));
}

/// Storage policy entry point for synaptic quantities.
constexpr Half16 store_half(float x) noexcept { return encode(x); }

constexpr bool is_nan(Half16 h) noexcept {
    return (h.bits & 0x7C00u) == 0x7C00u && (h.bits & 0x03FFu) != 0;
}

/// Load/store adaptors so kernels can be written once over the storage type.
template <class Storage>
struct StorageTraits;

template <>
struct StorageTraits<float> {
    static constexpr std::size_t kBytes = 4;
    static constexpr float load(float x) noexcept { return x; }
    static constexpr float store(float x) noexcept { return x; }
};

template <>
struct StorageTraits<Half16> {
    static constexpr std::size_t kBytes = 2;
    static constexpr float load(Half16 h) noexcept { return decode(h); }
    static constexpr Half16 store(float x) noexcept { return store_half(x); }
};

}  // namespace mcusnn
