#pragma once

#include <cstdint>

namespace homeplan::quant {

// FP8 E4M3 (1 sign, 4 exponent bits with bias 7, 3 mantissa bits). No
// infinities; S.1111.111 is NaN, so the largest finite magnitude is 448.

inline constexpr double kE4M3Max = 448.0;
inline constexpr std::uint8_t kE4M3MaxCode = 0x7E;
inline constexpr std::uint8_t kE4M3NaN = 0x7F;

/// Round to nearest, ties to even; magnitudes beyond 448 saturate.
std::uint8_t e4m3_encode(double x);
double e4m3_decode(std::uint8_t bits);

}  // namespace homeplan::quant
