#include "homeplan/quant/fp8.hpp"

#include <cmath>
#include <limits>

namespace homeplan::quant {

std::uint8_t e4m3_encode(double x) {
  if (std::isnan(x)) return kE4M3NaN;
  const std::uint8_t sign = std::signbit(x) ? 0x80 : 0x00;
  const double mag = std::fabs(x);
  if (mag >= kE4M3Max) return sign | kE4M3MaxCode;

  int exp2 = 0;
  std::frexp(mag, &exp2);  // mag = f * 2^exp2, f in [0.5, 1)
  const int e = exp2 - 1;  // mag in [2^e, 2^(e+1))

  unsigned bits = 0;
  if (mag == 0.0 || e < -6) {
    // Subnormal grid m * 2^-9. A result of 8 lands on the smallest normal,
    // whose encoding is also 8.
    bits = static_cast<unsigned>(std::nearbyint(std::ldexp(mag, 9)));
  } else {
    auto m = static_cast<unsigned>(std::nearbyint((std::ldexp(mag, -e) - 1.0) * 8.0));
    int biased = e + 7;
    if (m == 8) {
      m = 0;
      ++biased;
    }
    bits = (static_cast<unsigned>(biased) << 3) | m;
  }
  if (bits > kE4M3MaxCode) bits = kE4M3MaxCode;
  return static_cast<std::uint8_t>(sign | bits);
}

double e4m3_decode(std::uint8_t bits) {
  const bool negative = (bits & 0x80) != 0;
  const unsigned exp = (bits >> 3) & 0x0F;
  const unsigned man = bits & 0x07;
  if (exp == 0x0F && man == 0x07) return std::numeric_limits<double>::quiet_NaN();
  double mag = exp == 0 ? std::ldexp(static_cast<double>(man), -9)
                        : std::ldexp(1.0 + static_cast<double>(man) / 8.0, static_cast<int>(exp) - 7);
  return negative ? -mag : mag;
}

}  // namespace homeplan::quant
