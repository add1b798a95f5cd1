#pragma once

// Slow, independent reference implementations used to check the quant
// module. None of these call into nf4.cpp, fp8.cpp or qlora.cpp except to
// read the fields of a QuantizedTensor.

#include <array>
#include <cstdint>

#include "homeplan/quant/matrix.hpp"
#include "homeplan/quant/nf4.hpp"

namespace homeplan::quant::oracle {

/// Standard-normal quantile by bisection on 0.5 * erfc(-x / sqrt(2)).
double normal_quantile(double p);

/// The 16 NormalFloat levels rebuilt from normal_quantile.
std::array<double, 16> nf4_levels();

/// Exhaustive search over all 16 levels; the first minimum wins.
std::uint8_t nearest_code(double x, const std::array<double, 16>& levels);

/// E4M3 value of a byte, computed with std::pow.
double e4m3_value(std::uint8_t bits);

/// Exhaustive search over every finite E4M3 byte for the nearest value,
/// ties to the even mantissa, saturating beyond the largest finite value.
std::uint8_t e4m3_encode(double x);

/// levels[code] * value(c2) * c1, element by element.
Matrix dequantize(const QuantizedTensor& qt, const std::array<double, 16>& levels);

/// Textbook i-j-k triple loop.
Matrix naive_matmul(const Matrix& a, const Matrix& b);

/// X * W + X * L1 * L2 with every product done by naive_matmul.
Matrix lora_forward(const Matrix& x, const Matrix& w, const Matrix& l1, const Matrix& l2);

/// Central differences of 0.5 * ||Y||^2 with respect to every entry of L1
/// and L2, holding X and the dense weight fixed.
struct FiniteDifferences {
  Matrix d_l1;
  Matrix d_l2;
};
FiniteDifferences lora_finite_differences(const Matrix& x, const Matrix& w, const Matrix& l1, const Matrix& l2,
                                          double step);

/// Upper bound on |w_hat - w| for one element, given the block absmax a,
/// the group constant c1 and the ideal level index of w / a. The first term
/// is half the widest level gap; the second covers E4M3 rounding of a / c1
/// (relative half-step 2^-4 for normals, absolute 2^-10 for subnormals).
double error_bound(double absmax, double c1, double ideal_level, const std::array<double, 16>& levels);

}  // namespace homeplan::quant::oracle
