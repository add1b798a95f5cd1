#include "homeplan/quant/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace homeplan::quant::oracle {

double normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 400 && lo < hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::array<double, 16> nf4_levels() {
  const double exact_offset = 1.0 - (1.0 / 32.0 + 1.0 / 30.0) / 2.0;
  const double norm = normal_quantile(exact_offset);

  std::array<double, 16> out{};
  std::size_t n = 0;
  // Negative side: 8 points from offset to 0.5 inclusive, drop the last.
  for (int i = 6; i >= 0; --i) {
    const double p = exact_offset - i * (exact_offset - 0.5) / 7.0;
    out[n++] = -normal_quantile(p) / norm;
  }
  out[n++] = 0.0;
  for (int i = 7; i >= 0; --i) {
    const double p = exact_offset - i * (exact_offset - 0.5) / 8.0;
    out[n++] = normal_quantile(p) / norm;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint8_t nearest_code(double x, const std::array<double, 16>& levels) {
  std::size_t best = 0;
  double best_dist = std::fabs(x - levels[0]);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double d = std::fabs(x - levels[i]);
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  return static_cast<std::uint8_t>(best);
}

double e4m3_value(std::uint8_t bits) {
  const double sign = (bits & 0x80) ? -1.0 : 1.0;
  const int exponent = (bits >> 3) & 0xF;
  const int mantissa = bits & 0x7;
  if (exponent == 15 && mantissa == 7) return std::numeric_limits<double>::quiet_NaN();
  if (exponent == 0) return sign * std::pow(2.0, -6) * (mantissa / 8.0);
  return sign * std::pow(2.0, exponent - 7) * (1.0 + mantissa / 8.0);
}

std::uint8_t e4m3_encode(double x) {
  if (std::isnan(x)) return 0x7F;
  const std::uint8_t sign = std::signbit(x) ? 0x80 : 0x00;
  const double mag = std::fabs(x);
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int code = 0; code <= 0x7E; ++code) {
    const double d = std::fabs(e4m3_value(static_cast<std::uint8_t>(code)) - mag);
    if (d < best_dist || (d == best_dist && (code & 1) == 0)) {
      best = code;
      best_dist = d;
    }
  }
  return static_cast<std::uint8_t>(sign | best);
}

Matrix dequantize(const QuantizedTensor& qt, const std::array<double, 16>& levels) {
  Matrix out(qt.rows, qt.cols);
  for (std::size_t r = 0; r < qt.rows; ++r) {
    for (std::size_t c = 0; c < qt.cols; ++c) {
      const std::size_t i = r * qt.cols + c;
      const std::size_t block = i / 64;
      const std::size_t group = block / 256;
      out(r, c) = levels[qt.codes[i]] * (e4m3_value(qt.c2[block]) * static_cast<double>(qt.c1[group]));
    }
  }
  return out;
}

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix lora_forward(const Matrix& x, const Matrix& w, const Matrix& l1, const Matrix& l2) {
  const Matrix base = naive_matmul(x, w);
  const Matrix low = naive_matmul(naive_matmul(x, l1), l2);
  Matrix out(base.rows(), base.cols());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = base(i, j) + low(i, j);
  return out;
}

namespace {

double half_squared_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return 0.5 * s;
}

Matrix differentiate(Matrix& param, double step, const auto& loss) {
  Matrix grad(param.rows(), param.cols());
  for (std::size_t i = 0; i < param.rows(); ++i) {
    for (std::size_t j = 0; j < param.cols(); ++j) {
      const double saved = param(i, j);
      param(i, j) = saved + step;
      const double up = loss();
      param(i, j) = saved - step;
      const double down = loss();
      param(i, j) = saved;
      grad(i, j) = (up - down) / (2.0 * step);
    }
  }
  return grad;
}

}  // namespace

FiniteDifferences lora_finite_differences(const Matrix& x, const Matrix& w, const Matrix& l1, const Matrix& l2,
                                          double step) {
  Matrix a = l1;
  Matrix b = l2;
  auto loss = [&] { return half_squared_norm(lora_forward(x, w, a, b)); };
  FiniteDifferences fd;
  fd.d_l1 = differentiate(a, step, loss);
  fd.d_l2 = differentiate(b, step, loss);
  return fd;
}

double error_bound(double absmax, double c1, double ideal_level, const std::array<double, 16>& levels) {
  double gap = 0.0;
  for (std::size_t i = 1; i < levels.size(); ++i) gap = std::max(gap, levels[i] - levels[i - 1]);
  const double s = c1 > 0.0 ? absmax / c1 : 0.0;
  const double fp8_step = std::max(s * std::ldexp(1.0, -4), std::ldexp(1.0, -10));
  return absmax * gap / 2.0 + std::fabs(ideal_level) * c1 * fp8_step;
}

}  // namespace homeplan::quant::oracle
