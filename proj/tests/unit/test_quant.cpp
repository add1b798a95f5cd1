#include <doctest.h>

#include <cmath>
#include <random>

#include "homeplan/quant/fp8.hpp"
#include "homeplan/quant/oracle.hpp"
#include "homeplan/quant/qlora.hpp"
#include "homeplan/quant/selfcheck.hpp"

using namespace homeplan::quant;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(r, c);
  for (double& v : m.data()) v = u(rng);
  return m;
}

double max_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

QuantError::Kind error_kind(auto&& fn) {
  try {
    fn();
  } catch (const QuantError& e) {
    return e.kind();
  }
  FAIL("expected a QuantError");
  return QuantError::Kind::Format;
}

}  // namespace

TEST_CASE("E4M3 values") {
  CHECK(e4m3_decode(0x00) == 0.0);
  CHECK(e4m3_decode(0x38) == 1.0);
  CHECK(e4m3_decode(0x7E) == 448.0);
  CHECK(e4m3_decode(0x01) == std::ldexp(1.0, -9));
  CHECK(e4m3_decode(0xB8) == -1.0);
  CHECK(std::isnan(e4m3_decode(0x7F)));
  CHECK(e4m3_encode(1.0) == 0x38);
  CHECK(e4m3_encode(1e6) == 0x7E);
  CHECK(e4m3_encode(-1e6) == 0xFE);
  // 1.0625 lies halfway between 1.0 (even mantissa) and 1.125.
  CHECK(e4m3_encode(1.0625) == 0x38);
  CHECK(e4m3_encode(1.1875) == 0x3A);
  for (int b = 0; b <= kE4M3MaxCode; ++b) {
    CHECK(e4m3_decode(static_cast<std::uint8_t>(b)) == oracle::e4m3_value(static_cast<std::uint8_t>(b)));
    CHECK(e4m3_encode(e4m3_decode(static_cast<std::uint8_t>(b))) == b);
  }
}

TEST_CASE("NF4 codebook") {
  const auto& cb = nf4_codebook();
  CHECK(cb.levels.front() == -1.0);
  CHECK(cb.levels.back() == 1.0);
  CHECK(cb.levels[cb.zero_index()] == 0.0);
  CHECK(std::count(cb.levels.begin(), cb.levels.end(), 0.0) == 1);
  for (std::size_t i = 1; i < 16; ++i) CHECK(cb.levels[i - 1] < cb.levels[i]);
  const auto ref = oracle::nf4_levels();
  for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(cb.levels[i] - ref[i]) <= kCodebookTolerance);
  // The widely circulated table was built from single-precision quantile
  // spacing, so it agrees with the double-precision levels to about 1e-7.
  CHECK(std::abs(cb.levels[8] - 0.07958029955625534) < 1e-6);
  CHECK(std::abs(cb.levels[6] - -0.09105003625154495) < 1e-6);
  CHECK(std::abs(cb.levels[14] - 0.7229568362236023) < 1e-6);
}

TEST_CASE("zero matrices stay exactly zero") {
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{1, 1}, {8, 8}, {3, 100}, {64, 257}}) {
    const Matrix z(r, c);
    const auto qt = quantize_nf4(z);
    for (auto code : qt.codes) CHECK(code == nf4_codebook().zero_index());
    for (auto b : qt.c2) CHECK(b == 0);
    CHECK(double_dequant(qt) == z);
  }
}

TEST_CASE("codebook fixed points round trip exactly") {
  Matrix w(1, 64);
  for (std::size_t i = 0; i < 64; ++i) w(0, i) = nf4_codebook().levels[i % 16];
  CHECK(double_dequant(quantize_nf4(w)) == w);
}

TEST_CASE("quantized tensor shape") {
  const Matrix w(3, 1000, 0.5);
  const auto qt = quantize_nf4(w);
  CHECK(qt.codes.size() == 3000);
  CHECK(qt.c2.size() == 47);
  CHECK(qt.c1.size() == 1);
  CHECK(storage_bits(qt) == 3000 * 4 + 47 * 8 + 32);
  CHECK(double_dequant(qt).rows() == 3);
}

TEST_CASE("non-finite input is rejected") {
  Matrix w(2, 2);
  w(1, 1) = std::nan("");
  CHECK(error_kind([&] { quantize_nf4(w); }) == QuantError::Kind::NonFiniteInput);
  w(1, 1) = INFINITY;
  CHECK(error_kind([&] { quantize_nf4(w); }) == QuantError::Kind::NonFiniteInput);
}

TEST_CASE("serialization") {
  std::mt19937_64 rng(3);
  const auto qt = quantize_nf4(random_matrix(rng, 17, 33));
  auto bytes = serialize(qt);
  CHECK(deserialize(bytes) == qt);
  CHECK(error_kind([&] { deserialize({}); }) == QuantError::Kind::Format);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(error_kind([&] { deserialize(bad_magic); }) == QuantError::Kind::Format);
  bytes.pop_back();
  CHECK(error_kind([&] { deserialize(bytes); }) == QuantError::Kind::Format);
}

TEST_CASE("forward pass") {
  std::mt19937_64 rng(42);
  const Matrix x = random_matrix(rng, 4, 8);
  const Matrix w = random_matrix(rng, 8, 2);
  const LoraAdapter ad{random_matrix(rng, 8, 2), random_matrix(rng, 2, 2), "q_proj"};
  const auto qt = quantize_nf4(w);
  const Matrix wd = oracle::dequantize(qt, oracle::nf4_levels());
  CHECK(max_diff(qlora_forward(x, qt, ad), oracle::lora_forward(x, wd, ad.l1, ad.l2)) <= kForwardTolerance);

  // Identity input gives the dequantized weight plus the adapter product.
  const Matrix eye = Matrix::identity(8);
  CHECK(max_diff(qlora_forward(eye, qt, ad), add(double_dequant(qt), matmul(ad.l1, ad.l2))) <= kForwardTolerance);

  // A zero adapter reduces to the plain product, bit for bit.
  const LoraAdapter zero{Matrix(8, 2), random_matrix(rng, 2, 2), ""};
  CHECK(qlora_forward(x, qt, zero) == matmul(x, double_dequant(qt)));
}

TEST_CASE("dimension mismatches") {
  const auto qt = quantize_nf4(Matrix(8, 2, 0.25));
  const LoraAdapter ad{Matrix(8, 2), Matrix(2, 2), ""};
  CHECK(error_kind([&] { qlora_forward(Matrix(4, 7), qt, ad); }) == QuantError::Kind::DimensionMismatch);
  CHECK(error_kind([&] { qlora_forward(Matrix(4, 8), qt, LoraAdapter{Matrix(8, 2), Matrix(3, 2), ""}); }) ==
        QuantError::Kind::DimensionMismatch);
  CHECK(error_kind([&] { qlora_forward(Matrix(4, 8), qt, LoraAdapter{Matrix(8, 0), Matrix(0, 2), ""}); }) ==
        QuantError::Kind::DimensionMismatch);
  CHECK(error_kind([&] { adapter_gradients(Matrix(4, 8), qt, ad, Matrix(4, 3)); }) ==
        QuantError::Kind::DimensionMismatch);
  CHECK(error_kind([&] { matmul(Matrix(2, 3), Matrix(2, 3)); }) == QuantError::Kind::DimensionMismatch);
}

TEST_CASE("adapter gradients") {
  std::mt19937_64 rng(9);
  const auto qt = quantize_nf4(random_matrix(rng, 4, 2));
  const Matrix x = random_matrix(rng, 3, 4);
  const LoraAdapter ad{random_matrix(rng, 4, 2), random_matrix(rng, 2, 2), ""};

  const auto zero = adapter_gradients(x, qt, ad, Matrix(3, 2));
  CHECK(zero.d_l1 == Matrix(4, 2));
  CHECK(zero.d_l2 == Matrix(2, 2));

  // For the loss 0.5 * ||Y||^2 the upstream gradient is Y itself.
  const Matrix y = qlora_forward(x, qt, ad);
  const auto g = adapter_gradients(x, qt, ad, y);
  const auto fd = oracle::lora_finite_differences(x, oracle::dequantize(qt, oracle::nf4_levels()), ad.l1, ad.l2,
                                                  kFiniteDifferenceStep);
  for (std::size_t i = 0; i < g.d_l1.size(); ++i) {
    CHECK(std::abs(g.d_l1.data()[i] - fd.d_l1.data()[i]) <=
          kGradientTolerance * std::max(std::abs(g.d_l1.data()[i]), 1.0));
  }
  for (std::size_t i = 0; i < g.d_l2.size(); ++i) {
    CHECK(std::abs(g.d_l2.data()[i] - fd.d_l2.data()[i]) <=
          kGradientTolerance * std::max(std::abs(g.d_l2.data()[i]), 1.0));
  }

  // Scalar chain rule.
  const auto s = adapter_gradients(Matrix(1, 1, 3.0), quantize_nf4(Matrix(1, 1, 0.7)),
                                   LoraAdapter{Matrix(1, 1, 0.5), Matrix(1, 1, -2.0), ""}, Matrix(1, 1, 1.5));
  CHECK(s.d_l1(0, 0) == 3.0 * 1.5 * -2.0);
  CHECK(s.d_l2(0, 0) == 3.0 * 0.5 * 1.5);
}

TEST_CASE("property suite at reduced size") {
  SelfCheckOptions opts;
  opts.blocks = 500;
  opts.instances = 10;
  for (const auto& r : run_selfcheck(opts)) CHECK_MESSAGE(r.passed, r.name << ": " << r.detail);

  NF4Codebook bad = nf4_codebook();
  std::swap(bad.levels[3], bad.levels[4]);
  opts.codebook = bad;
  bool any_failed = false;
  for (const auto& r : run_selfcheck(opts)) any_failed |= !r.passed;
  CHECK(any_failed);
}
