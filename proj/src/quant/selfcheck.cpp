#include "homeplan/quant/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "homeplan/quant/fp8.hpp"
#include "homeplan/quant/oracle.hpp"
#include "homeplan/quant/qlora.hpp"

namespace homeplan::quant {

namespace {

const NF4Codebook& codebook_of(const SelfCheckOptions& o) { return o.codebook ? *o.codebook : nf4_codebook(); }

PropertyResult pass(std::string name, std::string detail) { return {std::move(name), true, std::move(detail)}; }
PropertyResult fail(std::string name, std::string detail) { return {std::move(name), false, std::move(detail)}; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = normal(rng);
  return m;
}

// `blocks` rows of 64 values, each row uniform in [-1, 1] times a
// log-uniform scale drawn from [2^lo, 2^hi].
Matrix random_blocks(std::mt19937_64& rng, std::size_t blocks, double lo, double hi) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> exponent(lo, hi);
  Matrix m(blocks, kBlockSize);
  for (std::size_t b = 0; b < blocks; ++b) {
    const double scale = std::exp2(exponent(rng));
    for (std::size_t j = 0; j < kBlockSize; ++j) m(b, j) = unit(rng) * scale;
  }
  return m;
}

bool same_bits(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> block_absmax(const Matrix& w) {
  std::vector<double> out(QuantizedTensor::block_count(w.size()), 0.0);
  const auto v = w.data();
  for (std::size_t i = 0; i < v.size(); ++i) out[i / kBlockSize] = std::max(out[i / kBlockSize], std::fabs(v[i]));
  return out;
}

}  // namespace

PropertyResult check_codebook(const SelfCheckOptions& options) {
  const std::string name = "codebook: endpoints, monotonicity, recomputation";
  const auto& lv = codebook_of(options).levels;
  if (lv.front() != -1.0 || lv.back() != 1.0) return fail(name, "extreme levels are not exactly -1 and +1");
  for (std::size_t i = 1; i < lv.size(); ++i) {
    if (!(lv[i - 1] < lv[i])) return fail(name, "levels not strictly increasing at index " + std::to_string(i));
  }
  if (std::count(lv.begin(), lv.end(), 0.0) != 1) return fail(name, "zero must occupy exactly one level");
  const auto expected = oracle::nf4_levels();
  double worst = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) worst = std::max(worst, std::fabs(lv[i] - expected[i]));
  if (worst > kCodebookTolerance) return fail(name, "max deviation from recomputation " + fmt(worst));
  return pass(name, "max deviation " + fmt(worst));
}

PropertyResult check_e4m3(const SelfCheckOptions& options) {
  const std::string name = "e4m3: decode table and round-to-nearest-even encode";
  for (int code = 0; code < 256; ++code) {
    const auto b = static_cast<std::uint8_t>(code);
    const double got = e4m3_decode(b);
    const double want = oracle::e4m3_value(b);
    if (std::isnan(want) ? !std::isnan(got) : got != want) return fail(name, "decode mismatch at byte " + std::to_string(code));
  }
  std::mt19937_64 rng(options.seed ^ 0xE4);
  std::uniform_real_distribution<double> exponent(-12.0, 10.0);
  std::size_t checked = 0;
  auto probe = [&](double x) {
    ++checked;
    return e4m3_encode(x) == oracle::e4m3_encode(x);
  };
  // Every representable value and every midpoint between neighbours.
  for (int code = 0; code < 0x7E; ++code) {
    const double a = oracle::e4m3_value(static_cast<std::uint8_t>(code));
    const double b = oracle::e4m3_value(static_cast<std::uint8_t>(code + 1));
    for (double x : {a, 0.5 * (a + b), -a, -0.5 * (a + b)}) {
      if (!probe(x)) return fail(name, "encode mismatch at " + fmt(x));
    }
  }
  for (std::size_t i = 0; i < options.blocks; ++i) {
    const double x = std::exp2(exponent(rng)) * (i % 2 ? -1.0 : 1.0);
    if (!probe(x)) return fail(name, "encode mismatch at " + fmt(x));
  }
  for (double x : {448.0, 460.0, 1e6, -1e6}) {
    if (!probe(x)) return fail(name, "saturation mismatch at " + fmt(x));
  }
  return pass(name, std::to_string(checked) + " encodes agree");
}

PropertyResult check_nearest_codes(const SelfCheckOptions& options) {
  const std::string name = "nf4: codes equal brute-force nearest level";
  const auto& cb = codebook_of(options);
  std::mt19937_64 rng(options.seed ^ 0x4E);
  // Scales span 2^-4 .. 2^4, so no block's scale flushes to zero in E4M3.
  const Matrix w = random_blocks(rng, options.blocks, -4.0, 4.0);
  const QuantizedTensor qt = quantize_nf4(w, cb);
  const auto absmax = block_absmax(w);
  const auto v = w.data();
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (qt.codes[i] != oracle::nearest_code(v[i] / absmax[i / kBlockSize], cb.levels)) ++mismatches;
  }
  if (mismatches) return fail(name, std::to_string(mismatches) + " of " + std::to_string(v.size()) + " codes differ");
  return pass(name, std::to_string(options.blocks) + " blocks, " + std::to_string(v.size()) + " codes agree");
}

PropertyResult check_error_bound(const SelfCheckOptions& options) {
  const std::string name = "nf4: round-trip error within analytic bound";
  const auto& cb = codebook_of(options);
  std::mt19937_64 rng(options.seed ^ 0xB0);
  // Wide scale range: some blocks land in E4M3 subnormals or flush to zero.
  const Matrix w = random_blocks(rng, options.blocks, -16.0, 8.0);
  const QuantizedTensor qt = quantize_nf4(w, cb);
  const Matrix back = double_dequant(qt, cb);
  const auto absmax = block_absmax(w);
  const auto v = w.data();
  const auto r = back.data();
  std::size_t bad_blocks = 0;
  double worst_ratio = 0.0;
  for (std::size_t b = 0; b < absmax.size(); ++b) {
    const double c1 = qt.c1[b / kGroupSize];
    bool bad = false;
    for (std::size_t i = b * kBlockSize; i < std::min(v.size(), (b + 1) * kBlockSize); ++i) {
      const double ideal = absmax[b] > 0.0 ? cb.levels[oracle::nearest_code(v[i] / absmax[b], cb.levels)] : 0.0;
      const double bound = oracle::error_bound(absmax[b], c1, ideal, cb.levels) + kBoundSlack * c1;
      const double err = std::fabs(r[i] - v[i]);
      if (bound > 0.0) worst_ratio = std::max(worst_ratio, err / bound);
      if (err > bound) bad = true;
    }
    bad_blocks += bad;
  }
  if (bad_blocks) return fail(name, std::to_string(bad_blocks) + " blocks exceed the bound");
  return pass(name, std::to_string(absmax.size()) + " blocks, worst error/bound " + fmt(worst_ratio));
}

PropertyResult check_zero_matrix(const SelfCheckOptions& options) {
  const std::string name = "nf4: zero matrix round trip is exact";
  const auto& cb = codebook_of(options);
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 5}, {64, 64}, {130, 257}}) {
    const Matrix zero(rows, cols);
    const QuantizedTensor qt = quantize_nf4(zero, cb);
    const auto z = static_cast<std::uint8_t>(cb.zero_index());
    if (std::any_of(qt.codes.begin(), qt.codes.end(), [&](auto c) { return c != z; }))
      return fail(name, "non-zero code in zero block");
    if (std::any_of(qt.c2.begin(), qt.c2.end(), [](auto c) { return c != 0; })) return fail(name, "non-zero c2");
    if (!same_bits(double_dequant(qt, cb), zero)) return fail(name, "dequantized zeros are not bitwise zero");
  }
  return pass(name, "4 shapes");
}

PropertyResult check_idempotence(const SelfCheckOptions& options) {
  const std::string name = "nf4: quantize(dequant) is a fixed point";
  const auto& cb = codebook_of(options);
  std::mt19937_64 rng(options.seed ^ 0x1D);
  const Matrix w = random_blocks(rng, std::max<std::size_t>(options.blocks / 10, 1), -12.0, 6.0);
  const Matrix once = double_dequant(quantize_nf4(w, cb), cb);
  const Matrix twice = double_dequant(quantize_nf4(once, cb), cb);
  if (!same_bits(once, twice)) return fail(name, "second round trip changed the matrix");
  return pass(name, std::to_string(w.rows()) + " blocks bit-identical");
}

PropertyResult check_storage(const SelfCheckOptions& options) {
  const std::string name = "nf4: storage is 4 + 8/64 + 32/16384 bits per element";
  const auto& cb = codebook_of(options);
  const double expected = 4.0 + 8.0 / 64.0 + 32.0 / 16384.0;
  const Matrix w(128, 256, 0.5);  // 32768 elements: exactly 512 blocks, 2 groups
  const QuantizedTensor qt = quantize_nf4(w, cb);
  const double per_element = static_cast<double>(storage_bits(qt)) / static_cast<double>(w.size());
  if (per_element != expected) return fail(name, "got " + fmt(per_element) + " bits per element");
  const Matrix odd(3, 1000);  // 3000 elements: 47 blocks, 1 group
  const QuantizedTensor q2 = quantize_nf4(odd, cb);
  if (q2.codes.size() != 3000 || q2.c2.size() != 47 || q2.c1.size() != 1 || storage_bits(q2) != 3000 * 4 + 47 * 8 + 32)
    return fail(name, "ragged tensor counts are wrong");
  return pass(name, fmt(per_element) + " bits per element");
}

PropertyResult check_serialization(const SelfCheckOptions& options) {
  const std::string name = "nf4: binary layout round trip";
  std::mt19937_64 rng(options.seed ^ 0x5E);
  const Matrix w = random_matrix(rng, 37, 129);
  const QuantizedTensor qt = quantize_nf4(w, codebook_of(options));
  if (deserialize(serialize(qt)) != qt) return fail(name, "deserialize(serialize(qt)) != qt");
  return pass(name, std::to_string(serialize(qt).size()) + " bytes");
}

namespace {

struct Instance {
  Matrix x;
  Matrix w;
  QuantizedTensor qt;
  LoraAdapter adapter;
};

Instance random_instance(std::mt19937_64& rng, const NF4Codebook& cb) {
  std::uniform_int_distribution<std::size_t> small(1, 6);
  std::uniform_int_distribution<std::size_t> wide(1, 90);
  std::uniform_int_distribution<std::size_t> rank(1, 4);
  const std::size_t n = small(rng), d = wide(rng), k = small(rng), r = rank(rng);
  Instance inst;
  inst.x = random_matrix(rng, n, d);
  inst.w = random_matrix(rng, d, k, 0.1);
  inst.qt = quantize_nf4(inst.w, cb);
  inst.adapter = {random_matrix(rng, d, r, 0.5), random_matrix(rng, r, k, 0.5), "q_proj"};
  return inst;
}

}  // namespace

PropertyResult check_forward(const SelfCheckOptions& options) {
  const std::string name = "qlora: forward equals naive evaluation";
  const auto& cb = codebook_of(options);
  std::mt19937_64 rng(options.seed ^ 0xF0);
  double worst = 0.0;
  for (std::size_t t = 0; t < options.instances; ++t) {
    const Instance in = random_instance(rng, cb);
    const Matrix want =
        oracle::lora_forward(in.x, oracle::dequantize(in.qt, cb.levels), in.adapter.l1, in.adapter.l2);
    const Matrix got = qlora_forward(in.x, in.qt, in.adapter);
    if (got.rows() != want.rows() || got.cols() != want.cols()) return fail(name, "shape mismatch");
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::fabs(got.data()[i] - want.data()[i]));
  }
  if (worst > kForwardTolerance) return fail(name, "max abs difference " + fmt(worst));
  return pass(name, std::to_string(options.instances) + " instances, max abs difference " + fmt(worst));
}

PropertyResult check_gradients(const SelfCheckOptions& options) {
  const std::string name = "qlora: adapter gradients match central differences";
  const auto& cb = codebook_of(options);
  std::mt19937_64 rng(options.seed ^ 0x6D);
  double worst = 0.0;
  for (std::size_t t = 0; t < options.instances; ++t) {
    const Instance in = random_instance(rng, cb);
    const Matrix y = qlora_forward(in.x, in.qt, in.adapter);  // dY of 0.5 * ||Y||^2 is Y
    const AdapterGradients an = adapter_gradients(in.x, in.qt, in.adapter, y);
    const auto fd = oracle::lora_finite_differences(in.x, oracle::dequantize(in.qt, cb.levels), in.adapter.l1,
                                                    in.adapter.l2, kFiniteDifferenceStep);
    for (auto [a, f] : {std::pair{&an.d_l1, &fd.d_l1}, std::pair{&an.d_l2, &fd.d_l2}}) {
      for (std::size_t i = 0; i < a->size(); ++i) {
        const double g = a->data()[i];
        worst = std::max(worst, std::fabs(g - f->data()[i]) / std::max(std::fabs(g), 1.0));
      }
    }
  }
  if (worst > kGradientTolerance) return fail(name, "max relative error " + fmt(worst));
  return pass(name, std::to_string(options.instances) + " instances, max relative error " + fmt(worst));
}

PropertyResult check_zero_adapter(const SelfCheckOptions& options) {
  const std::string name = "qlora: zero adapter reduces to X * dequant(W)";
  const auto& cb = codebook_of(options);
  std::mt19937_64 rng(options.seed ^ 0x2A);
  for (std::size_t t = 0; t < options.instances; ++t) {
    Instance in = random_instance(rng, cb);
    in.adapter.l1 = Matrix(in.adapter.l1.rows(), in.adapter.l1.cols());
    if (!same_bits(qlora_forward(in.x, in.qt, in.adapter), matmul(in.x, double_dequant(in.qt, cb))))
      return fail(name, "instance " + std::to_string(t) + " differs");
  }
  return pass(name, std::to_string(options.instances) + " instances bit-identical");
}

std::vector<PropertyResult> run_selfcheck(const SelfCheckOptions& options) {
  std::vector<PropertyResult> out;
  for (auto* check : {check_codebook, check_e4m3, check_nearest_codes, check_error_bound, check_zero_matrix,
                      check_idempotence, check_storage, check_serialization, check_forward, check_gradients,
                      check_zero_adapter}) {
    try {
      out.push_back(check(options));
    } catch (const std::exception& e) {
      out.push_back(fail("exception", e.what()));
    }
  }
  return out;
}

}  // namespace homeplan::quant
