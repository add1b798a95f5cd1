#include "homeplan/quant/nf4.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "homeplan/quant/fp8.hpp"

namespace homeplan::quant {

std::size_t NF4Codebook::zero_index() const {
  auto it = std::find(levels.begin(), levels.end(), 0.0);
  return static_cast<std::size_t>(it - levels.begin());
}

NF4Codebook build_nf4_codebook() {
  const boost::math::normal_distribution<double> normal;
  const double offset = 1.0 - 0.5 * (1.0 / 32.0 + 1.0 / 30.0);
  const double top = boost::math::quantile(normal, offset);

  std::vector<double> values;
  for (int i = 0; i < 8; ++i) values.push_back(boost::math::quantile(normal, offset + i * (0.5 - offset) / 8.0));
  for (int i = 0; i < 7; ++i) values.push_back(-boost::math::quantile(normal, offset + i * (0.5 - offset) / 7.0));
  values.push_back(0.0);
  std::sort(values.begin(), values.end());

  NF4Codebook cb;
  for (std::size_t i = 0; i < cb.levels.size(); ++i) cb.levels[i] = values[i] / top;
  return cb;
}

const NF4Codebook& nf4_codebook() {
  static const NF4Codebook codebook = build_nf4_codebook();
  return codebook;
}

std::uint8_t nearest_code(double x, const NF4Codebook& codebook) {
  const auto& lv = codebook.levels;
  // First level at or above x, then settle between it and its lower
  // neighbour by distance.
  auto it = std::lower_bound(lv.begin(), lv.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - lv.begin());
  if (hi == 0) return 0;
  if (hi == lv.size()) return static_cast<std::uint8_t>(lv.size() - 1);
  const std::size_t lo = hi - 1;
  return static_cast<std::uint8_t>(std::fabs(x - lv[lo]) <= std::fabs(lv[hi] - x) ? lo : hi);
}

double QuantizedTensor::block_scale(std::size_t block) const {
  return e4m3_decode(c2[block]) * static_cast<double>(c1[block / kGroupSize]);
}

QuantizedTensor quantize_nf4(const Matrix& w, const NF4Codebook& codebook) {
  const auto values = w.data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw QuantError(QuantError::Kind::NonFiniteInput,
                       "non-finite value at element " + std::to_string(i) + " (row " +
                           std::to_string(w.cols() ? i / w.cols() : 0) + ")");
    }
  }

  QuantizedTensor qt;
  qt.rows = w.rows();
  qt.cols = w.cols();
  const std::size_t n = values.size();
  const std::size_t blocks = QuantizedTensor::block_count(n);
  const std::size_t groups = QuantizedTensor::group_count(blocks);

  std::vector<double> absmax(blocks, 0.0);
  for (std::size_t i = 0; i < n; ++i) absmax[i / kBlockSize] = std::max(absmax[i / kBlockSize], std::fabs(values[i]));
  for (double a : absmax) {
    if (a > std::numeric_limits<float>::max()) {
      throw QuantError(QuantError::Kind::NonFiniteInput, "block absmax exceeds the float32 range of c1");
    }
  }

  qt.c1.assign(groups, 0.0f);
  for (std::size_t b = 0; b < blocks; ++b) {
    qt.c1[b / kGroupSize] = std::max(qt.c1[b / kGroupSize], static_cast<float>(absmax[b]));
  }
  qt.c2.assign(blocks, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    const double c1 = qt.c1[b / kGroupSize];
    if (absmax[b] > 0.0 && c1 > 0.0) qt.c2[b] = e4m3_encode(absmax[b] / c1);
  }

  const auto zero = static_cast<std::uint8_t>(codebook.zero_index());
  qt.codes.assign(n, zero);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = i / kBlockSize;
    // A block whose scale encodes to zero dequantizes to zeros whatever its
    // codes, so it stores the zero level like an all-zero block.
    if (qt.c2[b] == 0) continue;
    qt.codes[i] = nearest_code(values[i] / absmax[b], codebook);
  }
  return qt;
}

Matrix double_dequant(const QuantizedTensor& qt, const NF4Codebook& codebook) {
  Matrix out(qt.rows, qt.cols);
  auto dst = out.data();
  const std::size_t blocks = qt.c2.size();
  for (std::size_t b = 0; b < blocks; ++b) {
    const double scale = qt.block_scale(b);
    const std::size_t end = std::min(dst.size(), (b + 1) * kBlockSize);
    for (std::size_t i = b * kBlockSize; i < end; ++i) dst[i] = codebook.levels[qt.codes[i]] * scale;
  }
  return out;
}

std::size_t storage_bits(const QuantizedTensor& qt) { return qt.codes.size() * 4 + qt.c2.size() * 8 + qt.c1.size() * 32; }

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint8_t byte() {
    need(1);
    return bytes_[pos_++];
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw QuantError(QuantError::Kind::Format, "truncated quantized tensor");
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const QuantizedTensor& qt) {
  std::vector<std::uint8_t> out = {'N', 'F', '4', 'Q'};
  put_u32(out, 1);
  put_u64(out, qt.rows);
  put_u64(out, qt.cols);
  put_u32(out, kBlockSize);
  put_u32(out, kGroupSize);
  put_u64(out, qt.codes.size());
  put_u64(out, qt.c2.size());
  put_u64(out, qt.c1.size());
  for (std::size_t i = 0; i < qt.codes.size(); i += 2) {
    std::uint8_t lo = qt.codes[i] & 0x0F;
    std::uint8_t hi = i + 1 < qt.codes.size() ? qt.codes[i + 1] & 0x0F : 0;
    out.push_back(static_cast<std::uint8_t>(lo | (hi << 4)));
  }
  out.insert(out.end(), qt.c2.begin(), qt.c2.end());
  for (float f : qt.c1) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

QuantizedTensor deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader in(bytes);
  if (in.byte() != 'N' || in.byte() != 'F' || in.byte() != '4' || in.byte() != 'Q') {
    throw QuantError(QuantError::Kind::Format, "bad magic: not an NF4Q tensor");
  }
  if (auto v = in.uint(4); v != 1) throw QuantError(QuantError::Kind::Format, "unsupported version " + std::to_string(v));
  QuantizedTensor qt;
  qt.rows = in.uint(8);
  qt.cols = in.uint(8);
  if (in.uint(4) != kBlockSize || in.uint(4) != kGroupSize) {
    throw QuantError(QuantError::Kind::Format, "unsupported block or group size");
  }
  const std::uint64_t codes = in.uint(8), c2 = in.uint(8), c1 = in.uint(8);
  if (qt.rows != 0 && qt.cols > UINT64_MAX / qt.rows) throw QuantError(QuantError::Kind::Format, "shape overflows");
  const std::size_t n = qt.rows * qt.cols;
  if (codes != n || c2 != QuantizedTensor::block_count(n) || c1 != QuantizedTensor::group_count(c2)) {
    throw QuantError(QuantError::Kind::Format, "header counts do not match the shape");
  }
  in.need((n + 1) / 2 + c2 + 4 * c1);
  qt.codes.resize(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const std::uint8_t b = in.byte();
    qt.codes[i] = b & 0x0F;
    if (i + 1 < n) qt.codes[i + 1] = b >> 4;
  }
  qt.c2.resize(c2);
  for (auto& v : qt.c2) v = in.byte();
  qt.c1.resize(c1);
  for (auto& v : qt.c1) v = std::bit_cast<float>(static_cast<std::uint32_t>(in.uint(4)));
  if (!in.done()) throw QuantError(QuantError::Kind::Format, "trailing bytes after tensor");
  return qt;
}

}  // namespace homeplan::quant
