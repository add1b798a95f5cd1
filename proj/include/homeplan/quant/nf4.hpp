#pragma once

// 4-bit NormalFloat block quantization with double-quantized block scales.
//
// Storage per tensor, elements taken in row-major order:
//   codes  one 4-bit codebook index per element, in blocks of 64
//   c2     one E4M3 byte per 64-block: the block absmax divided by its group
//          constant
//   c1     one float32 per group of 256 consecutive c2 values: the largest
//          block absmax in the group
//
// Dequantization is w = level[code] * (decode(c2) * c1).

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "homeplan/quant/matrix.hpp"

namespace homeplan::quant {

inline constexpr std::size_t kBlockSize = 64;
inline constexpr std::size_t kGroupSize = 256;

struct NF4Codebook {
  std::array<double, 16> levels{};

  /// Index of the level equal to zero; 16 if absent.
  std::size_t zero_index() const;
  bool operator==(const NF4Codebook&) const = default;
};

/// Builds the 16 NormalFloat levels from standard-normal quantiles.
///
/// With offset = 1 - (1/32 + 1/30) / 2:
///   positive side: quantile(p) for the first 8 of 9 evenly spaced p in
///                  [0.5, offset], endpoint 0.5 excluded
///   negative side: -quantile(p) for the first 7 of 8 evenly spaced p in
///                  [0.5, offset], endpoint 0.5 excluded
///   plus an exact 0.
/// Everything is divided by quantile(offset), so the extremes are exactly
/// -1 and +1.
NF4Codebook build_nf4_codebook();

/// Cached result of build_nf4_codebook().
const NF4Codebook& nf4_codebook();

/// Nearest level to x; ties go to the smaller index.
std::uint8_t nearest_code(double x, const NF4Codebook& codebook = nf4_codebook());

struct QuantizedTensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> codes;  // one per element, values 0..15
  std::vector<std::uint8_t> c2;     // E4M3, one per block
  std::vector<float> c1;            // one per group of blocks

  std::size_t element_count() const { return rows * cols; }
  static std::size_t block_count(std::size_t elements) { return (elements + kBlockSize - 1) / kBlockSize; }
  static std::size_t group_count(std::size_t blocks) { return (blocks + kGroupSize - 1) / kGroupSize; }

  /// Block scale decode(c2[b]) * c1[group of b].
  double block_scale(std::size_t block) const;

  bool operator==(const QuantizedTensor&) const = default;
};

/// Throws QuantError(NonFiniteInput) on NaN or infinity.
QuantizedTensor quantize_nf4(const Matrix& w, const NF4Codebook& codebook = nf4_codebook());

Matrix double_dequant(const QuantizedTensor& qt, const NF4Codebook& codebook = nf4_codebook());

/// Bits of storage: 4 per code, 8 per c2, 32 per c1.
std::size_t storage_bits(const QuantizedTensor& qt);

/// Little-endian layout:
///   "NF4Q" | u32 version=1 | u64 rows | u64 cols | u32 block | u32 group |
///   u64 codes | u64 c2 | u64 c1 | codes packed two per byte (low nibble
///   first) | c2 bytes | c1 as IEEE-754 binary32
std::vector<std::uint8_t> serialize(const QuantizedTensor& qt);
QuantizedTensor deserialize(const std::vector<std::uint8_t>& bytes);

}  // namespace homeplan::quant
