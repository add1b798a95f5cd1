#pragma once

// A frozen NF4 linear layer with one low-rank adapter:
//
//   Y = X * double_dequant(W) + X * L1 * L2
//
// X is n x d, W is d x k, L1 is d x r, L2 is r x k. All arithmetic is in
// double precision. Only the adapter receives gradients.

#include <string>

#include "homeplan/quant/matrix.hpp"
#include "homeplan/quant/nf4.hpp"

namespace homeplan::quant {

struct LoraAdapter {
  Matrix l1;  // d x r
  Matrix l2;  // r x k
  std::string target_layer;

  std::size_t rank() const { return l1.cols(); }

  /// Throws QuantError(DimensionMismatch) if the factors do not chain or r == 0.
  void check() const;
};

Matrix qlora_forward(const Matrix& x, const QuantizedTensor& w, const LoraAdapter& adapter);

struct AdapterGradients {
  Matrix d_l1;
  Matrix d_l2;
};

/// Backpropagates the upstream gradient dY (n x k) to the adapter:
///   dL1 = X^T * dY * L2^T,   dL2 = (X * L1)^T * dY.
/// The quantized weight gets no gradient.
AdapterGradients adapter_gradients(const Matrix& x, const QuantizedTensor& w, const LoraAdapter& adapter,
                                   const Matrix& d_y);

}  // namespace homeplan::quant
