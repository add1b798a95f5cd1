#include "homeplan/quant/qlora.hpp"

namespace homeplan::quant {

namespace {

[[noreturn]] void mismatch(const std::string& what) { throw QuantError(QuantError::Kind::DimensionMismatch, what); }

std::string dims(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

void check_shapes(const Matrix& x, const QuantizedTensor& w, const LoraAdapter& adapter) {
  adapter.check();
  if (x.cols() != w.rows) mismatch("input is " + dims(x.rows(), x.cols()) + " but weight is " + dims(w.rows, w.cols));
  if (adapter.l1.rows() != w.rows || adapter.l2.cols() != w.cols) {
    mismatch("adapter " + dims(adapter.l1.rows(), adapter.l1.cols()) + " * " +
             dims(adapter.l2.rows(), adapter.l2.cols()) + " does not match weight " + dims(w.rows, w.cols));
  }
}

}  // namespace

void LoraAdapter::check() const {
  if (l1.cols() == 0) mismatch("adapter rank must be at least 1");
  if (l1.cols() != l2.rows()) {
    mismatch("adapter factors " + dims(l1.rows(), l1.cols()) + " and " + dims(l2.rows(), l2.cols()) + " do not chain");
  }
}

Matrix qlora_forward(const Matrix& x, const QuantizedTensor& w, const LoraAdapter& adapter) {
  check_shapes(x, w, adapter);
  return add(matmul(x, double_dequant(w)), matmul(matmul(x, adapter.l1), adapter.l2));
}

AdapterGradients adapter_gradients(const Matrix& x, const QuantizedTensor& w, const LoraAdapter& adapter,
                                   const Matrix& d_y) {
  check_shapes(x, w, adapter);
  if (d_y.rows() != x.rows() || d_y.cols() != w.cols) {
    mismatch("upstream gradient is " + dims(d_y.rows(), d_y.cols()) + ", expected " + dims(x.rows(), w.cols));
  }
  const Matrix xt = transpose(x);
  return {matmul(xt, matmul(d_y, transpose(adapter.l2))), matmul(transpose(matmul(x, adapter.l1)), d_y)};
}

}  // namespace homeplan::quant
