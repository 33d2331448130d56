// Dense row-major tensor of doubles with copy-on-write storage.
#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "pru/common.hpp"

namespace pru {

using Shape = std::vector<std::size_t>;

// Value type used for all numeric data. Copies are cheap (shared buffer);
// mutation through mut() detaches the buffer if it is shared, so snapshots
// of parameters stay valid while training continues.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(Shape shape);                            // zero-filled
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor full(Shape shape, double v);
  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape()); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const;                                // element count
  std::size_t extent(std::size_t axis) const;

  // Rows/cols view: a 1-D tensor is a single row.
  std::size_t rows() const { return rank() <= 1 ? 1 : shape_[0]; }
  std::size_t cols() const;

  const double* data() const { return buf_ ? buf_->data() : nullptr; }
  double* mut();                                            // detach if shared

  double operator[](std::size_t i) const { return (*buf_)[i]; }
  double item() const;                                      // scalar only

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;

 private:
  std::shared_ptr<std::vector<double>> buf_;
  Shape shape_;
};

}  // namespace pru
