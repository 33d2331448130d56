#include "pru/tensor.hpp"

#include <cmath>

namespace pru {

namespace {
std::size_t product(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}
}  // namespace

Tensor::Tensor(Shape shape)
    : buf_(std::make_shared<std::vector<double>>(product(shape), 0.0)),
      shape_(std::move(shape)) {
  for (std::size_t e : shape_) {
    if (e == 0) throw ShapeError("tensor extents must be positive");
  }
}

Tensor::Tensor(Shape shape, std::vector<double> data) : Tensor(std::move(shape)) {
  if (data.size() != buf_->size()) {
    throw ShapeError("tensor data length does not match shape");
  }
  *buf_ = std::move(data);
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::full(Shape shape, double v) {
  Tensor t(std::move(shape));
  std::fill(t.buf_->begin(), t.buf_->end(), v);
  return t;
}

std::size_t Tensor::size() const { return buf_ ? buf_->size() : 0; }

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) throw ShapeError("axis out of range");
  return shape_[axis];
}

std::size_t Tensor::cols() const {
  if (shape_.empty()) return 0;
  return shape_.back();
}

double* Tensor::mut() {
  if (!buf_) throw ShapeError("mutating empty tensor");
  if (buf_.use_count() > 1) buf_ = std::make_shared<std::vector<double>>(*buf_);
  return buf_->data();
}

double Tensor::item() const {
  if (size() != 1) throw ContractError("item() requires a scalar tensor");
  return (*buf_)[0];
}

bool Tensor::all_finite() const {
  if (!buf_) return true;
  for (double v : *buf_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace pru
