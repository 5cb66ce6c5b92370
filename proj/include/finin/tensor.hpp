#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "finin/errors.hpp"

namespace finin {

// Dense row-major matrix of doubles. Vectors are 1×n rows. The shape is
// (rows, cols); values.size() == rows*cols always.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0 || (rows > 0) != (cols > 0)) {
      raise(ErrKind::ShapeMismatch, "Tensor: bad shape " + std::to_string(rows) + "x" +
                                        std::to_string(cols));
    }
    v_.assign(static_cast<size_t>(rows) * static_cast<size_t>(cols), 0.0);
  }

  static Tensor zeros(int rows, int cols) { return Tensor(rows, cols); }

  static Tensor row_vector(const std::vector<double>& values) {
    Tensor t(1, static_cast<int>(values.size()));
    t.v_ = values;
    return t;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double* row(int r) { return v_.data() + static_cast<size_t>(r) * cols_; }
  const double* row(int r) const { return v_.data() + static_cast<size_t>(r) * cols_; }

  double& operator()(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }

  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  void fill(double x) { std::fill(v_.begin(), v_.end(), x); }
  void zero() { fill(0.0); }

  bool all_finite() const {
    for (const double x : v_) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }

  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

// Trainable weight: value plus accumulated gradient of identical shape.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.zero(); }
};

}  // namespace finin
