/*
 * Copyright 2026 the cge-scan authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cge/diagnostics.hpp"

namespace cge {

using Vector = std::vector<double>;

// Dense row-major matrix of 64-bit reals.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return {};
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows(); ++r) {
      if (static_cast<int>(rows[static_cast<size_t>(r)].size()) != m.cols())
        throw ShapeError("ragged row matrix");
      for (int c = 0; c < m.cols(); ++c)
        m(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  double& operator()(int r, int c) {
    return data_[static_cast<size_t>(r) * static_cast<size_t>(cols_) +
                 static_cast<size_t>(c)];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<size_t>(r) * static_cast<size_t>(cols_) +
                 static_cast<size_t>(c)];
  }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  Vector row(int r) const {
    Vector out(static_cast<size_t>(cols_));
    for (int c = 0; c < cols_; ++c) out[static_cast<size_t>(c)] = (*this)(r, c);
    return out;
  }

  void set_row(int r, const Vector& v) {
    for (int c = 0; c < cols_; ++c) (*this)(r, c) = v[static_cast<size_t>(c)];
  }

  bool same_shape(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  Vector data_;
};

// ---------------------------------------------------------------------------
// Primitives. Accumulation order is fixed (row-major), so results are
// bit-reproducible across runs.
// ---------------------------------------------------------------------------

/// W*x + b
inline Vector affine(const Matrix& W, const Vector& x, const Vector& b) {
  if (W.cols() != static_cast<int>(x.size()) ||
      W.rows() != static_cast<int>(b.size()))
    throw ShapeError("affine: W is " + std::to_string(W.rows()) + "x" +
                     std::to_string(W.cols()) + ", |x|=" +
                     std::to_string(x.size()) + ", |b|=" + std::to_string(b.size()));
  Vector out(b);
  for (int r = 0; r < W.rows(); ++r) {
    double acc = 0.0;
    for (int c = 0; c < W.cols(); ++c) acc += W(r, c) * x[static_cast<size_t>(c)];
    out[static_cast<size_t>(r)] += acc;
  }
  return out;
}

/// W^T * y  (gradient push-back through an affine layer)
inline Vector matvec_t(const Matrix& W, const Vector& y) {
  if (W.rows() != static_cast<int>(y.size()))
    throw ShapeError("matvec_t shape mismatch");
  Vector out(static_cast<size_t>(W.cols()), 0.0);
  for (int r = 0; r < W.rows(); ++r)
    for (int c = 0; c < W.cols(); ++c)
      out[static_cast<size_t>(c)] += W(r, c) * y[static_cast<size_t>(r)];
  return out;
}

/// grad += dy * x^T
inline void add_outer(Matrix& grad, const Vector& dy, const Vector& x) {
  if (grad.rows() != static_cast<int>(dy.size()) ||
      grad.cols() != static_cast<int>(x.size()))
    throw ShapeError("add_outer shape mismatch");
  for (int r = 0; r < grad.rows(); ++r)
    for (int c = 0; c < grad.cols(); ++c)
      grad(r, c) += dy[static_cast<size_t>(r)] * x[static_cast<size_t>(c)];
}

inline void add_into(Vector& acc, const Vector& v) {
  if (acc.size() != v.size()) throw ShapeError("add_into shape mismatch");
  for (size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
}

inline Vector concat(const Vector& a, const Vector& b) {
  Vector out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

/// Numerically stable softmax; positive outputs summing to one.
inline Vector softmax(const Vector& x) {
  if (x.empty()) throw ShapeError("softmax of empty vector");
  const double mx = *std::max_element(x.begin(), x.end());
  Vector out(x.size());
  double sum = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - mx);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

/// dL/dz given y = softmax(z) and dL/dy.
inline Vector softmax_backward(const Vector& y, const Vector& dy) {
  double dot = 0.0;
  for (size_t i = 0; i < y.size(); ++i) dot += y[i] * dy[i];
  Vector dz(y.size());
  for (size_t i = 0; i < y.size(); ++i) dz[i] = y[i] * (dy[i] - dot);
  return dz;
}

inline Vector tanh_vec(const Vector& x) {
  Vector out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
  return out;
}

/// dL/dz given y = tanh(z) and dL/dy.
inline Vector tanh_backward(const Vector& y, const Vector& dy) {
  Vector dz(y.size());
  for (size_t i = 0; i < y.size(); ++i) dz[i] = (1.0 - y[i] * y[i]) * dy[i];
  return dz;
}

inline Vector sigmoid_vec(const Vector& x) {
  Vector out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-x[i]));
  return out;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Central finite differences, one coordinate at a time.
inline Vector finite_diff_grad(const std::function<double(const Vector&)>& f,
                               Vector x, double eps) {
  Vector grad(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = f(x);
    x[i] = saved - eps;
    const double down = f(x);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

}  // namespace cge
