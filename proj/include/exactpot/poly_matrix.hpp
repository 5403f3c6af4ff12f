#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "exactpot/errors.hpp"
#include "exactpot/multipoly.hpp"
#include "exactpot/rational.hpp"

namespace exactpot {

/// Small dense row-major matrix over an exact or floating scalar type.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  T trace() const {
    T s(0);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  bool is_zero() const {
    for (const auto& x : data_)
      if (x != 0) return false;
    return true;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) throw InputError("matrix product dimension mismatch");
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InputError("matrix sum dimension mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InputError("matrix difference dimension mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = DenseMatrix<Rational>;

/// Dense matrix of polynomials sharing one variable count.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(std::size_t rows, std::size_t cols, std::size_t num_vars)
      : rows_(rows), cols_(cols), n_(num_vars), entries_(rows * cols, MultiPoly(num_vars)) {}

  /// Builds from nested rows; all entries must share one variable count.
  PolyMatrix(std::size_t num_vars, std::initializer_list<std::initializer_list<MultiPoly>> rows)
      : n_(num_vars) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    for (const auto& row : rows) {
      if (row.size() != cols_) throw InputError("ragged polynomial matrix");
      for (const auto& p : row) {
        if (p.num_vars() != n_) throw InputError("entry variable count mismatch");
        entries_.push_back(p);
      }
    }
  }

  static PolyMatrix identity(std::size_t size, std::size_t num_vars) {
    PolyMatrix m(size, size, num_vars);
    for (std::size_t i = 0; i < size; ++i) m(i, i) = MultiPoly::constant(num_vars, 1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t num_vars() const { return n_; }

  MultiPoly& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const MultiPoly& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  std::span<const MultiPoly> entries() const { return entries_; }

  bool is_zero() const {
    for (const auto& p : entries_)
      if (!p.is_zero()) return false;
    return true;
  }

  PolyMatrix transpose() const {
    PolyMatrix t(cols_, rows_, n_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Row i as a 1 x cols matrix.
  PolyMatrix row(std::size_t i) const {
    PolyMatrix r(1, cols_, n_);
    for (std::size_t j = 0; j < cols_; ++j) r(0, j) = (*this)(i, j);
    return r;
  }

  friend PolyMatrix operator*(const PolyMatrix& x, const PolyMatrix& y) {
    if (x.cols_ != y.rows_) {
      throw InputError("matrix product dimension mismatch: " + std::to_string(x.rows_) + "x" +
                       std::to_string(x.cols_) + " times " + std::to_string(y.rows_) + "x" +
                       std::to_string(y.cols_));
    }
    if (x.n_ != y.n_) throw InputError("variable-count mismatch in matrix product");
    PolyMatrix z(x.rows_, y.cols_, x.n_);
    for (std::size_t i = 0; i < x.rows_; ++i)
      for (std::size_t k = 0; k < x.cols_; ++k) {
        const MultiPoly& xik = x(i, k);
        if (xik.is_zero()) continue;
        for (std::size_t j = 0; j < y.cols_; ++j) {
          if (!y(k, j).is_zero()) z(i, j) += xik * y(k, j);
        }
      }
    return z;
  }

  friend PolyMatrix operator+(PolyMatrix x, const PolyMatrix& y) {
    x.check_same_shape(y);
    for (std::size_t i = 0; i < x.entries_.size(); ++i) x.entries_[i] += y.entries_[i];
    return x;
  }
  friend PolyMatrix operator-(PolyMatrix x, const PolyMatrix& y) {
    x.check_same_shape(y);
    for (std::size_t i = 0; i < x.entries_.size(); ++i) x.entries_[i] -= y.entries_[i];
    return x;
  }
  friend PolyMatrix operator*(const MultiPoly& s, PolyMatrix x) {
    for (auto& e : x.entries_) e = s * e;
    return x;
  }
  friend PolyMatrix operator*(const Rational& s, PolyMatrix x) {
    for (auto& e : x.entries_) e *= s;
    return x;
  }
  friend bool operator==(const PolyMatrix&, const PolyMatrix&) = default;

  MultiPoly trace() const {
    MultiPoly s(n_);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  /// Adds p to every diagonal entry (X + p I).
  PolyMatrix plus_diagonal(const MultiPoly& p) const {
    if (rows_ != cols_) throw InputError("plus_diagonal needs a square matrix");
    PolyMatrix r = *this;
    for (std::size_t i = 0; i < rows_; ++i) r(i, i) += p;
    return r;
  }

  template <class T>
  DenseMatrix<T> eval(std::span<const T> point) const {
    if (point.size() != n_) {
      throw InputError("evaluation point has length " + std::to_string(point.size()) +
                       ", matrix has " + std::to_string(n_) + " variables");
    }
    DenseMatrix<T> m(rows_, cols_, detail::coefficient_as<T>(Rational(0)));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(point);
    return m;
  }
  template <class T>
  DenseMatrix<T> eval(const std::vector<T>& point) const {
    return eval(std::span<const T>(point));
  }

 private:
  void check_same_shape(const PolyMatrix& y) const {
    if (rows_ != y.rows_ || cols_ != y.cols_ || n_ != y.n_) {
      throw InputError("polynomial matrix shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t n_ = 0;
  std::vector<MultiPoly> entries_;
};

inline PolyMatrix mat_mul(const PolyMatrix& x, const PolyMatrix& y) { return x * y; }
inline PolyMatrix mat_transpose(const PolyMatrix& x) { return x.transpose(); }

}  // namespace exactpot
