#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "hisom/errors.hpp"
#include "hisom/scalar.hpp"

namespace hisom {

// Small dense row-major matrix over Exact or Complex.
template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<S> row(std::size_t i) const {
    return std::vector<S>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  std::vector<S> col(std::size_t j) const {
    std::vector<S> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  Matrix adjoint() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = conjugate((*this)(i, j));
    return out;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw PreconditionError("matrix block out of range");
    Matrix out(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }
  Matrix row_block(std::size_t r0, std::size_t nr) const { return block(r0, 0, nr, cols_); }
  Matrix col_block(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }

  std::vector<S> apply(std::span<const S> v) const {
    if (v.size() != cols_) throw PreconditionError("matrix-vector dimension mismatch");
    std::vector<S> out(rows_, S(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (!is_zero((*this)(i, j)) && !is_zero(v[j])) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const S& c) {
    for (auto& x : data_) x *= c;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const S& c) { return a *= c; }
  friend Matrix operator*(const S& c, Matrix a) { return a *= c; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw PreconditionError("matrix product dimension mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!is_zero(b(k, j))) out(i, j) += aik * b(k, j);
      }
    return out;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw PreconditionError("matrix shape mismatch");
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

template <class S>
Matrix<S> vstack(const Matrix<S>& top, const Matrix<S>& bottom) {
  if (top.cols() != bottom.cols()) throw PreconditionError("vstack column mismatch");
  Matrix<S> out(top.rows() + bottom.rows(), top.cols());
  for (std::size_t i = 0; i < top.rows(); ++i)
    for (std::size_t j = 0; j < top.cols(); ++j) out(i, j) = top(i, j);
  for (std::size_t i = 0; i < bottom.rows(); ++i)
    for (std::size_t j = 0; j < top.cols(); ++j) out(top.rows() + i, j) = bottom(i, j);
  return out;
}

template <class S>
Matrix<S> hstack(const Matrix<S>& left, const Matrix<S>& right) {
  if (left.rows() != right.rows()) throw PreconditionError("hstack row mismatch");
  Matrix<S> out(left.rows(), left.cols() + right.cols());
  for (std::size_t i = 0; i < left.rows(); ++i) {
    for (std::size_t j = 0; j < left.cols(); ++j) out(i, j) = left(i, j);
    for (std::size_t j = 0; j < right.cols(); ++j) out(i, left.cols() + j) = right(i, j);
  }
  return out;
}

template <class S>
double max_abs(const Matrix<S>& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, magnitude(m(i, j)));
  return best;
}

// x^* y
template <class S>
S inner(std::span<const S> x, std::span<const S> y) {
  S acc(0);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!is_zero(x[i]) && !is_zero(y[i])) acc += conjugate(x[i]) * y[i];
  return acc;
}

Matrix<Complex> to_complex(const Matrix<Exact>& m);
inline const Matrix<Complex>& to_complex(const Matrix<Complex>& m) { return m; }

// Max entry of A A^* - I; exact zero iff the rows are orthonormal.
template <class S>
double row_orthonormality_defect(const Matrix<S>& a) {
  return max_abs(a * a.adjoint() - Matrix<S>::identity(a.rows()));
}

template <class S>
bool has_orthonormal_rows(const Matrix<S>& a, double tol) {
  if constexpr (is_exact_v<S>) {
    (void)tol;
    return a * a.adjoint() == Matrix<S>::identity(a.rows());
  } else {
    return row_orthonormality_defect(a) <= tol;
  }
}

// Gaussian elimination. Exact mode pivots on any nonzero entry, float mode on
// the largest magnitude.
template <class S>
Matrix<S> inverse(const Matrix<S>& m);
template <class S>
S determinant(const Matrix<S>& m);

std::size_t rank(const Matrix<Exact>& m);
// Numerical rank: singular values above threshold * max(1, largest).
std::size_t rank(const Matrix<Complex>& m, double threshold = 1e-9);

// Sines of the principal angles between the row spaces of two matrices with
// orthonormal rows, largest first.
std::vector<double> principal_angle_sines(const Matrix<Complex>& a, const Matrix<Complex>& b);

}  // namespace hisom
