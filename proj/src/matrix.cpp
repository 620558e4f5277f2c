#include "hisom/matrix.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace hisom {

namespace {

Eigen::MatrixXcd to_eigen(const Matrix<Complex>& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

template <class S>
std::size_t pick_pivot(const Matrix<S>& a, std::size_t col, std::size_t start) {
  std::size_t best = a.rows();
  double best_mag = 0.0;
  for (std::size_t r = start; r < a.rows(); ++r) {
    if (is_zero(a(r, col))) continue;
    if constexpr (is_exact_v<S>) {
      return r;
    } else {
      double mag = std::abs(a(r, col));
      if (mag > best_mag) {
        best_mag = mag;
        best = r;
      }
    }
  }
  return best;
}

template <class S>
void swap_rows(Matrix<S>& a, std::size_t r1, std::size_t r2) {
  if (r1 == r2) return;
  for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(r1, j), a(r2, j));
}

}  // namespace

Matrix<Complex> to_complex(const Matrix<Exact>& m) {
  Matrix<Complex> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_complex();
  return out;
}

template <class S>
Matrix<S> inverse(const Matrix<S>& m) {
  if (m.rows() != m.cols()) throw PreconditionError("inverse of non-square matrix");
  const std::size_t n = m.rows();
  Matrix<S> a = m;
  Matrix<S> inv = Matrix<S>::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = pick_pivot(a, c, c);
    if (p == n) throw std::domain_error("singular matrix");
    swap_rows(a, c, p);
    swap_rows(inv, c, p);
    S scale = S(1) / a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) *= scale;
      inv(c, j) *= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || is_zero(a(r, c))) continue;
      S factor = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        if (!is_zero(a(c, j))) a(r, j) -= factor * a(c, j);
        if (!is_zero(inv(c, j))) inv(r, j) -= factor * inv(c, j);
      }
    }
  }
  return inv;
}

template <class S>
S determinant(const Matrix<S>& m) {
  if (m.rows() != m.cols()) throw PreconditionError("determinant of non-square matrix");
  const std::size_t n = m.rows();
  Matrix<S> a = m;
  S det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = pick_pivot(a, c, c);
    if (p == n) return S(0);
    if (p != c) {
      swap_rows(a, c, p);
      det = -det;
    }
    det *= a(c, c);
    S inv_pivot = S(1) / a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (is_zero(a(r, c))) continue;
      S factor = a(r, c) * inv_pivot;
      for (std::size_t j = c; j < n; ++j)
        if (!is_zero(a(c, j))) a(r, j) -= factor * a(c, j);
    }
  }
  return det;
}

std::size_t rank(const Matrix<Exact>& m) {
  Matrix<Exact> a = m;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = pick_pivot(a, c, r);
    if (p == a.rows()) continue;
    swap_rows(a, r, p);
    Exact inv_pivot = a(r, c).inverse();
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      if (a(i, c).is_zero()) continue;
      Exact factor = a(i, c) * inv_pivot;
      for (std::size_t j = c; j < a.cols(); ++j)
        if (!a(r, j).is_zero()) a(i, j) -= factor * a(r, j);
    }
    ++r;
  }
  return r;
}

std::size_t rank(const Matrix<Complex>& m, double threshold) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
  const auto& s = svd.singularValues();
  const double cut = threshold * std::max(1.0, s(0));
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

std::vector<double> principal_angle_sines(const Matrix<Complex>& a, const Matrix<Complex>& b) {
  if (a.cols() != b.cols()) throw PreconditionError("principal angles need a common ambient space");
  Eigen::MatrixXcd qa = to_eigen(a).transpose().conjugate();  // columns span row space of a
  Eigen::MatrixXcd qb = to_eigen(b).transpose().conjugate();
  // Residual of projecting b's basis onto span(a); its singular values are the sines.
  Eigen::MatrixXcd residual = qb - qa * (qa.adjoint() * qb);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(residual);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) out.push_back(svd.singularValues()(i));
  if (a.rows() != b.rows()) out.insert(out.begin(), 1.0);
  return out;
}

template Matrix<Exact> inverse(const Matrix<Exact>&);
template Matrix<Complex> inverse(const Matrix<Complex>&);
template Exact determinant(const Matrix<Exact>&);
template Complex determinant(const Matrix<Complex>&);

}  // namespace hisom
