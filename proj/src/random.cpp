#include "hisom/random.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace hisom {

long draw_int(Rng& rng, long lo, long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<long>(rng() % span);
}

namespace {

Matrix<Exact> gate_unitary(std::size_t n, Rng& rng) {
  // Powers of the primitive 8th root of unity (1 + i) / sqrt2.
  const Exact half_root2 = Exact::sqrt2() * Exact::rational(1, 2);
  const Exact omega = (Exact(1) + Exact::imag_unit()) * half_root2;
  std::vector<Exact> roots{Exact(1)};
  for (int k = 1; k < 8; ++k) roots.push_back(roots.back() * omega);

  Matrix<Exact> u(n, n);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[static_cast<std::size_t>(draw_int(rng, 0, static_cast<long>(i) - 1))]);
  for (std::size_t i = 0; i < n; ++i) u(i, perm[i]) = roots[static_cast<std::size_t>(draw_int(rng, 0, 7))];
  if (n < 2) return u;
  // Hadamard mixing of two random rows followed by a random phase; the
  // group generated this way is dense in U(n).
  const std::size_t steps = 2 * n;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t i = static_cast<std::size_t>(draw_int(rng, 0, static_cast<long>(n) - 1));
    std::size_t j = static_cast<std::size_t>(draw_int(rng, 0, static_cast<long>(n) - 2));
    if (j >= i) ++j;
    const Exact& phase = roots[static_cast<std::size_t>(draw_int(rng, 0, 7))];
    for (std::size_t c = 0; c < n; ++c) {
      const Exact a = u(i, c), b = u(j, c);
      u(i, c) = (a + b) * half_root2 * phase;
      u(j, c) = (a - b) * half_root2;
    }
  }
  return u;
}

Matrix<Complex> haar_unitary(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR();
  Matrix<Complex> out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const Complex phase = std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = q(i, j) * phase;
  }
  return out;
}

}  // namespace

template <>
Matrix<Exact> random_unitary<Exact>(std::size_t n, Rng& rng) {
  return gate_unitary(n, rng);
}

template <>
Matrix<Complex> random_unitary<Complex>(std::size_t n, Rng& rng) {
  return haar_unitary(n, rng);
}

template <class S>
Matrix<S> random_coisometry(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows > cols) throw PreconditionError("co-isometry needs rows <= cols");
  return random_unitary<S>(cols, rng).row_block(cols - rows, rows);
}

std::vector<Complex> random_unit_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> v(n);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : v) {
      x = Complex(normal(rng), normal(rng));
      norm2 += std::norm(x);
    }
  } while (norm2 == 0.0);
  const double s = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= s;
  return v;
}

std::vector<Complex> random_ball_point(std::size_t n, double max_radius, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, max_radius);
  auto v = random_unit_vector(n, rng);
  const double r = uniform(rng);
  for (auto& x : v) x *= r;
  return v;
}

template Matrix<Exact> random_coisometry(std::size_t, std::size_t, Rng&);
template Matrix<Complex> random_coisometry(std::size_t, std::size_t, Rng&);

}  // namespace hisom
