#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "hisom/errors.hpp"
#include "hisom/kernels.hpp"
#include "hisom/random.hpp"
#include "test_support.hpp"

using namespace hisom;
using hisom::testing::small_rational;

namespace {

double polydisk_closed(const std::vector<Complex>& z) {
  double out = 1.0;
  for (const auto& x : z) out *= 1.0 - std::norm(x);
  return out;
}

double type_iv_closed(const std::vector<Complex>& z) {
  double norm2 = 0.0;
  Complex quad = 0.0;
  for (const auto& x : z) {
    norm2 += std::norm(x);
    quad += x * x;
  }
  return 1.0 - norm2 + std::norm(0.5 * quad);
}

double type_i_determinant(const std::vector<Complex>& z, int p, int q) {
  Eigen::MatrixXcd m(p, q);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < q; ++j) m(i, j) = z[i * q + j];
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(p, p) - m * m.adjoint();
  return a.determinant().real();
}

// Cofactor expansion, small sizes only.
Exact exact_det(const std::vector<std::vector<Exact>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  Exact acc(0);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<Exact>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Exact> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(a[r][k]);
      minor.push_back(row);
    }
    const Exact term = a[0][c] * exact_det(minor);
    acc += (c % 2 == 0) ? term : -term;
  }
  return acc;
}

Exact type_i_determinant_exact(const std::vector<Exact>& z, int p, int q) {
  std::vector<std::vector<Exact>> a(p, std::vector<Exact>(p, Exact(0)));
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < p; ++k) {
      Exact s(i == k ? 1 : 0);
      for (int j = 0; j < q; ++j) s -= z[i * q + j] * z[k * q + j].conj();
      a[i][k] = s;
    }
  return exact_det(a);
}

std::vector<Complex> scaled_point(std::size_t dim, double radius, Rng& rng) {
  return random_ball_point(dim, radius, rng);
}

int sos_rank(Family f, int a, int b = 0) {
  switch (f) {
    case Family::Polydisk: return a;
    case Family::IV: return 2;
    case Family::I: return std::min(a, b);
    default: return 0;
  }
}

}  // namespace

TEST_CASE("polydisk expansion") {
  const auto d2 = sos_polydisk<Exact>(2);
  REQUIRE(d2.m1() == 2);
  REQUIRE(d2.m2() == 1);
  CHECK(d2.g2[0] == testing::var(2, 0) * testing::var(2, 1));
  const auto d3 = sos_polydisk<Exact>(3);
  CHECK(d3.m1() == 4);
  CHECK(d3.m2() == 3);
  for (int p = 1; p <= 8; ++p) {
    const auto s = sos_polydisk<Complex>(p);
    CHECK(s.m1() == (1 << (p - 1)));
    CHECK(s.m2() + 1 == s.m1());
    s.validate();
  }
  CHECK(sos_polydisk<Exact>(1).m2() == 0);
}

TEST_CASE("type IV expansion") {
  const auto s = sos_type_iv<Exact>(3);
  REQUIRE(s.m2() == 1);
  const std::vector<Exact> z{Exact::rational(1, 2), Exact(0), Exact(0)};
  CHECK(h_eval<Exact>(s, z) == Exact::rational(49, 64));
  CHECK(std::abs(h_eval<Complex>(to_floating(s), std::vector<Complex>{0.5, 0.0, 0.0}).real() - 0.765625) < 1e-15);

  // Null vector: the quadratic generator vanishes.
  const Exact w = Exact::rational(1, 3);
  const Exact r = Exact::sqrt2().inverse();
  const std::vector<Exact> null_point{w * r, Exact::imag_unit() * w * r, Exact(0)};
  CHECK(h_eval<Exact>(s, null_point) == Exact(1) - w * w);

  const auto s4 = sos_type_iv<Exact>(4);
  CHECK(s4.n_prime() == 5);
  CHECK(minimal_embedding_eval<Exact>(s4, std::vector<Exact>(4, Exact(0))).size() == 6);
  CHECK(s4.is_rank2_shape());
  CHECK_THROWS_AS(sos_type_iv<Exact>(2), PreconditionError);
}

TEST_CASE("type I expansion") {
  const auto s22 = sos_type_i<Exact>(2, 2);
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    std::vector<Exact> z;
    for (int i = 0; i < 4; ++i) z.push_back(small_rational(rng));
    Exact expected(1);
    for (const auto& x : z) expected -= x * x.conj();
    const Exact det = z[0] * z[3] - z[1] * z[2];
    expected += det * det.conj();
    CHECK(h_eval<Exact>(s22, z) == expected);
  }
  const auto s34 = sos_type_i<Exact>(3, 4);
  CHECK(s34.m1() == 16);
  CHECK(s34.m2() == 18);
  CHECK(s34.n_prime() == 34);
  CHECK_FALSE(s34.is_rank2_shape());

  const auto s23 = to_floating(sos_type_i<Exact>(2, 3));
  std::vector<Complex> diag(6, 0.0);
  diag[0] = 0.3;
  diag[4] = 0.3;
  CHECK(std::abs(h_eval<Complex>(s23, diag).real() - 0.8281) < 1e-14);

  const auto ball = sos_type_i<Exact>(1, 4);
  CHECK(ball.m2() == 0);
  CHECK(ball.m1() == 4);
}

TEST_CASE("counts agree with the domain catalog") {
  for (int p = 1; p <= 3; ++p)
    for (int q = p; q <= 5; ++q) {
      const auto s = sos_type_i<Complex>(p, q);
      const DomainSpec spec = make_spec(Family::I, {p, q});
      s.validate();
      CHECK(s.m1() >= spec.N);
      CHECK(s.n_prime() == *spec.n_prime);
      CHECK(s.m1() == sos_counts(spec).m1);
      CHECK(s.m2() == sos_counts(spec).m2);
    }
  for (int n = 3; n <= 8; ++n) {
    const DomainSpec spec = make_spec(Family::IV, {n});
    CHECK(sos_for<Complex>(spec).n_prime() == *spec.n_prime);
  }
  for (int p = 1; p <= 6; ++p) {
    const DomainSpec spec = make_spec(Family::Polydisk, {p});
    CHECK(sos_for<Complex>(spec).n_prime() == *spec.n_prime);
  }
  CHECK_THROWS_AS(sos_for<Exact>(make_spec(Family::V)), NotInCatalog);
}

TEST_CASE("expansions match closed forms at random interior points") {
  Rng rng(2024);
  for (int p = 1; p <= 6; ++p) {
    const auto s = sos_polydisk<Complex>(p);
    const DomainSpec spec = make_spec(Family::Polydisk, {p});
    for (int t = 0; t < 40; ++t) {
      std::vector<Complex> z;
      for (const auto& x : random_ball_point(p, 1.0, rng)) z.push_back(x);
      for (auto& x : z) x *= 0.99 / std::max(1.0, std::abs(x));
      REQUIRE(is_interior_point(spec, s, z));
      CHECK(std::abs(h_eval<Complex>(s, z).real() - polydisk_closed(z)) < 1e-10);
      CHECK(h_eval<Complex>(s, z).real() > 0.0);
    }
  }
  for (int n = 3; n <= 8; ++n) {
    const auto s = sos_type_iv<Complex>(n);
    const DomainSpec spec = make_spec(Family::IV, {n});
    for (int t = 0; t < 40; ++t) {
      const auto z = scaled_point(n, 1.0, rng);
      REQUIRE(is_interior_point(spec, s, z));
      CHECK(std::abs(h_eval<Complex>(s, z).real() - type_iv_closed(z)) < 1e-10);
      CHECK(h_eval<Complex>(s, z).real() > 0.0);
    }
  }
  for (int p = 1; p <= 3; ++p)
    for (int q = p; q <= 5; ++q) {
      const auto s = sos_type_i<Complex>(p, q);
      const DomainSpec spec = make_spec(Family::I, {p, q});
      for (int t = 0; t < 20; ++t) {
        const auto z = scaled_point(p * q, 1.0, rng);
        REQUIRE(is_interior_point(spec, s, z));
        CHECK(std::abs(h_eval<Complex>(s, z).real() - type_i_determinant(z, p, q)) < 1e-10);
      }
    }
}

TEST_CASE("exact expansions vanish against exact closed forms") {
  Rng rng(5);
  for (int p = 1; p <= 3; ++p)
    for (int q = p; q <= 4; ++q) {
      const auto s = sos_type_i<Exact>(p, q);
      for (int t = 0; t < 5; ++t) {
        std::vector<Exact> z;
        for (int i = 0; i < p * q; ++i) z.push_back(small_rational(rng));
        CHECK(h_eval<Exact>(s, z) == type_i_determinant_exact(z, p, q));
      }
    }
  const auto iv = sos_type_iv<Exact>(5);
  for (int t = 0; t < 10; ++t) {
    std::vector<Exact> z;
    Exact norm2(0), quad(0);
    for (int i = 0; i < 5; ++i) {
      z.push_back(small_rational(rng));
      norm2 += z.back() * z.back().conj();
      quad += z.back() * z.back();
    }
    const Exact half = Exact::rational(1, 2) * quad;
    CHECK(h_eval<Exact>(iv, z) == Exact(1) - norm2 + half * half.conj());
  }
}

TEST_CASE("polarization and the bidegree form") {
  Rng rng(9);
  const auto s = to_floating(sos_type_i<Exact>(2, 3));
  const auto form = h_bideg(s);
  CHECK(form.is_hermitian(1e-14));
  for (int t = 0; t < 10; ++t) {
    const auto z = random_ball_point(6, 0.7, rng);
    const auto xi = random_ball_point(6, 0.7, rng);
    CHECK(std::abs(h_polarized<Complex>(s, z, xi) - polarize(form).evaluate(z, xi)) < 1e-12);
    CHECK(std::abs(h_polarized<Complex>(s, z, xi) - std::conj(h_polarized<Complex>(s, xi, z))) < 1e-12);
    CHECK(std::abs(h_eval<Complex>(s, z) - form.evaluate(z)) < 1e-12);
  }
  CHECK(h_eval<Exact>(sos_type_iv<Exact>(4), std::vector<Exact>(4, Exact(0))) == Exact(1));
  CHECK_THROWS_AS(h_eval<Exact>(sos_type_iv<Exact>(4), std::vector<Exact>(3, Exact(0))), PreconditionError);
}

TEST_CASE("minimal embedding") {
  const auto d2 = sos_polydisk<Exact>(2);
  const std::vector<Exact> z{Exact(2), Exact(3)};
  const auto e = minimal_embedding_eval<Exact>(d2, z);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == Exact(1));
  CHECK(e[1] == Exact(2));
  CHECK(e[2] == Exact(3));
  CHECK(e[3] == Exact(6));

  const auto iv = sos_type_iv<Exact>(3);
  const std::vector<Exact> y{Exact(1), Exact(2), Exact(3)};
  const auto ey = minimal_embedding_eval<Exact>(iv, y);
  CHECK(ey[4] == Exact(7));
  const auto zero = minimal_embedding_eval<Exact>(iv, std::vector<Exact>(3, Exact(0)));
  CHECK(zero[0] == Exact(1));
  for (std::size_t i = 1; i < zero.size(); ++i) CHECK(zero[i].is_zero());
}

TEST_CASE("pullback along a linear map equals the composed kernel") {
  Rng rng(3);
  const auto s = sos_type_iv<Exact>(4);
  Matrix<Exact> m(4, 2);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) m(i, j) = small_rational(rng);
  const auto f = JetMap<Exact>::linear(m, 4);
  const auto pulled = h_pullback(s, f, 4);
  for (int t = 0; t < 5; ++t) {
    const std::vector<Exact> w{small_rational(rng), small_rational(rng)};
    const auto z = m.apply(w);
    CHECK(std::abs(pulled.evaluate(std::vector<Complex>{w[0].to_complex(), w[1].to_complex()}) -
                   h_eval<Exact>(s, z).to_complex()) < 1e-9);
  }
}

TEST_CASE("holomorphic sectional curvature at the origin") {
  for (int r = 1; r <= 5; ++r) {
    const auto s = sos_polydisk<Complex>(r);
    std::vector<Complex> axis(r, 0.0);
    axis[0] = 1.0;
    CHECK(std::abs(curvature_at_origin(s, axis) + 2.0) < 1e-10);
    std::vector<Complex> diagonal(r, 1.0 / std::sqrt(static_cast<double>(r)));
    CHECK(std::abs(curvature_at_origin(s, diagonal) + 2.0 / r) < 1e-10);
  }
  const auto iv = sos_type_iv<Complex>(3);
  const std::vector<Complex> null_dir{1.0 / std::sqrt(2.0), Complex(0.0, 1.0 / std::sqrt(2.0)), 0.0};
  CHECK(std::abs(curvature_at_origin(iv, null_dir) + 2.0) < 1e-10);
  const std::vector<Complex> real_dir{1.0, 0.0, 0.0};
  CHECK(std::abs(curvature_at_origin(iv, real_dir) + 1.0) < 1e-10);

  Rng rng(77);
  struct Case {
    SignedSOS<Complex> sos;
    int rank;
  };
  std::vector<Case> cases;
  for (int p = 1; p <= 4; ++p) cases.push_back({sos_polydisk<Complex>(p), sos_rank(Family::Polydisk, p)});
  for (int n = 3; n <= 6; ++n) cases.push_back({sos_type_iv<Complex>(n), sos_rank(Family::IV, n)});
  for (int p = 1; p <= 3; ++p)
    for (int q = p; q <= 4; ++q) cases.push_back({sos_type_i<Complex>(p, q), sos_rank(Family::I, p, q)});
  for (const auto& c : cases)
    for (int t = 0; t < 20; ++t) {
      const auto alpha = random_unit_vector(c.sos.num_vars, rng);
      const double kappa = curvature_at_origin(c.sos, alpha);
      CHECK(kappa >= -2.0 - 1e-9);
      CHECK(kappa <= -2.0 / c.rank + 1e-9);
    }
  CHECK_THROWS_AS(curvature_at_origin(iv, std::vector<Complex>{1.0, 1.0, 0.0}), PreconditionError);
}

TEST_CASE("broken signed sums are rejected") {
  auto s = sos_type_iv<Exact>(3);
  s.g1.push_back(testing::var(3, 0) * testing::var(3, 1));
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  auto t = sos_type_iv<Exact>(3);
  t.g2.push_back(testing::var(3, 0));
  CHECK_THROWS_AS(t.validate(), PreconditionError);
}
