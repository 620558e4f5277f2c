#include "hisom/calabi.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hisom/errors.hpp"

namespace hisom {

namespace {

template <class S>
std::vector<S> axpy(std::vector<S> v, const S& c, const std::vector<S>& u) {
  if (is_zero(c)) return v;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!is_zero(u[i])) v[i] -= c * u[i];
  return v;
}

template <class S>
bool vectors_equal(const std::vector<S>& a, const std::vector<S>& b) {
  if constexpr (is_exact_v<S>) {
    return a == b;
  } else {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff = std::max(diff, std::abs(a[i] - b[i]));
      scale = std::max(scale, std::abs(a[i]));
    }
    return diff <= 1e-15 * std::max(1.0, scale);
  }
}

// R = I + D M X^* where X = [x y] (N x 2), D = [d1 d2], M 2x2.
template <class S>
Matrix<S> low_rank_update(std::size_t n, const std::vector<S>& x, const std::vector<S>& y, const std::vector<S>& d1,
                          const std::vector<S>& d2, const S (&m)[2][2]) {
  Matrix<S> r = Matrix<S>::identity(n);
  // left = D M (N x 2)
  std::vector<S> l1(n), l2(n);
  for (std::size_t i = 0; i < n; ++i) {
    l1[i] = d1[i] * m[0][0] + d2[i] * m[1][0];
    l2[i] = d1[i] * m[0][1] + d2[i] * m[1][1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (is_zero(l1[i]) && is_zero(l2[i])) continue;
    for (std::size_t j = 0; j < n; ++j) {
      S add(0);
      if (!is_zero(x[j])) add += l1[i] * conjugate(x[j]);
      if (!is_zero(y[j])) add += l2[i] * conjugate(y[j]);
      if (!is_zero(add)) r(i, j) += add;
    }
  }
  return r;
}


// Exact completion for rows with entries in Z[omega, 1/2], omega = exp(i pi/4).
// Column operations (x, y) -> ((x + omega^j y), (x - omega^j y)) / sqrt2 lower the
// delta-adic denominator (delta = 1 + omega) of a unit row until it is a phase
// times a basis vector. Entries stay dyadic, so heights stay small.
struct OmegaInt {
  mpz_class c[4];  // c0 + c1 w + c2 w^2 + c3 w^3
  bool is_zero() const { return c[0] == 0 && c[1] == 0 && c[2] == 0 && c[3] == 0; }
};

constexpr int kInfiniteValuation = 1 << 29;

// delta-adic valuation, or nullopt when a denominator is not a power of two.
std::optional<int> delta_valuation(const Exact& x) {
  if (x.is_zero()) return kInfiniteValuation;
  // re + im i + re_s2 sqrt2 + im_s2 i sqrt2 in the basis 1, w, w^2, w^3.
  const mpq_class q[4] = {x.re(), x.re_s2() + x.im_s2(), x.im(), x.im_s2() - x.re_s2()};
  std::size_t e = 0;
  for (const auto& v : q) {
    const mpz_class& den = v.get_den();
    const std::size_t bits = mpz_scan1(den.get_mpz_t(), 0);
    mpz_class pow2 = 1;
    pow2 <<= bits;
    if (pow2 != den) return std::nullopt;
    e = std::max(e, bits);
  }
  OmegaInt z;
  for (int i = 0; i < 4; ++i) {
    mpz_class num = q[i].get_num();
    num <<= (e - mpz_scan1(q[i].get_den().get_mpz_t(), 0));
    z.c[i] = num;
  }
  int count = 0;
  while (!z.is_zero()) {
    const mpz_class parity = z.c[0] + z.c[1] + z.c[2] + z.c[3];
    if (mpz_odd_p(parity.get_mpz_t())) break;
    // (1 + w) y = z
    OmegaInt y;
    y.c[0] = (z.c[0] + z.c[1] - z.c[2] + z.c[3]) / 2;
    y.c[1] = z.c[1] - y.c[0];
    y.c[2] = z.c[2] - z.c[1] + y.c[0];
    y.c[3] = z.c[3] - z.c[2] + z.c[1] - y.c[0];
    z = y;
    ++count;
  }
  return count - 4 * static_cast<int>(e);
}

std::optional<Matrix<Exact>> dyadic_completion(const Matrix<Exact>& a) {
  const std::size_t m = a.rows(), n = a.cols();
  const Exact half_sqrt2(0, 0, mpq_class(1, 2), 0);
  std::vector<Exact> omega_pow(8);
  omega_pow[0] = Exact(1);
  const Exact omega(0, 0, mpq_class(1, 2), mpq_class(1, 2));
  for (int j = 1; j < 8; ++j) omega_pow[j] = omega_pow[j - 1] * omega;

  Matrix<Exact> work = a;
  Matrix<Exact> g = Matrix<Exact>::identity(n);
  std::vector<bool> fixed(n, false);
  auto mix = [&](Matrix<Exact>& mat, std::size_t ca, std::size_t cb, const Exact& w) {
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      const Exact x = mat(r, ca), y = w * mat(r, cb);
      if (x.is_zero() && y.is_zero()) continue;
      mat(r, ca) = (x + y) * half_sqrt2;
      mat(r, cb) = (x - y) * half_sqrt2;
    }
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (int guard = 0;; ++guard) {
      if (guard > 4096) return std::nullopt;
      std::vector<int> val(n, kInfiniteValuation);
      int low = kInfiniteValuation;
      for (std::size_t c = 0; c < n; ++c) {
        if (fixed[c]) continue;
        auto v = delta_valuation(work(i, c));
        if (!v) return std::nullopt;
        val[c] = *v;
        low = std::min(low, *v);
      }
      if (low >= 0) break;
      std::vector<std::size_t> odd;
      for (std::size_t c = 0; c < n; ++c)
        if (!fixed[c] && val[c] == low) odd.push_back(c);
      if (odd.size() % 2 != 0) return std::nullopt;
      for (std::size_t p = 0; p < odd.size(); p += 2) {
        const std::size_t ca = odd[p], cb = odd[p + 1];
        int pick = -1;
        for (int j = 0; j < 8 && pick < 0; ++j) {
          auto v = delta_valuation(work(i, ca) + omega_pow[j] * work(i, cb));
          if (v && *v >= low + 3) pick = j;
        }
        if (pick < 0) return std::nullopt;
        mix(work, ca, cb, omega_pow[pick]);
        mix(g, ca, cb, omega_pow[pick]);
      }
    }
    std::size_t slot = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (fixed[c] || work(i, c).is_zero()) continue;
      if (slot != n) return std::nullopt;
      slot = c;
    }
    if (slot == n) return std::nullopt;
    fixed[slot] = true;
  }
  // a G = E with E a partial phase permutation, so the free columns of G give the completion.
  Matrix<Exact> w(n, n);
  std::size_t r = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (fixed[t]) continue;
    for (std::size_t j = 0; j < n; ++j) w(r, j) = g(j, t).conj();
    ++r;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) w(n - m + i, j) = a(i, j);
  if (!(w * w.adjoint() == Matrix<Exact>::identity(n))) return std::nullopt;
  return w;
}

std::size_t storage_bits(const Matrix<Exact>& m) {
  std::size_t bits = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      for (const mpq_class* part : {&m(i, j).re(), &m(i, j).im(), &m(i, j).re_s2(), &m(i, j).im_s2()})
        bits += mpz_sizeinbase(part->get_num_mpz_t(), 2) + mpz_sizeinbase(part->get_den_mpz_t(), 2);
  return bits;
}

// Cayley form U = (I + A)^{-1} (I - A) with A skew-Hermitian and
// A (Cg + Cf) = Cg - Cf. A vanishes off the column spans, so U is the identity
// there. Needs no -1 eigenvector of U inside the spans; empty otherwise.
std::optional<Matrix<Exact>> cayley_match(const Matrix<Exact>& cf, const Matrix<Exact>& cg) {
  const std::size_t n = cf.rows();
  const Matrix<Exact> sum = cg + cf;
  const Matrix<Exact> diff = cg - cf;
  std::vector<std::size_t> picked;
  std::vector<std::vector<Exact>> ortho;
  std::vector<Exact> norms;
  for (std::size_t c = 0; c < sum.cols() && picked.size() < n; ++c) {
    std::vector<Exact> u = sum.col(c);
    for (std::size_t k = 0; k < ortho.size(); ++k) u = axpy(u, inner<Exact>(ortho[k], u) / norms[k], ortho[k]);
    const Exact norm = inner<Exact>(u, u);
    if (norm.is_zero()) continue;
    picked.push_back(c);
    ortho.push_back(std::move(u));
    norms.push_back(norm);
  }
  if (picked.empty()) return std::nullopt;
  Matrix<Exact> x(n, picked.size()), y(n, picked.size());
  for (std::size_t j = 0; j < picked.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) {
      x(i, j) = sum(i, picked[j]);
      y(i, j) = diff(i, picked[j]);
    }
  const Matrix<Exact> pinv = inverse(x.adjoint() * x) * x.adjoint();
  const Matrix<Exact> ypinv = y * pinv;
  const Matrix<Exact> a = ypinv - ypinv.adjoint() + pinv.adjoint() * (y.adjoint() * x) * pinv;
  const Matrix<Exact> id = Matrix<Exact>::identity(n);
  Matrix<Exact> u = inverse(id + a) * (id - a);
  if (!(u * cg == cf) || !(u * u.adjoint() == id)) return std::nullopt;
  return u;
}

}  // namespace

template <class S>
CoeffGram<S> coeff_gram(const std::vector<HoloPoly<S>>& components, const std::vector<Exponent>& basis) {
  Matrix<S> c = coefficient_matrix(components, basis);
  return {basis, c.adjoint() * c};
}

template <class S>
Matrix<S> plane_rotation(std::span<const S> xs, std::span<const S> ys) {
  if (xs.size() != ys.size()) throw PreconditionError("plane rotation needs vectors of equal length");
  const std::size_t n = xs.size();
  std::vector<S> x(xs.begin(), xs.end()), y(ys.begin(), ys.end());
  const S xx = inner<S>(x, x);
  const S yy = inner<S>(y, y);
  if constexpr (is_exact_v<S>) {
    if (!(xx == yy)) throw VerificationFailure("plane rotation needs vectors of equal norm");
    if (xx.is_zero()) return Matrix<S>::identity(n);
    const S xy = inner<S>(x, y);
    const S det = xx * xx - xy * conjugate(xy);
    if (det.is_zero()) {
      // y = c x with |c| = 1
      const S c = xy / xx;
      const S zero(0);
      const S m[2][2] = {{(c - S(1)) / xx, zero}, {zero, zero}};
      return low_rank_update(n, x, y, x, std::vector<S>(n, S(0)), m);
    }
    // R x = y, R y = -x + beta y with beta = 2 Re(x^* y) / ||x||^2; both
    // columns of [x y] map isometrically, and {x, y}^perp is fixed.
    const S beta = twice_real(xy) / xx;
    std::vector<S> d1(n), d2(n);
    for (std::size_t i = 0; i < n; ++i) {
      d1[i] = y[i] - x[i];
      d2[i] = beta * y[i] - x[i] - y[i];
    }
    const S inv_det = S(1) / det;
    const S m[2][2] = {{xx * inv_det, -xy * inv_det}, {-conjugate(xy) * inv_det, xx * inv_det}};
    return low_rank_update(n, x, y, d1, d2, m);
  } else {
    const double nx = std::sqrt(xx.real());
    const double ny = std::sqrt(yy.real());
    if (nx == 0.0 || ny == 0.0) {
      if (nx > 1e-12 || ny > 1e-12) throw VerificationFailure("plane rotation needs vectors of equal norm");
      return Matrix<S>::identity(n);
    }
    if (std::abs(nx - ny) > 1e-9 * std::max(1.0, nx)) throw VerificationFailure("plane rotation needs vectors of equal norm");
    std::vector<S> e1(n), yh(n);
    for (std::size_t i = 0; i < n; ++i) {
      e1[i] = x[i] / nx;
      yh[i] = y[i] / ny;
    }
    const Complex t = inner<S>(e1, yh);
    std::vector<S> u = axpy(yh, t, e1);
    // one reorthogonalization pass
    u = axpy(u, inner<S>(e1, u), e1);
    const double rho = std::sqrt(inner<S>(u, u).real());
    const S zero(0);
    if (rho < 1e-14) {
      const Complex phase = t / std::abs(t);
      const S m[2][2] = {{phase - 1.0, zero}, {zero, zero}};
      return low_rank_update(n, e1, std::vector<S>(n, zero), e1, std::vector<S>(n, zero), m);
    }
    std::vector<S> e2(n);
    for (std::size_t i = 0; i < n; ++i) e2[i] = u[i] / rho;
    // On (e1, e2) the map is [[t, -rho], [rho, conj t]].
    std::vector<S> d1(n), d2(n);
    for (std::size_t i = 0; i < n; ++i) {
      d1[i] = (t - 1.0) * e1[i] + rho * e2[i];
      d2[i] = -rho * e1[i] + (std::conj(t) - 1.0) * e2[i];
    }
    const S m[2][2] = {{S(1), zero}, {zero, S(1)}};
    return low_rank_update(n, e1, e2, d1, d2, m);
  }
}

template <class S>
Matrix<S> match_unitary(const std::vector<HoloPoly<S>>& f, const std::vector<HoloPoly<S>>& g, const MatchTolerances& tol) {
  if (f.size() != g.size()) throw PreconditionError("matched maps need equal target dimension");
  if (f.empty()) throw PreconditionError("matched maps need a positive target dimension");
  const std::size_t n = f.size();
  std::vector<HoloPoly<S>> both(f);
  both.insert(both.end(), g.begin(), g.end());
  const std::vector<Exponent> basis = monomial_support(both);
  const Matrix<S> cf = coefficient_matrix(f, basis);
  const Matrix<S> cg = coefficient_matrix(g, basis);

  // Orthogonalize g's coefficient columns; the same combinations of f's
  // columns are orthogonal with equal norms exactly when the Grams agree.
  std::vector<std::vector<S>> us, vs;
  std::vector<S> norms;
  for (std::size_t c = 0; c < basis.size() && us.size() < n; ++c) {
    std::vector<S> u = cg.col(c), v = cf.col(c);
    const double original = std::sqrt(magnitude(inner<S>(u, u)));
    const int passes = is_exact_v<S> ? 1 : 2;
    for (int pass = 0; pass < passes; ++pass)
      for (std::size_t k = 0; k < us.size(); ++k) {
        const S coef = inner<S>(us[k], u) / norms[k];
        u = axpy(u, coef, us[k]);
        v = axpy(v, coef, vs[k]);
      }
    const S norm = inner<S>(u, u);
    if constexpr (is_exact_v<S>) {
      if (norm.is_zero()) continue;
    } else {
      if (std::sqrt(norm.real()) <= 1e-9 * std::max(1.0, original)) continue;
    }
    us.push_back(std::move(u));
    vs.push_back(std::move(v));
    norms.push_back(norm);
  }

  Matrix<S> q = Matrix<S>::identity(n);
  for (std::size_t i = 0; i < us.size(); ++i) {
    std::vector<S> x = q.apply(us[i]);
    if (vectors_equal(x, vs[i])) continue;
    Matrix<S> r = plane_rotation<S>(x, vs[i]);
    q = r * q;
  }

  const Matrix<S> residual = q * cg - cf;
  if constexpr (is_exact_v<S>) {
    if (max_abs(residual) != 0.0) throw VerificationFailure("maps are not unitarily equivalent");
    // Both constructions fix the complement of the spans; keep the one with
    // smaller entries, since every later exact step pays for their size.
    if (auto u = cayley_match(cf, cg); u && storage_bits(*u) < storage_bits(q)) return *u;
  } else {
    if (max_abs(residual) > tol.coefficient) throw VerificationFailure("maps are not unitarily equivalent");
  }
  return q;
}

template <class S>
Matrix<S> complete_to_unitary(const Matrix<S>& a, const MatchTolerances& tol) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m >= n) throw PreconditionError("completion needs fewer rows than columns");
  if (!has_orthonormal_rows(a, tol.orthonormality)) throw PreconditionError("rows are not orthonormal");
  if constexpr (is_exact_v<S>) {
    if (auto w = dyadic_completion(a)) return *w;
  }
  // Build Q with Q e_{n-m+i} = conj(a_i)^T; the completion is Q^*.
  Matrix<S> q = Matrix<S>::identity(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<S> x = q.col(n - m + i);
    std::vector<S> y = a.row(i);
    for (auto& v : y) v = conjugate(v);
    if (vectors_equal(x, y)) continue;
    q = plane_rotation<S>(x, y) * q;
  }
  Matrix<S> w = q.adjoint();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) w(n - m + i, j) = a(i, j);
  return w;
}

bool sos_signature_bound(int n, const DomainSpec& spec) {
  if (n < 1) throw PreconditionError("ball dimension must be positive");
  const SosCounts counts = sos_counts(spec);
  return static_cast<std::int64_t>(n) * (n + 1) / 2 <= counts.m2;
}

int max_signature_dimension(const DomainSpec& spec) {
  const SosCounts counts = sos_counts(spec);
  int n = 0;
  while (static_cast<std::int64_t>(n + 1) * (n + 2) / 2 <= counts.m2) ++n;
  return n;
}

#define HISOM_INSTANTIATE(S)                                                                                  \
  template CoeffGram<S> coeff_gram(const std::vector<HoloPoly<S>>&, const std::vector<Exponent>&);            \
  template Matrix<S> plane_rotation(std::span<const S>, std::span<const S>);                                  \
  template Matrix<S> match_unitary(const std::vector<HoloPoly<S>>&, const std::vector<HoloPoly<S>>&,          \
                                   const MatchTolerances&);                                                   \
  template Matrix<S> complete_to_unitary(const Matrix<S>&, const MatchTolerances&);

HISOM_INSTANTIATE(Exact)
HISOM_INSTANTIATE(Complex)

}  // namespace hisom
