#include "hisom/kernels.hpp"

#include <algorithm>
#include <numeric>

#include "hisom/errors.hpp"

namespace hisom {

namespace {

// Subsets of {0..n-1} of size k in lexicographic order.
std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  std::iota(cur.begin(), cur.end(), 0);
  if (k > n) return out;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

int permutation_sign(const std::vector<int>& perm) {
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

template <class S>
HoloPoly<S> minor_polynomial(int q, int num_vars, const std::vector<int>& rows, const std::vector<int>& cols) {
  HoloPoly<S> out(num_vars);
  std::vector<int> perm(rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    Exponent e(num_vars, 0);
    for (std::size_t a = 0; a < rows.size(); ++a) ++e[rows[a] * q + cols[perm[a]]];
    out.add_term(e, S(permutation_sign(perm)));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

template <class S>
std::vector<S> generator_values(const std::vector<HoloPoly<S>>& gens, std::span<const S> z) {
  std::vector<S> out;
  for (const auto& g : gens) out.push_back(g.evaluate(z));
  return out;
}

template <class S>
void check_dim(const SignedSOS<S>& sos, std::size_t size) {
  if (static_cast<int>(size) != sos.num_vars) throw PreconditionError("point dimension differs from N");
}

}  // namespace

template <class S>
std::vector<HoloPoly<S>> SignedSOS<S>::embedding_components() const {
  std::vector<HoloPoly<S>> out;
  out.push_back(HoloPoly<S>::constant(num_vars, S(1)));
  out.insert(out.end(), g1.begin(), g1.end());
  out.insert(out.end(), g2.begin(), g2.end());
  return out;
}

template <class S>
void SignedSOS<S>::validate() const {
  if (m1() < num_vars) throw PreconditionError("fewer odd generators than coordinates");
  for (int j = 0; j < num_vars; ++j)
    if (!(g1[j] == HoloPoly<S>::variable(num_vars, j))) throw PreconditionError("leading odd generators must be coordinates");
  for (const auto& g : g1) {
    auto d = g.homogeneous_degree();
    if (!d || *d % 2 == 0) throw PreconditionError("odd generator not homogeneous of odd degree");
  }
  for (const auto& g : g2) {
    auto d = g.homogeneous_degree();
    if (!d || *d % 2 == 1 || *d < 2) throw PreconditionError("even generator not homogeneous of even degree >= 2");
  }
}

template <class S>
bool SignedSOS<S>::is_rank2_shape() const {
  if (m1() != num_vars) return false;
  for (const auto& g : g2)
    if (g.homogeneous_degree() != std::optional<int>(2)) return false;
  return true;
}

template <class S>
SignedSOS<S> sos_polydisk(int p) {
  if (p < 1) throw PreconditionError("polydisk needs p >= 1");
  SignedSOS<S> sos;
  sos.num_vars = p;
  for (int k = 1; k <= p; ++k)
    for (const auto& subset : subsets(p, k)) {
      Exponent e(p, 0);
      for (int j : subset) e[j] = 1;
      (k % 2 == 1 ? sos.g1 : sos.g2).push_back(HoloPoly<S>::monomial(e, S(1)));
    }
  return sos;
}

template <class S>
SignedSOS<S> sos_type_iv(int n) {
  if (n < 3) throw PreconditionError("type IV needs n >= 3");
  SignedSOS<S> sos;
  sos.num_vars = n;
  HoloPoly<S> quad(n);
  for (int j = 0; j < n; ++j) {
    sos.g1.push_back(HoloPoly<S>::variable(n, j));
    Exponent e(n, 0);
    e[j] = 2;
    quad.add_term(e, from_rational<S>(1, 2));
  }
  sos.g2.push_back(quad);
  return sos;
}

template <class S>
SignedSOS<S> sos_type_i(int p, int q) {
  if (p < 1 || p > q) throw PreconditionError("type I needs 1 <= p <= q");
  SignedSOS<S> sos;
  sos.num_vars = p * q;
  for (int k = 1; k <= p; ++k)
    for (const auto& rows : subsets(p, k))
      for (const auto& cols : subsets(q, k))
        (k % 2 == 1 ? sos.g1 : sos.g2).push_back(minor_polynomial<S>(q, p * q, rows, cols));
  return sos;
}

template <class S>
SignedSOS<S> sos_for(const DomainSpec& spec) {
  switch (spec.family) {
    case Family::I: return sos_type_i<S>(spec.params[0], spec.params[1]);
    case Family::IV: return sos_type_iv<S>(spec.params[0]);
    case Family::Polydisk: return sos_polydisk<S>(spec.params[0]);
    default: throw NotInCatalog("no signed sum-of-squares expansion for " + spec.name());
  }
}

SignedSOS<Complex> to_floating(const SignedSOS<Exact>& sos) {
  SignedSOS<Complex> out;
  out.num_vars = sos.num_vars;
  for (const auto& g : sos.g1) out.g1.push_back(to_floating(g));
  for (const auto& g : sos.g2) out.g2.push_back(to_floating(g));
  return out;
}

template <class S>
S h_eval(const SignedSOS<S>& sos, std::span<const S> z) {
  return h_polarized(sos, z, z);
}

template <class S>
S h_polarized(const SignedSOS<S>& sos, std::span<const S> z, std::span<const S> xi) {
  check_dim(sos, z.size());
  check_dim(sos, xi.size());
  S acc(1);
  for (const auto& g : sos.g1) acc -= g.evaluate(z) * conjugate(g.evaluate(xi));
  for (const auto& g : sos.g2) acc += g.evaluate(z) * conjugate(g.evaluate(xi));
  return acc;
}

template <class S>
BidegPoly<S> h_bideg(const SignedSOS<S>& sos) {
  BidegPoly<S> out = BidegPoly<S>::constant(sos.num_vars, S(1));
  for (const auto& g : sos.g1) out -= BidegPoly<S>::hermitian_product(g, g);
  for (const auto& g : sos.g2) out += BidegPoly<S>::hermitian_product(g, g);
  return out;
}

template <class S>
BidegPoly<S> h_pullback(const SignedSOS<S>& sos, const JetMap<S>& f, int d) {
  if (f.target_dim() != sos.num_vars) throw PreconditionError("jet target dimension differs from N");
  BidegPoly<S> out = BidegPoly<S>::constant(f.source_dim(), S(1));
  std::vector<HoloPoly<S>> comps = substitute(sos.g1, f, d);
  std::vector<int> signs(comps.size(), -1);
  for (auto& g : substitute(sos.g2, f, d)) {
    comps.push_back(std::move(g));
    signs.push_back(1);
  }
  out += signed_squared_norm(comps, signs, d);
  return out;
}

template <class S>
std::vector<S> minimal_embedding_eval(const SignedSOS<S>& sos, std::span<const S> z) {
  check_dim(sos, z.size());
  std::vector<S> out{S(1)};
  for (const auto& v : generator_values(sos.g1, z)) out.push_back(v);
  for (const auto& v : generator_values(sos.g2, z)) out.push_back(v);
  return out;
}

double curvature_at_origin(const SignedSOS<Complex>& sos, std::span<const Complex> alpha, double tol) {
  check_dim(sos, alpha.size());
  double norm2 = 0.0;
  for (const auto& a : alpha) norm2 += std::norm(a);
  if (std::abs(norm2 - 1.0) > tol) throw PreconditionError("curvature direction must be a unit vector");
  std::vector<HoloPoly<Complex>> line;
  for (const auto& a : alpha) line.push_back(HoloPoly<Complex>::variable(1, 0, a));
  JetMap<Complex> f(1, 4, line);
  BidegPoly<Complex> potential = -log_truncate(h_pullback(sos, f, 2), 4);
  const double c11 = potential.coefficient({1}, {1}).real();
  const double c22 = potential.coefficient({2}, {2}).real();
  return -4.0 * c22 / (c11 * c11);
}

bool is_interior_point(const DomainSpec& spec, const SignedSOS<Complex>& sos, std::span<const Complex> z) {
  check_dim(sos, z.size());
  double norm2 = 0.0;
  Complex quad = 0.0;
  for (const auto& x : z) {
    norm2 += std::norm(x);
    quad += x * x;
  }
  switch (spec.family) {
    case Family::IV:
      return norm2 < 2.0 && norm2 < 1.0 + std::norm(0.5 * quad);
    case Family::Polydisk:
      return std::all_of(z.begin(), z.end(), [](const Complex& x) { return std::abs(x) < 1.0; });
    default: {
      constexpr int kSteps = 64;
      std::vector<Complex> point(z.size());
      for (int s = 1; s <= kSteps; ++s) {
        const double t = static_cast<double>(s) / kSteps;
        for (std::size_t j = 0; j < z.size(); ++j) point[j] = t * z[j];
        if (h_eval<Complex>(sos, point).real() <= 0.0) return false;
      }
      return true;
    }
  }
}

#define HISOM_INSTANTIATE(S)                                                                  \
  template struct SignedSOS<S>;                                                               \
  template SignedSOS<S> sos_polydisk(int);                                                    \
  template SignedSOS<S> sos_type_iv(int);                                                     \
  template SignedSOS<S> sos_type_i(int, int);                                                 \
  template SignedSOS<S> sos_for(const DomainSpec&);                                           \
  template S h_eval(const SignedSOS<S>&, std::span<const S>);                                 \
  template S h_polarized(const SignedSOS<S>&, std::span<const S>, std::span<const S>);        \
  template BidegPoly<S> h_bideg(const SignedSOS<S>&);                                         \
  template BidegPoly<S> h_pullback(const SignedSOS<S>&, const JetMap<S>&, int);               \
  template std::vector<S> minimal_embedding_eval(const SignedSOS<S>&, std::span<const S>);

HISOM_INSTANTIATE(Exact)
HISOM_INSTANTIATE(Complex)

}  // namespace hisom
