#pragma once

#include <span>
#include <vector>

#include "hisom/domains.hpp"
#include "hisom/poly.hpp"

namespace hisom {

// h(z, z) = 1 - sum |g1_l(z)|^2 + sum |g2_l(z)|^2, with g1 the odd-degree and
// g2 the even-degree generators of the minimal embedding.
template <class S>
struct SignedSOS {
  int num_vars = 0;
  std::vector<HoloPoly<S>> g1;
  std::vector<HoloPoly<S>> g2;

  int m1() const { return static_cast<int>(g1.size()); }
  int m2() const { return static_cast<int>(g2.size()); }
  int n_prime() const { return m1() + m2(); }
  // [1, g1..., g2...]
  std::vector<HoloPoly<S>> embedding_components() const;
  // Throws PreconditionError when the degree/sign structure is broken.
  void validate() const;
  // True when g1 is exactly the coordinates and g2 is homogeneous quadratic,
  // the shape assumed by the rank-2 constructions.
  bool is_rank2_shape() const;
};

template <class S>
SignedSOS<S> sos_polydisk(int p);
template <class S>
SignedSOS<S> sos_type_iv(int n);
template <class S>
SignedSOS<S> sos_type_i(int p, int q);
// Dispatch on the family; NotInCatalog for families without an expansion.
template <class S>
SignedSOS<S> sos_for(const DomainSpec& spec);

SignedSOS<Complex> to_floating(const SignedSOS<Exact>& sos);

template <class S>
S h_eval(const SignedSOS<S>& sos, std::span<const S> z);
template <class S>
S h_polarized(const SignedSOS<S>& sos, std::span<const S> z, std::span<const S> xi);
// h(z, z) as a bidegree polynomial.
template <class S>
BidegPoly<S> h_bideg(const SignedSOS<S>& sos);
// h(f(w), f(w)) keeping holomorphic and antiholomorphic degrees <= d.
template <class S>
BidegPoly<S> h_pullback(const SignedSOS<S>& sos, const JetMap<S>& f, int d);

template <class S>
std::vector<S> minimal_embedding_eval(const SignedSOS<S>& sos, std::span<const S> z);

// Holomorphic sectional curvature at 0 along the unit vector alpha, from the
// |t|^4 coefficient of -log h(t alpha, t alpha).
double curvature_at_origin(const SignedSOS<Complex>& sos, std::span<const Complex> alpha, double tol = 1e-9);

// Interior test: explicit inequalities for type IV, unit disks for the
// polydisk, positivity of h along the segment from 0 otherwise.
bool is_interior_point(const DomainSpec& spec, const SignedSOS<Complex>& sos, std::span<const Complex> z);

}  // namespace hisom
