#pragma once

#include <span>
#include <vector>

#include "hisom/domains.hpp"
#include "hisom/poly.hpp"

namespace hisom {

struct MatchTolerances {
  double orthonormality = 1e-10;
  double coefficient = 1e-9;
};

// Gram matrix of the coefficient vectors (one per monomial) of a vector of
// polynomials. Two maps have equal squared norms iff their Grams agree.
template <class S>
struct CoeffGram {
  std::vector<Exponent> basis;
  Matrix<S> matrix;
};

template <class S>
CoeffGram<S> coeff_gram(const std::vector<HoloPoly<S>>& components, const std::vector<Exponent>& basis);

// Unitary R with R x = y that is the identity on {x, y}^perp. Needs
// ||x|| = ||y||; exact mode stays inside the scalar field.
template <class S>
Matrix<S> plane_rotation(std::span<const S> x, std::span<const S> y);

// U unitary with U g = f coefficient-wise. U acts as the identity on the
// orthogonal complement of the coefficient spans. Throws VerificationFailure
// when the two maps are not unitarily equivalent.
template <class S>
Matrix<S> match_unitary(const std::vector<HoloPoly<S>>& f, const std::vector<HoloPoly<S>>& g,
                        const MatchTolerances& tol = {});
template <class S>
Matrix<S> match_unitary(const JetMap<S>& f, const JetMap<S>& g, const MatchTolerances& tol = {}) {
  return match_unitary(f.components(), g.components(), tol);
}

// n x n unitary whose last m rows are A (m x n, orthonormal rows, m < n).
template <class S>
Matrix<S> complete_to_unitary(const Matrix<S>& a, const MatchTolerances& tol = {});

// n(n+1)/2 <= m2(spec).
bool sos_signature_bound(int n, const DomainSpec& spec);
// Largest n passing sos_signature_bound.
int max_signature_dimension(const DomainSpec& spec);

}  // namespace hisom
