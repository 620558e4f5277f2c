#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hisom/calabi.hpp"
#include "hisom/domains.hpp"
#include "hisom/kernels.hpp"
#include "hisom/poly.hpp"

namespace hisom {

// Jet of a holomorphic map f: B^n -> target with f(0) = 0, claimed to
// satisfy h(f(w), f(w)) = (1 - |w|^2)^k.
template <class S>
struct IsometryJet {
  DomainSpec target;
  SignedSOS<S> sos;
  int k = 1;
  JetMap<S> f;

  int n() const { return f.source_dim(); }
  int degree() const { return f.degree(); }
};

template <class S>
IsometryJet<S> make_isometry_jet(const DomainSpec& target, int k, JetMap<S> f);

struct ResidualReport {
  std::string check;
  double max_residual = 0.0;
  bool exact_zero = false;
  std::map<std::pair<int, int>, double> per_bidegree;  // only nonzero bidegrees
  double pointwise_max = 0.0;
  bool pass = false;
};

// h(f, f) - (1 - |w|^2)^k with holomorphic and antiholomorphic degrees <= d.
template <class S>
BidegPoly<S> functional_eq_residual(const IsometryJet<S>& j);

// Exact mode passes iff the residual vanishes identically; float mode iff the
// largest coefficient is <= tol. Also evaluates the residual at 50 seeded
// points of the ball of radius 1/2.
template <class S>
ResidualReport check_functional_eq(const IsometryJet<S>& j, double tol = 1e-9, std::uint64_t seed = 7);

struct SamplePair {
  std::vector<Complex> w;
  std::vector<Complex> zeta;
};
std::vector<SamplePair> default_sample_pairs(int n, int count, std::uint64_t seed);

// Largest |value| of the polarized residual over the sample pairs.
template <class S>
double check_polarized_eq(const IsometryJet<S>& j, const std::vector<SamplePair>& samples);

// max |conj(J)^T J - k I| for J the Jacobian at 0.
template <class S>
double jacobian_defect(const IsometryJet<S>& j);

template <class S>
struct MatchingSplit {
  Matrix<S> unitary;  // U f = (w, G(f), 0)
  Matrix<S> a_prime;  // first n rows
  Matrix<S> u_prime;  // last N - n rows
};

template <class S>
MatchingSplit<S> recover_matching_U(const IsometryJet<S>& j, const MatchTolerances& tol = {});

enum class VarietyKind { W, V };

// Polynomial system lhs * (e[s] for s in lhs_slots) = (e[s] for s in rhs_slots)
// where e = [1, g1(z), ..., g2(z)] is the minimal embedding and slot -1 stands
// for a zero padding entry.
template <class S>
struct VarietySystem {
  VarietyKind kind = VarietyKind::W;
  int ambient_dim = 0;
  Matrix<S> lhs;
  std::vector<int> lhs_slots;
  std::vector<int> rhs_slots;
  std::vector<HoloPoly<S>> embedding;

  int pad_in() const;
  int pad_out() const;
  // Polynomials in z whose common zero set is the variety.
  std::vector<HoloPoly<S>> equations() const;
  // Rows of linear forms in homogeneous coordinates [xi_0, ..., xi_N'] whose
  // common zero set is the projective subspace containing the image.
  Matrix<S> projective_equations() const;
  Matrix<S> jacobian_at_origin() const;
};

template <class S>
VarietySystem<S> build_W(const Matrix<S>& u_prime, const SignedSOS<S>& sos, const MatchTolerances& tol = {});

// Max coefficient of the equations evaluated on the jet, through its degree.
template <class S>
double membership_residual(const JetMap<S>& f, const VarietySystem<S>& v);
template <class S>
double membership_residual(const IsometryJet<S>& j, const VarietySystem<S>& v) {
  return membership_residual(j.f, v);
}

template <class S>
struct ComponentSolution {
  IsometryJet<S> jet;
  Matrix<S> completion;  // [A''; U'']
  int sweeps = 0;
};

// Solves [A''; U''] z = (w, G(z), 0) by fixed-point iteration, where
// [A''; U''] completes the co-isometric U''. The result is verified against
// the functional equation with k = 1.
template <class S>
ComponentSolution<S> solve_component(const Matrix<S>& u_dd, const DomainSpec& spec, int d);
// Same iteration for a caller-supplied unitary [A''; U''] whose last N - n
// rows are U''.
template <class S>
ComponentSolution<S> solve_completed_component(const Matrix<S>& completion, int n, const DomainSpec& spec, int d);
template <class S>
IsometryJet<S> solve_component_jet(const Matrix<S>& u_dd, const DomainSpec& spec, int d) {
  return solve_component(u_dd, spec, d).jet;
}

template <class S>
struct K2Variety {
  VarietySystem<S> system;
  Matrix<S> unitary;  // U (sqrt2 w, G2(f), 0) = (Xi(w), G1(f), 0)
  int m0 = 0;
  int big_n0 = 0;
  std::size_t defect_rank = 0;  // rank((1/2) J conj(J)^T - I_N)
  bool rank_identity = false;   // defect_rank == N - n
};

template <class S>
K2Variety<S> build_k2_variety(const IsometryJet<S>& j, const MatchTolerances& tol = {});

template <class S>
struct Extension {
  IsometryJet<S> outer;  // F on the ball of dimension 2N - N'
  Matrix<S> slice;       // rho, with F o rho = f
  double composition_residual = 0.0;
  double slice_defect = 0.0;  // max |conj(rho)^T rho - I|
};

template <class S>
Extension<S> extend_isometry(const IsometryJet<S>& j, double tol = 1e-9);

template <class S>
struct Factorization {
  Matrix<S> slice;
  double composition_residual = 0.0;
  double slice_defect = 0.0;
  bool factorizes = false;
};

// Best linear rho with F o rho = f at first order, then the full composition
// residual through the common degree.
template <class S>
Factorization<S> factor_through(const IsometryJet<S>& outer, const IsometryJet<S>& f, double tol = 1e-9);

}  // namespace hisom
