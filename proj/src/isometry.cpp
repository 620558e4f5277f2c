#include "hisom/isometry.hpp"

#include <algorithm>
#include <cmath>

#include "hisom/errors.hpp"
#include "hisom/random.hpp"

namespace hisom {

namespace {

template <class S>
bool residual_passes(double residual, bool exact_zero, double tol) {
  if constexpr (is_exact_v<S>) {
    (void)residual;
    (void)tol;
    return exact_zero;
  } else {
    (void)exact_zero;
    return residual <= tol;
  }
}

template <class S>
void require_rank2_machinery(const DomainSpec& spec, const SignedSOS<S>& sos) {
  if (spec.rank != 2) throw PreconditionError("construction needs a rank-2 target");
  if (!sos.is_rank2_shape()) throw PreconditionError("expansion is not of rank-2 shape (coordinates + quadrics)");
  if (!rank2_codim_inequality(spec)) throw PreconditionError(spec.name() + " violates 2N > N' + 1");
}

template <class S>
std::vector<HoloPoly<S>> zeros(int num_vars, int count) {
  return std::vector<HoloPoly<S>>(std::max(count, 0), HoloPoly<S>(num_vars));
}

}  // namespace

template <class S>
IsometryJet<S> make_isometry_jet(const DomainSpec& target, int k, JetMap<S> f) {
  if (k < 1 || k > target.rank) throw PreconditionError("isometric constant must lie in [1, rank]");
  if (f.target_dim() != target.N) throw PreconditionError("jet target dimension differs from N");
  if (!f.has_zero_constant_term()) throw PreconditionError("jet must satisfy f(0) = 0");
  IsometryJet<S> j;
  j.target = target;
  j.sos = sos_for<S>(target);
  j.k = k;
  j.f = std::move(f);
  return j;
}

template <class S>
BidegPoly<S> functional_eq_residual(const IsometryJet<S>& j) {
  const int d = j.degree();
  if (d < 2 * j.k) throw PreconditionError("truncation degree must be at least 2k");
  BidegPoly<S> r = h_pullback(j.sos, j.f, d) - ball_kernel_power<S>(j.n(), j.k);
  return r.truncated_box(d);
}

template <class S>
ResidualReport check_functional_eq(const IsometryJet<S>& j, double tol, std::uint64_t seed) {
  const BidegPoly<S> r = functional_eq_residual(j);
  ResidualReport report;
  report.check = "ball-pullback-residual";
  report.max_residual = r.max_abs_coefficient();
  report.exact_zero = r.is_zero();
  for (const auto& [bideg, value] : r.max_abs_by_bidegree())
    if (value > 0.0) report.per_bidegree.emplace(bideg, value);
  Rng rng(seed);
  for (int s = 0; s < 50; ++s) {
    auto w = random_ball_point(j.n(), 0.5, rng);
    report.pointwise_max = std::max(report.pointwise_max, std::abs(r.evaluate(w)));
  }
  report.pass = residual_passes<S>(report.max_residual, report.exact_zero, tol);
  return report;
}

std::vector<SamplePair> default_sample_pairs(int n, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SamplePair> out;
  for (int i = 0; i < count; ++i) {
    SamplePair p;
    p.w = random_ball_point(n, 0.5, rng);
    p.zeta = random_ball_point(n, 0.5, rng);
    out.push_back(std::move(p));
  }
  return out;
}

template <class S>
double check_polarized_eq(const IsometryJet<S>& j, const std::vector<SamplePair>& samples) {
  const auto polar = polarize(functional_eq_residual(j));
  double best = 0.0;
  for (const auto& s : samples) best = std::max(best, std::abs(polar.evaluate(s.w, s.zeta)));
  return best;
}

template <class S>
double jacobian_defect(const IsometryJet<S>& j) {
  const Matrix<S> jac = j.f.jacobian_at_origin();
  Matrix<S> target = Matrix<S>::identity(j.n());
  target *= S(j.k);
  return max_abs(jac.adjoint() * jac - target);
}

template <class S>
MatchingSplit<S> recover_matching_U(const IsometryJet<S>& j, const MatchTolerances& tol) {
  if (j.k != 1) throw PreconditionError("matching recovery needs isometric constant 1");
  require_rank2_machinery(j.target, j.sos);
  const int N = j.target.N;
  const int n = j.n();
  const int n_prime = j.sos.n_prime();
  if (n > 2 * N - n_prime) throw PreconditionError("ball dimension exceeds 2N - N'");
  if (!check_functional_eq(j, tol.coefficient).pass) throw VerificationFailure("functional equation fails");

  std::vector<HoloPoly<S>> rhs;
  for (int mu = 0; mu < n; ++mu) rhs.push_back(HoloPoly<S>::variable(n, mu));
  for (auto& g : substitute(j.sos.g2, j.f, j.degree())) rhs.push_back(std::move(g));
  for (auto& z : zeros<S>(n, 2 * N - n - n_prime)) rhs.push_back(std::move(z));

  MatchingSplit<S> out;
  out.unitary = match_unitary(rhs, j.f.components(), tol);
  out.a_prime = out.unitary.row_block(0, n);
  out.u_prime = out.unitary.row_block(n, N - n);
  return out;
}

template <class S>
int VarietySystem<S>::pad_in() const {
  return static_cast<int>(std::count(lhs_slots.begin(), lhs_slots.end(), -1));
}

template <class S>
int VarietySystem<S>::pad_out() const {
  return static_cast<int>(std::count(rhs_slots.begin(), rhs_slots.end(), -1));
}

template <class S>
std::vector<HoloPoly<S>> VarietySystem<S>::equations() const {
  std::vector<HoloPoly<S>> out;
  for (std::size_t r = 0; r < lhs.rows(); ++r) {
    HoloPoly<S> eq(ambient_dim);
    for (std::size_t c = 0; c < lhs.cols(); ++c)
      if (lhs_slots[c] >= 0 && !is_zero(lhs(r, c))) eq += embedding[lhs_slots[c]] * lhs(r, c);
    if (rhs_slots[r] >= 0) eq -= embedding[rhs_slots[r]];
    out.push_back(std::move(eq));
  }
  return out;
}

template <class S>
Matrix<S> VarietySystem<S>::projective_equations() const {
  Matrix<S> p(lhs.rows(), embedding.size());
  for (std::size_t r = 0; r < lhs.rows(); ++r) {
    for (std::size_t c = 0; c < lhs.cols(); ++c)
      if (lhs_slots[c] >= 0) p(r, lhs_slots[c]) += lhs(r, c);
    if (rhs_slots[r] >= 0) p(r, rhs_slots[r]) -= S(1);
  }
  return p;
}

template <class S>
Matrix<S> VarietySystem<S>::jacobian_at_origin() const {
  std::vector<HoloPoly<S>> eqs = equations();
  Matrix<S> out(eqs.size(), ambient_dim);
  for (std::size_t r = 0; r < eqs.size(); ++r)
    for (int c = 0; c < ambient_dim; ++c) out(r, c) = eqs[r].coefficient(unit_exponent(ambient_dim, c));
  return out;
}

template <class S>
VarietySystem<S> build_W(const Matrix<S>& u_prime, const SignedSOS<S>& sos, const MatchTolerances& tol) {
  if (!sos.is_rank2_shape()) throw PreconditionError("expansion is not of rank-2 shape (coordinates + quadrics)");
  const int N = sos.num_vars;
  const int rows = static_cast<int>(u_prime.rows());
  if (static_cast<int>(u_prime.cols()) != N) throw PreconditionError("U' must have N columns");
  const int n = N - rows;
  if (n < 1) throw PreconditionError("U' must have fewer than N rows");
  if (n > 2 * N - sos.n_prime()) throw PreconditionError("row count leaves n > 2N - N'");
  if (!has_orthonormal_rows(u_prime, tol.orthonormality)) throw PreconditionError("U' rows are not orthonormal");
  VarietySystem<S> v;
  v.kind = VarietyKind::W;
  v.ambient_dim = N;
  v.lhs = u_prime;
  v.embedding = sos.embedding_components();
  for (int c = 0; c < N; ++c) v.lhs_slots.push_back(1 + c);
  for (int r = 0; r < rows; ++r) v.rhs_slots.push_back(r < sos.m2() ? 1 + N + r : -1);
  return v;
}

template <class S>
double membership_residual(const JetMap<S>& f, const VarietySystem<S>& v) {
  if (f.target_dim() != v.ambient_dim) throw PreconditionError("jet and variety live in different dimensions");
  const std::vector<HoloPoly<S>> pulled = substitute(v.embedding, f, f.degree());
  double best = 0.0;
  for (std::size_t r = 0; r < v.lhs.rows(); ++r) {
    HoloPoly<S> eq(f.source_dim());
    for (std::size_t c = 0; c < v.lhs.cols(); ++c)
      if (v.lhs_slots[c] >= 0 && !is_zero(v.lhs(r, c))) eq += pulled[v.lhs_slots[c]] * v.lhs(r, c);
    if (v.rhs_slots[r] >= 0) eq -= pulled[v.rhs_slots[r]];
    best = std::max(best, eq.max_abs_coefficient());
  }
  return best;
}

template <class S>
ComponentSolution<S> solve_component(const Matrix<S>& u_dd, const DomainSpec& spec, int d) {
  if (u_dd.rows() >= u_dd.cols()) throw PreconditionError("U'' must have fewer than N rows");
  return solve_completed_component(complete_to_unitary(u_dd), static_cast<int>(u_dd.cols() - u_dd.rows()), spec, d);
}

template <class S>
ComponentSolution<S> solve_completed_component(const Matrix<S>& completion, int n, const DomainSpec& spec, int d) {
  SignedSOS<S> sos = sos_for<S>(spec);
  require_rank2_machinery(spec, sos);
  const int N = spec.N;
  const int n_prime = sos.n_prime();
  if (static_cast<int>(completion.rows()) != N || static_cast<int>(completion.cols()) != N)
    throw PreconditionError("completion must be N x N");
  if (n < 1 || n >= N) throw PreconditionError("U'' must have fewer than N rows");
  if (n > 2 * N - n_prime) throw PreconditionError("ball dimension exceeds 2N - N'");
  if (d < 2) throw PreconditionError("truncation degree must be at least 2");
  if (!has_orthonormal_rows(completion, MatchTolerances{}.orthonormality))
    throw PreconditionError("completion is not unitary");

  ComponentSolution<S> out;
  out.completion = completion;
  const Matrix<S> back = out.completion.adjoint();
  std::vector<HoloPoly<S>> rhs;
  for (int mu = 0; mu < n; ++mu) rhs.push_back(HoloPoly<S>::variable(n, mu));
  for (auto& z : zeros<S>(n, N - n)) rhs.push_back(std::move(z));
  std::vector<HoloPoly<S>> z = apply_matrix(back, rhs);

  // Each sweep fixes one more degree, so d sweeps reach the fixed point and
  // one more confirms it.
  const int cap = d + 2;
  bool stable = false;
  for (int sweep = 1; sweep <= cap && !stable; ++sweep) {
    std::vector<HoloPoly<S>> g = substitute(sos.g2, JetMap<S>(n, d, z), d);
    for (int l = 0; l < static_cast<int>(g.size()); ++l) rhs[n + l] = g[l];
    std::vector<HoloPoly<S>> next = apply_matrix(back, rhs);
    for (auto& p : next) p = p.truncated(d);
    if constexpr (is_exact_v<S>) {
      stable = next == z;
    } else {
      double scale = 1.0;
      for (const auto& p : next) scale = std::max(scale, p.max_abs_coefficient());
      stable = max_coefficient_difference(next, z) <= 1e-13 * scale;
    }
    z = std::move(next);
    out.sweeps = sweep;
  }
  if (!stable) throw VerificationFailure("fixed-point iteration did not stabilize");

  out.jet = make_isometry_jet(spec, 1, JetMap<S>(n, d, z));
  const ResidualReport report = check_functional_eq(out.jet);
  if (!report.pass)
    throw VerificationFailure("constructed jet fails the functional equation (residual " +
                              std::to_string(report.max_residual) + ")");
  return out;
}

template <class S>
K2Variety<S> build_k2_variety(const IsometryJet<S>& j, const MatchTolerances& tol) {
  if (j.k != 2) throw PreconditionError("k = 2 variety needs isometric constant 2");
  if (!check_functional_eq(j, tol.coefficient).pass) throw VerificationFailure("functional equation fails");
  const SignedSOS<S>& sos = j.sos;
  const int n = j.n();
  const int N = sos.num_vars;
  const int m1 = sos.m1(), m2 = sos.m2();
  const int d = j.degree();

  K2Variety<S> out;
  out.m0 = n * (n + 1) / 2;
  out.big_n0 = std::max(n + m2, out.m0 + m1);
  const int n0 = out.big_n0;

  const S root2 = sqrt2_value<S>();
  std::vector<HoloPoly<S>> left, right;
  for (int mu = 0; mu < n; ++mu) left.push_back(HoloPoly<S>::variable(n, mu, root2));
  for (auto& g : substitute(sos.g2, j.f, d)) left.push_back(std::move(g));
  for (auto& z : zeros<S>(n, n0 - n - m2)) left.push_back(std::move(z));
  for (int mu = 0; mu < n; ++mu)
    for (int nu = mu; nu < n; ++nu) {
      Exponent e(n, 0);
      ++e[mu];
      ++e[nu];
      right.push_back(HoloPoly<S>::monomial(e, mu == nu ? S(1) : root2));
    }
  for (auto& g : substitute(sos.g1, j.f, d)) right.push_back(std::move(g));
  for (auto& z : zeros<S>(n, n0 - out.m0 - m1)) right.push_back(std::move(z));
  out.unitary = match_unitary(right, left, tol);

  const Matrix<S> jac = j.f.jacobian_at_origin();
  Matrix<S> half_jj = jac * jac.adjoint();
  half_jj *= from_rational<S>(1, 2);
  Matrix<S> u_hat(n0 - out.m0, N);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) u_hat(r, c) = half_jj(r, c);
  const Matrix<S> u22 = out.unitary.block(out.m0, n, n0 - out.m0, n0 - n);

  VarietySystem<S>& v = out.system;
  v.kind = VarietyKind::V;
  v.ambient_dim = N;
  v.lhs = hstack(u_hat, u22);
  v.embedding = sos.embedding_components();
  for (int c = 0; c < N; ++c) v.lhs_slots.push_back(1 + c);
  for (int c = 0; c < n0 - n; ++c) v.lhs_slots.push_back(c < m2 ? 1 + m1 + c : -1);
  for (int r = 0; r < n0 - out.m0; ++r) v.rhs_slots.push_back(r < m1 ? 1 + r : -1);

  const Matrix<S> defect = half_jj - Matrix<S>::identity(N);
  if constexpr (is_exact_v<S>) {
    out.defect_rank = rank(defect);
  } else {
    out.defect_rank = rank(defect, 1e-8);
  }
  out.rank_identity = static_cast<int>(out.defect_rank) == N - n;
  return out;
}

template <class S>
Extension<S> extend_isometry(const IsometryJet<S>& j, double tol) {
  if (j.k != 1) throw PreconditionError("extension needs isometric constant 1");
  require_rank2_machinery(j.target, j.sos);
  const int N = j.target.N;
  const int n_prime = j.sos.n_prime();
  const int n0 = 2 * N - n_prime;
  if (j.n() < 1 || j.n() > n0 - 1) throw PreconditionError("extension needs 1 <= n <= 2N - N' - 1");

  // The rest of the recovered unitary already completes U'_1, so no fresh
  // completion is needed: [A'; U'_2] goes on top and U'_1 at the bottom.
  const MatchingSplit<S> split = recover_matching_U(j);
  const int rows1 = n_prime - N;
  const Matrix<S> u1 = split.u_prime.row_block(0, rows1);
  const Matrix<S> u2 = split.u_prime.row_block(rows1, split.u_prime.rows() - rows1);
  ComponentSolution<S> sol = solve_completed_component(vstack(vstack(split.a_prime, u2), u1), n0, j.target, j.degree());

  Extension<S> out;
  out.outer = std::move(sol.jet);
  const Matrix<S> a1 = sol.completion.row_block(0, n0);
  out.slice = a1 * j.f.jacobian_at_origin();
  out.slice_defect = max_abs(out.slice.adjoint() * out.slice - Matrix<S>::identity(j.n()));
  const JetMap<S> composed = compose_truncate(out.outer.f, JetMap<S>::linear(out.slice, j.degree()), j.degree());
  out.composition_residual = max_coefficient_difference(composed.components(), j.f.components());
  const bool ok = is_exact_v<S> ? composed.components() == j.f.components() : out.composition_residual <= tol;
  if (!ok)
    throw VerificationFailure("factorization through the extension failed (residual " +
                              std::to_string(out.composition_residual) + ")");
  return out;
}

template <class S>
Factorization<S> factor_through(const IsometryJet<S>& outer, const IsometryJet<S>& f, double tol) {
  if (outer.target.N != f.target.N) throw PreconditionError("maps have different targets");
  const Matrix<S> jf = outer.f.jacobian_at_origin();
  const Matrix<S> gram = jf.adjoint() * jf;
  Factorization<S> out;
  try {
    out.slice = inverse(gram) * (jf.adjoint() * f.f.jacobian_at_origin());
  } catch (const std::domain_error&) {
    throw PreconditionError("outer map has a degenerate Jacobian");
  }
  out.slice_defect = max_abs(out.slice.adjoint() * out.slice - Matrix<S>::identity(f.n()));
  const int d = std::min(outer.degree(), f.degree());
  const JetMap<S> composed = compose_truncate(outer.f, JetMap<S>::linear(out.slice, d), d);
  out.composition_residual = max_coefficient_difference(composed.components(), f.f.truncated(d).components());
  out.factorizes = is_exact_v<S> ? out.composition_residual == 0.0 : out.composition_residual <= tol;
  return out;
}

#define HISOM_INSTANTIATE(S)                                                                          \
  template IsometryJet<S> make_isometry_jet(const DomainSpec&, int, JetMap<S>);                       \
  template BidegPoly<S> functional_eq_residual(const IsometryJet<S>&);                                \
  template ResidualReport check_functional_eq(const IsometryJet<S>&, double, std::uint64_t);          \
  template double check_polarized_eq(const IsometryJet<S>&, const std::vector<SamplePair>&);          \
  template double jacobian_defect(const IsometryJet<S>&);                                             \
  template MatchingSplit<S> recover_matching_U(const IsometryJet<S>&, const MatchTolerances&);        \
  template struct VarietySystem<S>;                                                                   \
  template VarietySystem<S> build_W(const Matrix<S>&, const SignedSOS<S>&, const MatchTolerances&);   \
  template double membership_residual(const JetMap<S>&, const VarietySystem<S>&);                     \
  template ComponentSolution<S> solve_component(const Matrix<S>&, const DomainSpec&, int);            \
  template ComponentSolution<S> solve_completed_component(const Matrix<S>&, int, const DomainSpec&, int); \
  template K2Variety<S> build_k2_variety(const IsometryJet<S>&, const MatchTolerances&);              \
  template Extension<S> extend_isometry(const IsometryJet<S>&, double);                               \
  template Factorization<S> factor_through(const IsometryJet<S>&, const IsometryJet<S>&, double);

HISOM_INSTANTIATE(Exact)
HISOM_INSTANTIATE(Complex)

}  // namespace hisom
