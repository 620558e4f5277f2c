#include <doctest.h>

#include <algorithm>

#include "hisom/errors.hpp"
#include "hisom/isometry.hpp"
#include "hisom/random.hpp"
#include "test_support.hpp"

using namespace hisom;
using namespace hisom::testing;

namespace {

Matrix<Exact> row_vector(std::vector<Exact> entries) {
  Matrix<Exact> m(1, entries.size());
  for (std::size_t j = 0; j < entries.size(); ++j) m(0, j) = entries[j];
  return m;
}

Matrix<Exact> null_row4() {
  const Exact r = Exact::sqrt2().inverse();
  return row_vector({r, Exact::imag_unit() * r, Exact(0), Exact(0)});
}

double max_sine(const Matrix<Exact>& a, const Matrix<Exact>& b) {
  const auto s = principal_angle_sines(to_complex(a), to_complex(b));
  return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
}

IsometryJet<Complex> to_float_jet(const IsometryJet<Exact>& j) {
  std::vector<HoloPoly<Complex>> comps;
  for (const auto& c : j.f.components()) comps.push_back(to_floating(c));
  return make_isometry_jet(j.target, j.k, JetMap<Complex>(j.n(), j.degree(), comps));
}

IsometryJet<Complex> perturbed(const IsometryJet<Exact>& j, double eps) {
  auto comps = to_float_jet(j).f.components();
  comps[0].add_term(unit_exponent(j.n(), 0), Complex(eps, 0.0));
  return make_isometry_jet(j.target, j.k, JetMap<Complex>(j.n(), j.degree(), comps));
}

}  // namespace

TEST_CASE("canonical isometries satisfy the functional equation exactly") {
  std::vector<IsometryJet<Exact>> jets{bidisk_diagonal(6)};
  for (int m = 3; m <= 6; ++m) {
    jets.push_back(iv_null_disk(m, 6));
    jets.push_back(iv_sqrt2_disk(m, 6));
  }
  for (int q = 2; q <= 5; ++q) jets.push_back(type_i_diagonal(q, 6));
  for (const auto& j : jets) {
    INFO(j.target.name() << " k=" << j.k);
    const ResidualReport r = check_functional_eq(j);
    CHECK(r.pass);
    CHECK(r.exact_zero);
    CHECK(r.max_residual == 0.0);
    CHECK(r.per_bidegree.empty());
    CHECK(r.pointwise_max < 1e-12);
    CHECK(jacobian_defect(j) == 0.0);
    CHECK(check_polarized_eq(j, default_sample_pairs(j.n(), 20, 3)) < 1e-10);
    const auto jf = to_float_jet(j);
    CHECK(check_functional_eq(jf).pass);
    CHECK(check_polarized_eq(jf, default_sample_pairs(j.n(), 20, 3)) < 1e-10);
  }
}

TEST_CASE("perturbed jets fail verification") {
  for (const auto& j : {iv_null_disk(4, 6), iv_sqrt2_disk(3, 6), type_i_diagonal(3, 6), bidisk_diagonal(6)}) {
    const auto bad = perturbed(j, 1e-3);
    const ResidualReport r = check_functional_eq(bad);
    CHECK_FALSE(r.pass);
    CHECK(r.max_residual >= 1e-4);
    CHECK_FALSE(r.per_bidegree.empty());
    CHECK(check_polarized_eq(bad, default_sample_pairs(1, 20, 3)) > 1e-6);
  }
  auto comps = iv_null_disk(3, 6).f.components();
  comps[2].add_term({3}, Exact::rational(1, 1000));
  const auto bad = make_isometry_jet(make_spec(Family::IV, {3}), 1, JetMap<Exact>(1, 6, comps));
  const ResidualReport r = check_functional_eq(bad);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.exact_zero);
}

TEST_CASE("jet preconditions") {
  CHECK_THROWS_AS(check_functional_eq(iv_sqrt2_disk(3, 3)), PreconditionError);
  CHECK_THROWS_AS(make_isometry_jet(make_spec(Family::IV, {3}), 3, iv_null_disk(3, 4).f), PreconditionError);
  CHECK_THROWS_AS(make_isometry_jet(make_spec(Family::IV, {4}), 1, iv_null_disk(3, 4).f), PreconditionError);
  std::vector<HoloPoly<Exact>> comps{HoloPoly<Exact>::constant(1, Exact(1)), var(1, 0), HoloPoly<Exact>(1)};
  CHECK_THROWS_AS(make_isometry_jet(make_spec(Family::IV, {3}), 1, JetMap<Exact>(1, 4, comps)), PreconditionError);
}

TEST_CASE("dimension gate rejects jets beyond the bound") {
  const DomainSpec d2 = make_spec(Family::Polydisk, {2});
  CHECK(dim_upper_bound(d2, 2).bound == 1);
  // Jacobian is sqrt2 times an isometry, yet the map cannot be isometric.
  const auto f = JetMap<Exact>(2, 4, {var(2, 0) + var(2, 1), var(2, 0) - var(2, 1)});
  const auto j = make_isometry_jet(d2, 2, f);
  CHECK(jacobian_defect(j) == 0.0);
  CHECK_FALSE(check_functional_eq(j).pass);

  const DomainSpec iv = make_spec(Family::IV, {4});
  CHECK(dim_upper_bound(iv, 2).bound == 1);
  const auto g = JetMap<Exact>(2, 4, {var(2, 0) * Exact::sqrt2(), var(2, 1) * Exact::sqrt2(), HoloPoly<Exact>(2),
                                      HoloPoly<Exact>(2)});
  CHECK_FALSE(check_functional_eq(make_isometry_jet(iv, 2, g)).pass);
}

TEST_CASE("recovering the matching unitary of the null disk") {
  const auto j = iv_null_disk(4, 6);
  const auto split = recover_matching_U(j);
  CHECK(split.a_prime.rows() == 1);
  CHECK(split.u_prime.rows() == 3);
  CHECK(split.unitary * split.unitary.adjoint() == Matrix<Exact>::identity(4));
  for (const auto& c : apply_matrix(split.u_prime, j.f.components())) CHECK(c.is_zero());
  // The recovered rows contain (1, i, 0, 0)/sqrt2 in their span.
  const auto v = null_row4();
  const auto coeffs = v * split.u_prime.adjoint();
  CHECK(v - coeffs * split.u_prime == Matrix<Exact>(1, 4));
  const auto w = build_W(split.u_prime, j.sos);
  CHECK(membership_residual(j, w) == 0.0);
  CHECK(w.jacobian_at_origin() == split.u_prime);
}

TEST_CASE("recovering a linear slice gives a permutation-like unitary") {
  std::vector<HoloPoly<Exact>> comps(6, HoloPoly<Exact>(1));
  comps[0] = var(1, 0);
  const auto j = make_isometry_jet(make_spec(Family::I, {2, 3}), 1, JetMap<Exact>(1, 6, comps));
  REQUIRE(check_functional_eq(j).pass);
  const auto split = recover_matching_U(j);
  CHECK(apply_matrix(split.a_prime, j.f.components())[0] == var(1, 0));
  for (std::size_t i = 0; i < 6; ++i) {
    int nonzero = 0;
    for (std::size_t k = 0; k < 6; ++k) nonzero += split.unitary(i, k).is_zero() ? 0 : 1;
    CHECK(nonzero >= 1);
  }
}

TEST_CASE("recovery preconditions") {
  CHECK_THROWS_AS(recover_matching_U(iv_sqrt2_disk(4, 6)), PreconditionError);
  CHECK_THROWS_AS(recover_matching_U(bidisk_diagonal(6)), PreconditionError);
  auto comps = iv_null_disk(4, 6).f.components();
  comps[2].add_term({2}, Exact(1));
  const auto bad = make_isometry_jet(make_spec(Family::IV, {4}), 1, JetMap<Exact>(1, 6, comps));
  CHECK_THROWS_AS(recover_matching_U(bad), VerificationFailure);
}

TEST_CASE("variety for type IV of dimension 3") {
  const auto sos = sos_type_iv<Exact>(3);
  const auto w = build_W(row_vector({Exact(1), Exact(0), Exact(0)}), sos);
  const auto eqs = w.equations();
  REQUIRE(eqs.size() == 1);
  const Exact half = Exact::rational(1, 2);
  const HoloPoly<Exact> expected = var(3, 0) - half * (var(3, 0) * var(3, 0) + var(3, 1) * var(3, 1) + var(3, 2) * var(3, 2));
  CHECK((eqs[0] == expected || eqs[0] == -expected));
  CHECK(w.pad_out() == 0);
  const auto p = w.projective_equations();
  CHECK(p.rows() == 1);
  CHECK(p.cols() == 5);
}

TEST_CASE("variety preconditions") {
  const auto sos = sos_type_iv<Exact>(4);
  Matrix<Exact> bad(1, 4);
  bad(0, 0) = Exact(1);
  bad(0, 1) = Exact(1);
  CHECK_THROWS_AS(build_W(bad, sos), PreconditionError);
  CHECK_THROWS_AS(build_W(Matrix<Exact>(0, 4), sos), PreconditionError);
  CHECK_THROWS_AS(build_W(Matrix<Exact>::identity(4), sos), PreconditionError);
  CHECK_THROWS_AS(build_W(row_vector({Exact(1), Exact(0), Exact(0), Exact(0)}), sos_type_i<Exact>(3, 3)), PreconditionError);
}

TEST_CASE("component through the origin for type IV of dimension 3") {
  const DomainSpec spec = make_spec(Family::IV, {3});
  const auto u = row_vector({Exact(1), Exact(0), Exact(0)});
  const auto sol = solve_component(u, spec, 6);
  const auto& f = sol.jet.f;
  CHECK(sol.jet.n() == 2);
  CHECK(check_functional_eq(sol.jet).exact_zero);
  CHECK(membership_residual(sol.jet, build_W(u, sol.jet.sos)) == 0.0);
  CHECK(sol.completion.row_block(2, 1) == u);
  // z1 = 1 - sqrt(1 - q) with q = z2^2 + z3^2.
  const HoloPoly<Exact> q = f[1] * f[1] + f[2] * f[2];
  const HoloPoly<Exact> q2 = multiply_truncated(q, q, 6);
  const HoloPoly<Exact> q3 = multiply_truncated(q2, q, 6);
  const HoloPoly<Exact> series = Exact::rational(1, 2) * q + Exact::rational(1, 8) * q2 + Exact::rational(1, 16) * q3;
  CHECK(f[0] == series.truncated(6));
  CHECK(f[1].homogeneous_degree() == 1);
  CHECK(f[2].homogeneous_degree() == 1);
}

TEST_CASE("component through the origin for a null row in type IV of dimension 4") {
  const DomainSpec spec = make_spec(Family::IV, {4});
  const auto sol = solve_component(null_row4(), spec, 6);
  CHECK(sol.jet.n() == 3);
  CHECK(check_functional_eq(sol.jet).exact_zero);
  const auto w = build_W(null_row4(), sol.jet.sos);
  CHECK(membership_residual(sol.jet, w) == 0.0);
  CHECK(membership_residual(iv_null_disk(4, 6), w) == 0.0);
}

TEST_CASE("component that is a linear subspace") {
  const DomainSpec spec = make_spec(Family::IV, {4});
  const Exact r = Exact::sqrt2().inverse();
  Matrix<Exact> u(2, 4);
  u(0, 0) = r;
  u(0, 1) = Exact::imag_unit() * r;
  u(1, 2) = r;
  u(1, 3) = Exact::imag_unit() * r;
  const auto sol = solve_component(u, spec, 6);
  CHECK(check_functional_eq(sol.jet).exact_zero);
  for (const auto& c : sol.jet.f.components()) CHECK(c.degree() <= 1);
  CHECK(sol.sweeps <= 2);
}

TEST_CASE("components from random co-isometries round trip") {
  Rng rng(101);
  struct Case {
    DomainSpec spec;
    int n;
  };
  std::vector<Case> cases{{make_spec(Family::IV, {3}), 1}, {make_spec(Family::IV, {3}), 2},
                          {make_spec(Family::IV, {4}), 2}, {make_spec(Family::IV, {5}), 4},
                          {make_spec(Family::I, {2, 3}), 3}, {make_spec(Family::I, {2, 4}), 2}};
  for (const auto& c : cases) {
    INFO(c.spec.name() << " n=" << c.n);
    const auto u = random_coisometry<Exact>(c.spec.N - c.n, c.spec.N, rng);
    const auto jet = solve_component_jet(u, c.spec, 6);
    CHECK(jet.n() == c.n);
    CHECK(check_functional_eq(jet).exact_zero);
    CHECK(jacobian_defect(jet) == 0.0);
    const auto split = recover_matching_U(jet);
    CHECK(max_sine(u, split.u_prime) < 1e-8);
    CHECK(membership_residual(jet, build_W(split.u_prime, jet.sos)) == 0.0);
  }
}

TEST_CASE("float components pass within tolerance") {
  Rng rng(55);
  const DomainSpec spec = make_spec(Family::IV, {5});
  const auto u = random_coisometry<Complex>(3, 5, rng);
  const auto jet = solve_component_jet(u, spec, 6);
  const auto r = check_functional_eq(jet);
  CHECK(r.pass);
  CHECK(r.max_residual < 1e-9);
  CHECK(jacobian_defect(jet) < 1e-10);
}

TEST_CASE("component preconditions") {
  const DomainSpec iv4 = make_spec(Family::IV, {4});
  CHECK_THROWS_AS(solve_component(null_row4(), iv4, 1), PreconditionError);
  CHECK_THROWS_AS(solve_component(Matrix<Exact>::identity(4).row_block(0, 0), iv4, 6), PreconditionError);
  Matrix<Exact> bad(1, 4);
  bad(0, 0) = Exact(2);
  CHECK_THROWS_AS(solve_component(bad, iv4, 6), PreconditionError);
  CHECK_THROWS_AS(solve_component(Matrix<Exact>::identity(9).row_block(0, 3), make_spec(Family::I, {3, 3}), 6),
                  PreconditionError);
  CHECK_THROWS_AS(solve_component(Matrix<Exact>::identity(10).row_block(0, 6), make_spec(Family::I, {2, 5}), 6),
                  PreconditionError);
}

TEST_CASE("k = 2 varieties of the canonical isometries") {
  for (const auto& j : {bidisk_diagonal(6), iv_sqrt2_disk(3, 6), iv_sqrt2_disk(5, 6), type_i_diagonal(3, 6),
                        type_i_diagonal(4, 6)}) {
    INFO(j.target.name());
    const auto v = build_k2_variety(j);
    CHECK(v.m0 == 1);
    CHECK(v.rank_identity);
    CHECK(v.defect_rank == static_cast<std::size_t>(j.target.N - j.n()));
    CHECK(membership_residual(j, v.system) == 0.0);
    CHECK(v.system.kind == VarietyKind::V);
    CHECK(v.unitary * v.unitary.adjoint() == Matrix<Exact>::identity(v.unitary.rows()));
  }
  CHECK(build_k2_variety(iv_sqrt2_disk(6, 6)).defect_rank == 5);
  CHECK_THROWS_AS(build_k2_variety(iv_null_disk(4, 6)), PreconditionError);
}

TEST_CASE("extending the null disk") {
  const auto j = iv_null_disk(4, 6);
  const auto ext = extend_isometry(j);
  CHECK(ext.outer.n() == 3);
  CHECK(check_functional_eq(ext.outer).exact_zero);
  CHECK(ext.composition_residual == 0.0);
  CHECK(ext.slice_defect == 0.0);
  CHECK(compose_truncate(ext.outer.f, JetMap<Exact>::linear(ext.slice, 6), 6) == j.f);
}

TEST_CASE("extending a linear disk in I(2,3)") {
  std::vector<HoloPoly<Exact>> comps(6, HoloPoly<Exact>(1));
  comps[4] = var(1, 0);
  const auto j = make_isometry_jet(make_spec(Family::I, {2, 3}), 1, JetMap<Exact>(1, 6, comps));
  const auto ext = extend_isometry(j);
  CHECK(ext.outer.n() == 3);
  CHECK(ext.composition_residual == 0.0);
  CHECK(ext.slice_defect == 0.0);
}

TEST_CASE("extending random slices of maximal components") {
  Rng rng(303);
  struct Case {
    DomainSpec spec;
    int n;
  };
  for (const Case& c : {Case{make_spec(Family::IV, {3}), 1}, Case{make_spec(Family::IV, {4}), 2},
                        Case{make_spec(Family::IV, {5}), 3}, Case{make_spec(Family::I, {2, 3}), 2}}) {
    INFO(c.spec.name() << " n=" << c.n);
    const int n0 = static_cast<int>(*c.spec.n0());
    const auto outer = solve_component_jet(random_coisometry<Exact>(c.spec.N - n0, c.spec.N, rng), c.spec, 6);
    const auto f = random_slice(outer, c.n, rng);
    REQUIRE(check_functional_eq(f).exact_zero);
    const auto ext = extend_isometry(f);
    CHECK(ext.outer.n() == n0);
    CHECK(ext.composition_residual == 0.0);
    CHECK(ext.slice_defect == 0.0);
    const auto fac = factor_through(outer, f);
    CHECK(fac.factorizes);
    CHECK(fac.composition_residual == 0.0);
  }
}

TEST_CASE("extension preconditions") {
  Rng rng(4);
  const DomainSpec iv4 = make_spec(Family::IV, {4});
  const auto top = solve_component_jet(random_coisometry<Exact>(1, 4, rng), iv4, 6);
  CHECK_THROWS_AS(extend_isometry(top), PreconditionError);
  CHECK_THROWS_AS(extend_isometry(iv_sqrt2_disk(4, 6)), PreconditionError);
  CHECK_THROWS_AS(extend_isometry(perturbed(iv_null_disk(4, 6), 1e-3)), VerificationFailure);
}

TEST_CASE("factoring through an unrelated outer map fails") {
  Rng rng(12);
  const DomainSpec iv4 = make_spec(Family::IV, {4});
  const auto outer = solve_component_jet(random_coisometry<Exact>(1, 4, rng), iv4, 6);
  const auto other = solve_component_jet(random_coisometry<Exact>(1, 4, rng), iv4, 6);
  const auto f = random_slice(other, 1, rng);
  const auto fac = factor_through(outer, f);
  CHECK_FALSE(fac.factorizes);
}
