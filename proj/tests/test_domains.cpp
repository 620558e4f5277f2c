#include <doctest.h>

#include <cmath>

#include "hisom/domains.hpp"
#include "hisom/errors.hpp"

using namespace hisom;

namespace {

// Null dimensions written out independently of the catalog.
std::vector<int> null_dims_oracle(Family f, int a, int b = 0) {
  std::vector<int> out;
  switch (f) {
    case Family::I:
      for (int k = 1; k <= a; ++k) out.push_back((a - k) * (b - k));
      break;
    case Family::II:
      for (int k = 1; k <= a / 2; ++k) out.push_back(std::max(0, (a - 2 * k) * (a - 2 * k - 1) / 2));
      break;
    case Family::III:
      for (int k = 1; k <= a; ++k) out.push_back((a - k) * (a - k + 1) / 2);
      break;
    default:
      break;
  }
  return out;
}

int brute_lambda0(const std::vector<int>& nk, int p) {
  for (std::size_t k = 0; k < nk.size(); ++k)
    if (nk[k] <= p) return static_cast<int>(k) + 1;
  return -1;
}

int ceil_oracle(long a, long b, long c) {
  const long double v = (static_cast<long double>(a) - std::sqrt(static_cast<long double>(b))) / c;
  return static_cast<int>(std::ceil(v - 1e-12L));
}

// Membership in the explicit list of rank >= 2 domains with n <= p, closed
// under the low-dimensional coincidences I(2,2) = IV(4), II(4) = IV(6),
// III(2) = IV(3).
bool in_null_leq_p_list(Family f, const std::vector<int>& params) {
  switch (f) {
    case Family::I: {
      const int p = params[0], q = params[1];
      return (p == 2 && q > 2) || (p == 3 && q == 3) || (p == 2 && q == 2);
    }
    case Family::II:
      return (params[0] >= 5 && params[0] <= 7) || params[0] == 4;
    case Family::III:
      return params[0] == 2;
    case Family::IV:
    case Family::V:
    case Family::VI:
      return true;
    default:
      return false;
  }
}

std::vector<DomainSpec> rank_ge2_catalog(int max_param) {
  std::vector<DomainSpec> out;
  for (int p = 2; p <= max_param; ++p)
    for (int q = p; q <= max_param; ++q) out.push_back(make_spec(Family::I, {p, q}));
  for (int m = 4; m <= max_param; ++m) out.push_back(make_spec(Family::II, {m}));
  for (int m = 2; m <= max_param; ++m) out.push_back(make_spec(Family::III, {m}));
  for (int n = 3; n <= max_param; ++n) out.push_back(make_spec(Family::IV, {n}));
  out.push_back(make_spec(Family::V));
  out.push_back(make_spec(Family::VI));
  return out;
}

}  // namespace

TEST_CASE("type III of size 7 has lambda0 = 4") {
  const DomainSpec s = make_spec(Family::III, {7});
  CHECK(s.rank == 7);
  CHECK(s.p_inv == 6);
  for (int k = 1; k <= 7; ++k) CHECK(s.null_dim(k) == (7 - k) * (8 - k) / 2);
  CHECK(lambda0(s) == 4);
  CHECK(lambda0_checked(s) == 4);
}

TEST_CASE("exceptional and small classical invariants") {
  const DomainSpec v = make_spec(Family::V);
  CHECK(v.N == 16);
  CHECK(*v.n_prime == 26);
  CHECK(v.null_dim(1) == 5);
  CHECK(v.p_inv == 10);
  CHECK(*v.n0() == 6);

  const DomainSpec ii5 = make_spec(Family::II, {5});
  CHECK(ii5.N == 10);
  CHECK(*ii5.n_prime == 15);
  CHECK(2 * ii5.N > *ii5.n_prime + 1);
  CHECK(*ii5.n0() == 5);

  const DomainSpec i23 = make_spec(Family::I, {2, 3});
  CHECK(i23.N == 6);
  CHECK(*i23.n_prime == 9);
  CHECK(*i23.n0() == 3);
  CHECK(*make_spec(Family::I, {2, 4}).n0() == 2);
  for (int m = 3; m <= 12; ++m) CHECK(*make_spec(Family::IV, {m}).n0() == m - 1);
}

TEST_CASE("catalog structure holds for every spec up to 60") {
  std::vector<DomainSpec> all = rank_ge2_catalog(60);
  for (int p = 1; p <= 20; ++p) all.push_back(make_spec(Family::Polydisk, {p}));
  for (int q = 1; q <= 10; ++q) all.push_back(make_spec(Family::I, {1, q}));
  for (const auto& s : all) {
    INFO(s.name());
    CHECK(s.N == s.p_inv + s.null_dim(1) + 1);
    for (int k = 1; k < s.rank; ++k) CHECK(s.null_dim(k) >= s.null_dim(k + 1));
    CHECK(s.null_dim(s.rank) == 0);
  }
}

TEST_CASE("null dimensions match the classical formulas") {
  for (int p = 1; p <= 12; ++p)
    for (int q = p; q <= 12; ++q) CHECK(make_spec(Family::I, {p, q}).null_dims == null_dims_oracle(Family::I, p, q));
  for (int m = 2; m <= 20; ++m) CHECK(make_spec(Family::II, {m}).null_dims == null_dims_oracle(Family::II, m));
  for (int m = 1; m <= 20; ++m) CHECK(make_spec(Family::III, {m}).null_dims == null_dims_oracle(Family::III, m));
}

TEST_CASE("coincident domains share N, rank, p and N'") {
  auto same = [](const DomainSpec& a, const DomainSpec& b) {
    INFO(a.name() << " vs " << b.name());
    CHECK(a.N == b.N);
    CHECK(a.rank == b.rank);
    CHECK(a.p_inv == b.p_inv);
    CHECK(a.null_dims == b.null_dims);
    CHECK(*a.n_prime == *b.n_prime);
  };
  same(make_spec(Family::I, {2, 2}), make_spec(Family::IV, {4}));
  same(make_spec(Family::II, {4}), make_spec(Family::IV, {6}));
  same(make_spec(Family::III, {2}), make_spec(Family::IV, {3}));
  same(make_spec(Family::II, {3}), make_spec(Family::I, {1, 3}));
  same(make_spec(Family::III, {1}), make_spec(Family::I, {1, 1}));
}

TEST_CASE("lambda0 search and closed form agree on the full grid") {
  for (int p = 3; p <= 60; ++p)
    for (int q = p; q <= 60; ++q) {
      if (p == 3 && q == 3) continue;
      const DomainSpec s = make_spec(Family::I, {p, q});
      const int brute = brute_lambda0(null_dims_oracle(Family::I, p, q), p + q - 2);
      REQUIRE(lambda0(s) == brute);
      REQUIRE(*lambda0_closed_form(s) == brute);
      REQUIRE(ceil_oracle(p + q, static_cast<long>(q - p) * (q - p) + 4L * (p + q - 2), 2) == brute);
    }
  for (int m = 8; m <= 60; ++m) {
    const DomainSpec s = make_spec(Family::II, {m});
    const int brute = brute_lambda0(null_dims_oracle(Family::II, m), 2 * (m - 2));
    REQUIRE(lambda0(s) == brute);
    REQUIRE(*lambda0_closed_form(s) == brute);
    REQUIRE(ceil_oracle(2 * m - 1, 16L * m - 31, 4) == brute);
  }
  for (int m = 3; m <= 60; ++m) {
    const DomainSpec s = make_spec(Family::III, {m});
    const int brute = brute_lambda0(null_dims_oracle(Family::III, m), m - 1);
    REQUIRE(lambda0(s) == brute);
    REQUIRE(*lambda0_closed_form(s) == brute);
    REQUIRE(ceil_oracle(2 * m + 1, 8L * m - 7, 2) == brute);
  }
  CHECK(lambda0(make_spec(Family::I, {3, 4})) == 2);
  CHECK(*lambda0_closed_form(make_spec(Family::II, {8})) == 2);
  CHECK_FALSE(lambda0_closed_form(make_spec(Family::I, {3, 3})).has_value());
  CHECK_FALSE(lambda0_closed_form(make_spec(Family::IV, {5})).has_value());
}

TEST_CASE("rank-2 domains have lambda0 = 1") {
  for (const auto& s : rank_ge2_catalog(30))
    if (s.rank == 2) CHECK(lambda0(s) == 1);
}

TEST_CASE("gap between rank and lambda0 grows along type III") {
  int previous = -1;
  for (int m = 1; m <= 50; ++m) {
    const DomainSpec s = make_spec(Family::III, {m + 2});
    const int a = s.rank - (lambda0(s) + 1);
    CHECK(a >= previous);
    previous = a;
  }
  CHECK(static_cast<double>(previous) / 52.0 < 0.2);
}

TEST_CASE("n <= p classification matches the explicit list") {
  CHECK(classify_null_leq_p(make_spec(Family::II, {6})));
  CHECK_FALSE(classify_null_leq_p(make_spec(Family::III, {3})));
  CHECK(classify_null_leq_p(make_spec(Family::IV, {9})));
  for (const auto& s : rank_ge2_catalog(60)) {
    INFO(s.name());
    CHECK(classify_null_leq_p(s) == in_null_leq_p_list(s.family, s.params));
    CHECK(classify_null_leq_p(s) == (lambda0(s) == 1));
    if (classify_null_leq_p(s)) CHECK(s.rank <= 3);
  }
}

TEST_CASE("codimension inequality fails exactly on I(2,q) with q >= 5") {
  CHECK(rank2_codim_inequality(make_spec(Family::I, {2, 4})));
  CHECK_FALSE(rank2_codim_inequality(make_spec(Family::I, {2, 5})));
  for (const auto& s : rank_ge2_catalog(60)) {
    if (s.rank != 2) continue;
    INFO(s.name());
    const bool excluded = s.family == Family::I && s.params[0] == 2 && s.params[1] >= 5;
    CHECK(rank2_codim_inequality(s) == !excluded);
  }
  CHECK_THROWS_AS(rank2_codim_inequality(make_spec(Family::III, {3})), PreconditionError);
}

TEST_CASE("dimension bounds") {
  for (int p = 2; p <= 6; ++p)
    for (int q = p; q <= 8; ++q) CHECK(dim_upper_bound(make_spec(Family::I, {p, q}), p).bound == q - p + 1);
  for (int m = 2; m <= 6; ++m) CHECK(dim_upper_bound(make_spec(Family::II, {2 * m + 1}), m).bound == 3);
  for (const auto& s : rank_ge2_catalog(12)) CHECK(dim_upper_bound(s, 1).bound == s.p_inv + 1);
  CHECK(dim_upper_bound(make_spec(Family::IV, {5}), 2).certified_le_p);
  CHECK(dim_upper_bound(make_spec(Family::III, {7}), 5).certified_le_p);
  CHECK_FALSE(dim_upper_bound(make_spec(Family::III, {7}), 4).certified_le_p);
  CHECK_THROWS_AS(dim_upper_bound(make_spec(Family::IV, {5}), 3), PreconditionError);
  CHECK_THROWS_AS(dim_upper_bound(make_spec(Family::IV, {5}), 0), PreconditionError);
}

TEST_CASE("characteristic bundle dimensions") {
  for (const auto& s : rank_ge2_catalog(10)) {
    const auto top = char_bundle_dims(s, s.rank);
    CHECK(top.fiber_dim == s.N - 1);
    CHECK(top.total_dim == 2 * s.N - 1);
  }
  for (int n = 3; n <= 10; ++n) CHECK(char_bundle_dims(make_spec(Family::IV, {n}), 1).fiber_dim == n - 2);
  CHECK(char_bundle_dims(make_spec(Family::V), 1).fiber_dim == 10);
  CHECK_THROWS_AS(char_bundle_dims(make_spec(Family::V), 3), PreconditionError);
}

TEST_CASE("generator counts") {
  const SosCounts d3 = sos_counts(make_spec(Family::Polydisk, {3}));
  CHECK(d3.m1 == 4);
  CHECK(d3.m2 == 3);
  CHECK(sos_counts(make_spec(Family::I, {3, 4})).m2 == 18);
  for (int n = 3; n <= 10; ++n) {
    const SosCounts c = sos_counts(make_spec(Family::IV, {n}));
    CHECK(c.m1 == n);
    CHECK(c.m2 == 1);
  }
  for (int p = 1; p <= 5; ++p)
    for (int q = p; q <= 7; ++q) {
      const DomainSpec s = make_spec(Family::I, {p, q});
      const SosCounts c = sos_counts(s);
      CHECK(c.m1 + c.m2 == *s.n_prime);
      CHECK(c.m1 >= s.N);
    }
  CHECK_THROWS_AS(sos_counts(make_spec(Family::V)), NotInCatalog);
}

TEST_CASE("invalid parameters and overflow") {
  CHECK_THROWS_AS(make_spec(Family::I, {3, 2}), PreconditionError);
  CHECK_THROWS_AS(make_spec(Family::IV, {2}), PreconditionError);
  CHECK_THROWS_AS(make_spec(Family::V, {1}), PreconditionError);
  CHECK_THROWS_AS(parse_family("VII"), PreconditionError);
  CHECK(parse_family("iv") == Family::IV);
  CHECK(make_spec(Family::III, {7}).n_prime_external);
  CHECK(make_spec(Family::VI).n_prime_external);
  CHECK_FALSE(make_spec(Family::I, {40, 60}).n_prime.has_value());
  CHECK_FALSE(make_spec(Family::I, {40, 60}).n0().has_value());
  CHECK(make_spec(Family::I, {2, 3}).name() == "I(2,3)");
}
