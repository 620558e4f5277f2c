#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hisom {

enum class Family { I, II, III, IV, V, VI, Polydisk };

std::string family_name(Family f);
Family parse_family(std::string_view text);

// Catalog record of the invariants of an irreducible bounded symmetric domain
// (or the polydisk) in its Harish-Chandra realization.
struct DomainSpec {
  Family family = Family::I;
  std::vector<int> params;  // (p, q) for I; m for II, III; n for IV; p for the polydisk; empty for V, VI
  int N = 0;                // complex dimension
  int rank = 0;
  int p_inv = 0;                 // dimension of the first characteristic fiber
  std::vector<int> null_dims;    // n_1, ..., n_r
  std::optional<std::int64_t> n_prime;  // dimension of the minimal projective embedding
  bool n_prime_external = false;        // value taken from outside the main catalog
  bool tube = false;

  // n_k for 1 <= k <= rank.
  int null_dim(int k) const;
  // 2N - N'; empty when N' is unknown.
  std::optional<std::int64_t> n0() const;
  std::string name() const;
};

DomainSpec make_spec(Family family, const std::vector<int>& params = {});

// Minimal lambda in [1, rank] with n_lambda <= p, by direct search.
int lambda0(const DomainSpec& spec);
// Closed-form ceiling for type I (3 <= p <= q, not (3,3)), type II (m >= 8),
// type III (m >= 3); empty elsewhere.
std::optional<int> lambda0_closed_form(const DomainSpec& spec);
// lambda0 cross-checked against the closed form where one exists; throws
// std::logic_error on disagreement.
int lambda0_checked(const DomainSpec& spec);

// True iff n_1 <= p and rank >= 2.
bool classify_null_leq_p(const DomainSpec& spec);

// 2N > N' + 1 for rank-2 domains. Throws NotInCatalog when N' is unknown and
// PreconditionError for other ranks.
bool rank2_codim_inequality(const DomainSpec& spec);

struct DimensionBound {
  int bound = 0;
  bool certified_le_p = false;  // the bound is known to be at most p(Omega)
};
// Upper bound on the ball dimension n of an isometry with constant k.
DimensionBound dim_upper_bound(const DomainSpec& spec, int k);

struct CharBundleDims {
  int fiber_dim = 0;
  int total_dim = 0;
};
// Dimensions of the k-th characteristic bundle and its fiber.
CharBundleDims char_bundle_dims(const DomainSpec& spec, int k);

struct SosCounts {
  std::int64_t m1 = 0;  // odd-degree generators
  std::int64_t m2 = 0;  // even-degree generators
};
// Throws NotInCatalog for families without a generator expansion.
SosCounts sos_counts(const DomainSpec& spec);

}  // namespace hisom
