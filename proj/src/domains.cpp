#include "hisom/domains.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hisom/errors.hpp"

namespace hisom {

namespace {

constexpr std::int64_t kOverflow = std::numeric_limits<std::int64_t>::max();

// Binomial coefficient, kOverflow when it does not fit.
std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc >= kOverflow) return kOverflow;
  }
  return static_cast<std::int64_t>(acc);
}

std::optional<std::int64_t> checked(std::int64_t v) {
  if (v == kOverflow) return std::nullopt;
  return v;
}

std::optional<std::int64_t> pow2_minus_1(int e) {
  if (e >= 62) return std::nullopt;
  return (std::int64_t{1} << e) - 1;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw PreconditionError(message);
}

// Smallest integer lambda with lambda >= (a - sqrt(b)) / c, computed without
// floating point: lambda qualifies iff a - c*lambda <= 0 or (a - c*lambda)^2 <= b.
int ceil_root_expression(long a, long b, long c) {
  long lambda = static_cast<long>(std::floor((a - std::sqrt(static_cast<double>(b))) / c)) - 2;
  auto ok = [&](long l) {
    long t = a - c * l;
    return t <= 0 || t * t <= b;
  };
  while (!ok(lambda)) ++lambda;
  while (ok(lambda - 1)) --lambda;
  return static_cast<int>(lambda);
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::I: return "I";
    case Family::II: return "II";
    case Family::III: return "III";
    case Family::IV: return "IV";
    case Family::V: return "V";
    case Family::VI: return "VI";
    case Family::Polydisk: return "polydisk";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  std::string t;
  for (char ch : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (t == "i") return Family::I;
  if (t == "ii") return Family::II;
  if (t == "iii") return Family::III;
  if (t == "iv") return Family::IV;
  if (t == "v") return Family::V;
  if (t == "vi") return Family::VI;
  if (t == "polydisk" || t == "polydisc") return Family::Polydisk;
  throw PreconditionError("unknown family '" + std::string(text) + "'");
}

int DomainSpec::null_dim(int k) const {
  if (k < 1 || k > rank) throw PreconditionError("null dimension index out of range");
  return null_dims[k - 1];
}

std::optional<std::int64_t> DomainSpec::n0() const {
  if (!n_prime) return std::nullopt;
  return 2 * std::int64_t{N} - *n_prime;
}

std::string DomainSpec::name() const {
  std::string out = family_name(family);
  if (!params.empty()) {
    out += "(";
    for (std::size_t i = 0; i < params.size(); ++i) out += (i ? "," : "") + std::to_string(params[i]);
    out += ")";
  }
  return out;
}

DomainSpec make_spec(Family family, const std::vector<int>& params) {
  DomainSpec s;
  s.family = family;
  s.params = params;
  auto want = [&](std::size_t count) {
    require(params.size() == count, family_name(family) + " takes " + std::to_string(count) + " parameter(s)");
  };
  switch (family) {
    case Family::I: {
      want(2);
      const int p = params[0], q = params[1];
      require(1 <= p && p <= q, "type I needs 1 <= p <= q");
      s.N = p * q;
      s.rank = p;
      s.p_inv = p + q - 2;
      for (int k = 1; k <= p; ++k) s.null_dims.push_back((p - k) * (q - k));
      s.n_prime = checked(binomial(p + q, p));
      if (s.n_prime) *s.n_prime -= 1;
      s.tube = p == q;
      break;
    }
    case Family::II: {
      want(1);
      const int m = params[0];
      require(m >= 2, "type II needs m >= 2");
      s.N = m * (m - 1) / 2;
      s.rank = m / 2;
      s.p_inv = 2 * (m - 2);
      for (int k = 1; k <= s.rank; ++k) s.null_dims.push_back(std::max(0, (m - 2 * k) * (m - 2 * k - 1) / 2));
      s.n_prime = pow2_minus_1(m - 1);
      s.tube = m % 2 == 0;
      break;
    }
    case Family::III: {
      want(1);
      const int m = params[0];
      require(m >= 1, "type III needs m >= 1");
      s.N = m * (m + 1) / 2;
      s.rank = m;
      s.p_inv = m - 1;
      for (int k = 1; k <= m; ++k) s.null_dims.push_back((m - k) * (m - k + 1) / 2);
      std::int64_t a = binomial(2 * m, m), b = binomial(2 * m, m - 2);
      if (a != kOverflow && b != kOverflow) s.n_prime = a - b - 1;
      s.n_prime_external = true;
      s.tube = true;
      break;
    }
    case Family::IV: {
      want(1);
      const int n = params[0];
      require(n >= 3, "type IV needs n >= 3");
      s.N = n;
      s.rank = 2;
      s.p_inv = n - 2;
      s.null_dims = {1, 0};
      s.n_prime = n + 1;
      s.tube = true;
      break;
    }
    case Family::V:
      want(0);
      s.N = 16;
      s.rank = 2;
      s.p_inv = 10;
      s.null_dims = {5, 0};
      s.n_prime = 26;
      s.tube = false;
      break;
    case Family::VI:
      want(0);
      s.N = 27;
      s.rank = 3;
      s.p_inv = 16;
      s.null_dims = {10, 1, 0};
      s.n_prime = 55;
      s.n_prime_external = true;
      s.tube = true;
      break;
    case Family::Polydisk: {
      want(1);
      const int p = params[0];
      require(p >= 1, "polydisk needs p >= 1");
      s.N = p;
      s.rank = p;
      s.p_inv = 0;
      for (int k = 1; k <= p; ++k) s.null_dims.push_back(p - k);
      s.n_prime = pow2_minus_1(p);
      s.tube = true;
      break;
    }
  }
  return s;
}

int lambda0(const DomainSpec& spec) {
  for (int l = 1; l <= spec.rank; ++l)
    if (spec.null_dim(l) <= spec.p_inv) return l;
  return spec.rank;  // n_r = 0 <= p always, so unreachable
}

std::optional<int> lambda0_closed_form(const DomainSpec& spec) {
  switch (spec.family) {
    case Family::I: {
      const int p = spec.params[0], q = spec.params[1];
      if (p < 3 || (p == 3 && q == 3)) return std::nullopt;
      return ceil_root_expression(p + q, static_cast<long>(q - p) * (q - p) + 4L * (p + q - 2), 2);
    }
    case Family::II: {
      const int m = spec.params[0];
      if (m < 8) return std::nullopt;
      return ceil_root_expression(2 * m - 1, 16L * m - 31, 4);
    }
    case Family::III: {
      const int m = spec.params[0];
      if (m < 3) return std::nullopt;
      return ceil_root_expression(2 * m + 1, 8L * m - 7, 2);
    }
    default:
      return std::nullopt;
  }
}

int lambda0_checked(const DomainSpec& spec) {
  const int brute = lambda0(spec);
  if (auto closed = lambda0_closed_form(spec); closed && *closed != brute)
    throw std::logic_error("lambda0 closed form " + std::to_string(*closed) + " disagrees with search " +
                           std::to_string(brute) + " for " + spec.name());
  return brute;
}

bool classify_null_leq_p(const DomainSpec& spec) { return spec.rank >= 2 && spec.null_dim(1) <= spec.p_inv; }

bool rank2_codim_inequality(const DomainSpec& spec) {
  require(spec.rank == 2, "codimension inequality is stated for rank-2 domains");
  if (!spec.n_prime) throw NotInCatalog("N' unavailable for " + spec.name());
  return 2 * std::int64_t{spec.N} > *spec.n_prime + 1;
}

DimensionBound dim_upper_bound(const DomainSpec& spec, int k) {
  require(1 <= k && k <= spec.rank, "isometric constant must lie in [1, rank]");
  DimensionBound out;
  if (k == 1) {
    out.bound = spec.p_inv + 1;
    return out;
  }
  out.bound = spec.null_dim(k - 1);
  out.certified_le_p = spec.null_dim(1) <= spec.p_inv || k >= lambda0(spec) + 1;
  return out;
}

CharBundleDims char_bundle_dims(const DomainSpec& spec, int k) {
  require(1 <= k && k <= spec.rank, "characteristic bundle index must lie in [1, rank]");
  const int nk = spec.null_dim(k);
  return {spec.N - nk - 1, 2 * spec.N - nk - 1};
}

SosCounts sos_counts(const DomainSpec& spec) {
  switch (spec.family) {
    case Family::I: {
      const int p = spec.params[0], q = spec.params[1];
      SosCounts c;
      for (int k = 1; k <= p; ++k) {
        std::int64_t a = binomial(p, k), b = binomial(q, k);
        if (a == kOverflow || b == kOverflow || (b != 0 && a > kOverflow / b)) throw NotInCatalog("generator count overflows");
        (k % 2 == 1 ? c.m1 : c.m2) += a * b;
      }
      return c;
    }
    case Family::IV:
      return {spec.N, 1};
    case Family::Polydisk: {
      const int p = spec.params[0];
      if (p >= 62) throw NotInCatalog("generator count overflows");
      return {std::int64_t{1} << (p - 1), (std::int64_t{1} << (p - 1)) - 1};
    }
    default:
      throw NotInCatalog("no generator expansion cataloged for " + spec.name());
  }
}

}  // namespace hisom
