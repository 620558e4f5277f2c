#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hisom/matrix.hpp"
#include "hisom/scalar.hpp"

namespace hisom {

using Exponent = std::vector<int>;
using BiExponent = std::pair<Exponent, Exponent>;  // (holomorphic, antiholomorphic)

int total_degree(const Exponent& e);
Exponent unit_exponent(int num_vars, int j);
Exponent add_exponents(const Exponent& a, const Exponent& b);

// Lower total degree first; within a degree, z_1 before z_2 (lex descending).
struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

struct BiGradedLex {
  bool operator()(const BiExponent& a, const BiExponent& b) const;
};

// All exponents in num_vars variables of total degree <= max_degree, in
// graded-lex order.
std::vector<Exponent> monomials_up_to(int num_vars, int max_degree);

// Sparse holomorphic polynomial. No stored coefficient is exactly zero.
template <class S>
class HoloPoly {
 public:
  using Terms = std::map<Exponent, S, GradedLex>;

  explicit HoloPoly(int num_vars = 0) : num_vars_(num_vars) {}
  static HoloPoly constant(int num_vars, const S& c);
  static HoloPoly variable(int num_vars, int j, const S& coeff = S(1));
  static HoloPoly monomial(const Exponent& e, const S& coeff);

  int num_vars() const { return num_vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // -1 for the zero polynomial.
  int degree() const;
  int low_degree() const;
  // Degree when every term has the same total degree; empty for zero or mixed.
  std::optional<int> homogeneous_degree() const;
  S coefficient(const Exponent& e) const;

  // Accumulates c into the coefficient of z^e.
  void add_term(const Exponent& e, const S& c);

  HoloPoly truncated(int d) const;
  HoloPoly homogeneous_part(int k) const;
  S evaluate(std::span<const S> z) const;
  double max_abs_coefficient() const;

  HoloPoly& operator+=(const HoloPoly& o);
  HoloPoly& operator-=(const HoloPoly& o);
  HoloPoly& operator*=(const S& c);

  friend HoloPoly operator+(HoloPoly a, const HoloPoly& b) { return a += b; }
  friend HoloPoly operator-(HoloPoly a, const HoloPoly& b) { return a -= b; }
  friend HoloPoly operator-(HoloPoly a) { return a *= S(-1); }
  friend HoloPoly operator*(HoloPoly a, const S& c) { return a *= c; }
  friend HoloPoly operator*(const S& c, HoloPoly a) { return a *= c; }
  friend bool operator==(const HoloPoly& a, const HoloPoly& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }

 private:
  int num_vars_;
  Terms terms_;
};

// Product dropping every term of total degree above max_degree (-1: keep all).
template <class S>
HoloPoly<S> multiply_truncated(const HoloPoly<S>& a, const HoloPoly<S>& b, int max_degree);

template <class S>
HoloPoly<S> operator*(const HoloPoly<S>& a, const HoloPoly<S>& b) {
  return multiply_truncated(a, b, -1);
}

HoloPoly<Complex> to_floating(const HoloPoly<Exact>& p);

// Real-analytic polynomial sum c_{ab} z^a conj(z)^b.
template <class S>
class BidegPoly {
 public:
  using Terms = std::map<BiExponent, S, BiGradedLex>;

  explicit BidegPoly(int num_vars = 0) : num_vars_(num_vars) {}
  static BidegPoly constant(int num_vars, const S& c);
  // f * conj(g), dropping terms whose holomorphic or antiholomorphic degree
  // exceeds max_each_side (-1: keep all).
  static BidegPoly hermitian_product(const HoloPoly<S>& f, const HoloPoly<S>& g, int max_each_side = -1);

  int num_vars() const { return num_vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  S coefficient(const Exponent& hol, const Exponent& anti) const;
  void add_term(const Exponent& hol, const Exponent& anti, const S& c);

  BidegPoly truncated_box(int d) const;
  BidegPoly truncated_total(int d) const;
  // The pointwise complex conjugate function.
  BidegPoly conjugate_function() const;
  bool is_hermitian(double tol = 0.0) const;
  Complex evaluate(std::span<const Complex> z) const;
  double max_abs_coefficient() const;
  // Max |coefficient| per bidegree (|hol|, |anti|).
  std::map<std::pair<int, int>, double> max_abs_by_bidegree() const;

  BidegPoly& operator+=(const BidegPoly& o);
  BidegPoly& operator-=(const BidegPoly& o);
  BidegPoly& operator*=(const S& c);

  friend BidegPoly operator+(BidegPoly a, const BidegPoly& b) { return a += b; }
  friend BidegPoly operator-(BidegPoly a, const BidegPoly& b) { return a -= b; }
  friend BidegPoly operator-(BidegPoly a) { return a *= S(-1); }
  friend BidegPoly operator*(BidegPoly a, const S& c) { return a *= c; }
  friend bool operator==(const BidegPoly& a, const BidegPoly& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }

 private:
  int num_vars_;
  Terms terms_;
};

// Product keeping terms with |hol| + |anti| <= max_total (-1: keep all).
template <class S>
BidegPoly<S> multiply_truncated(const BidegPoly<S>& a, const BidegPoly<S>& b, int max_total);

template <class S>
BidegPoly<S> operator*(const BidegPoly<S>& a, const BidegPoly<S>& b) {
  return multiply_truncated(a, b, -1);
}

// A bidegree polynomial read as a function of independent points (z, xi):
// sum c_{ab} z^a conj(xi)^b. Its diagonal is the original polynomial.
template <class S>
class PolarizedPoly {
 public:
  explicit PolarizedPoly(BidegPoly<S> form) : form_(std::move(form)) {}
  Complex evaluate(std::span<const Complex> z, std::span<const Complex> xi) const;
  const BidegPoly<S>& restrict_to_diagonal() const { return form_; }

 private:
  BidegPoly<S> form_;
};

// Taylor polynomial through degree d of a map C^n -> C^N.
template <class S>
class JetMap {
 public:
  JetMap() = default;
  JetMap(int source_dim, int degree, std::vector<HoloPoly<S>> components);
  static JetMap identity(int n, int degree);
  // w -> M w
  static JetMap linear(const Matrix<S>& m, int degree);

  int source_dim() const { return source_dim_; }
  int target_dim() const { return static_cast<int>(components_.size()); }
  int degree() const { return degree_; }
  const std::vector<HoloPoly<S>>& components() const { return components_; }
  const HoloPoly<S>& operator[](std::size_t i) const { return components_[i]; }

  bool has_zero_constant_term() const;
  // N x n matrix of first-order coefficients.
  Matrix<S> jacobian_at_origin() const;
  std::vector<S> evaluate(std::span<const S> w) const;
  JetMap truncated(int d) const;

  friend bool operator==(const JetMap& a, const JetMap& b) {
    return a.source_dim_ == b.source_dim_ && a.degree_ == b.degree_ && a.components_ == b.components_;
  }

 private:
  int source_dim_ = 0;
  int degree_ = 0;
  std::vector<HoloPoly<S>> components_;
};

// outer o inner truncated at degree d. inner must vanish at the origin.
template <class S>
JetMap<S> compose_truncate(const JetMap<S>& outer, const JetMap<S>& inner, int d);

// Each polynomial (in inner.target_dim() variables) evaluated on inner,
// truncated at degree d.
template <class S>
std::vector<HoloPoly<S>> substitute(const std::vector<HoloPoly<S>>& polys, const JetMap<S>& inner, int d);

// Component-wise M f.
template <class S>
std::vector<HoloPoly<S>> apply_matrix(const Matrix<S>& m, const std::vector<HoloPoly<S>>& f);

// sum_j f_j conj(f_j), keeping |hol|, |anti| <= d.
template <class S>
BidegPoly<S> squared_norm(const std::vector<HoloPoly<S>>& f, int d);
// sum_k signs[k] |f_k|^2, bidegrees up to d on each side.
template <class S>
BidegPoly<S> signed_squared_norm(const std::vector<HoloPoly<S>>& f, const std::vector<int>& signs, int d);
template <class S>
BidegPoly<S> squared_norm(const JetMap<S>& f, int d) {
  return squared_norm(f.components(), d);
}

template <class S>
PolarizedPoly<S> polarize(const BidegPoly<S>& p) {
  return PolarizedPoly<S>(p);
}

// log p truncated at total degree d. p must have constant term 1.
template <class S>
BidegPoly<S> log_truncate(const BidegPoly<S>& p, int d);

// (1 - ||w||^2)^k in n variables.
template <class S>
BidegPoly<S> ball_kernel_power(int n, int k);

// Monomials occurring in any of the polynomials, in graded-lex order.
template <class S>
std::vector<Exponent> monomial_support(const std::vector<HoloPoly<S>>& polys);

// Row i = coefficients of polys[i] on the given monomial basis.
template <class S>
Matrix<S> coefficient_matrix(const std::vector<HoloPoly<S>>& polys, const std::vector<Exponent>& basis);

// Max |coefficient| over all components of a - b.
template <class S>
double max_coefficient_difference(const std::vector<HoloPoly<S>>& a, const std::vector<HoloPoly<S>>& b);

}  // namespace hisom
