#include "hisom/poly.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "hisom/errors.hpp"

namespace hisom {

int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

Exponent unit_exponent(int num_vars, int j) {
  Exponent e(num_vars, 0);
  e.at(j) = 1;
  return e;
}

Exponent add_exponents(const Exponent& a, const Exponent& b) {
  Exponent out(a);
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

bool GradedLex::operator()(const Exponent& a, const Exponent& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return b < a;
}

bool BiGradedLex::operator()(const BiExponent& a, const BiExponent& b) const {
  const int da = total_degree(a.first) + total_degree(a.second);
  const int db = total_degree(b.first) + total_degree(b.second);
  if (da != db) return da < db;
  GradedLex lex;
  if (a.first != b.first) return lex(a.first, b.first);
  return lex(a.second, b.second);
}

namespace {

void monomials_of_degree(int num_vars, int remaining, int index, Exponent& current, std::vector<Exponent>& out) {
  if (index == num_vars - 1) {
    current[index] = remaining;
    out.push_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[index] = e;
    monomials_of_degree(num_vars, remaining - e, index + 1, current, out);
  }
  current[index] = 0;
}

template <class S>
bool coefficient_is_zero(const S& c) {
  return is_zero(c);
}

// Powers z_j^e for e = 0..max, as scalars.
template <class S>
std::vector<std::vector<S>> scalar_powers(std::span<const S> z, int max_degree) {
  std::vector<std::vector<S>> pw(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    pw[j].push_back(S(1));
    for (int e = 1; e <= max_degree; ++e) pw[j].push_back(pw[j].back() * z[j]);
  }
  return pw;
}

}  // namespace

std::vector<Exponent> monomials_up_to(int num_vars, int max_degree) {
  std::vector<Exponent> out;
  if (num_vars <= 0) return out;
  Exponent current(num_vars, 0);
  for (int d = 0; d <= max_degree; ++d) monomials_of_degree(num_vars, d, 0, current, out);
  return out;
}

// ---------------------------------------------------------------- HoloPoly

template <class S>
HoloPoly<S> HoloPoly<S>::constant(int num_vars, const S& c) {
  HoloPoly p(num_vars);
  p.add_term(Exponent(num_vars, 0), c);
  return p;
}

template <class S>
HoloPoly<S> HoloPoly<S>::variable(int num_vars, int j, const S& coeff) {
  if (j < 0 || j >= num_vars) throw PreconditionError("variable index out of range");
  HoloPoly p(num_vars);
  p.add_term(unit_exponent(num_vars, j), coeff);
  return p;
}

template <class S>
HoloPoly<S> HoloPoly<S>::monomial(const Exponent& e, const S& coeff) {
  HoloPoly p(static_cast<int>(e.size()));
  p.add_term(e, coeff);
  return p;
}

template <class S>
int HoloPoly<S>::degree() const {
  return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first);
}

template <class S>
int HoloPoly<S>::low_degree() const {
  return terms_.empty() ? -1 : total_degree(terms_.begin()->first);
}

template <class S>
std::optional<int> HoloPoly<S>::homogeneous_degree() const {
  if (terms_.empty() || degree() != low_degree()) return std::nullopt;
  return degree();
}

template <class S>
S HoloPoly<S>::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? S(0) : it->second;
}

template <class S>
void HoloPoly<S>::add_term(const Exponent& e, const S& c) {
  if (static_cast<int>(e.size()) != num_vars_) throw PreconditionError("exponent length mismatch");
  for (int x : e)
    if (x < 0) throw PreconditionError("negative exponent");
  if (coefficient_is_zero(c)) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (coefficient_is_zero(it->second)) terms_.erase(it);
  }
}

template <class S>
HoloPoly<S> HoloPoly<S>::truncated(int d) const {
  HoloPoly out(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (total_degree(e) > d) break;
    out.terms_.emplace_hint(out.terms_.end(), e, c);
  }
  return out;
}

template <class S>
HoloPoly<S> HoloPoly<S>::homogeneous_part(int k) const {
  HoloPoly out(num_vars_);
  for (const auto& [e, c] : terms_)
    if (total_degree(e) == k) out.terms_.emplace_hint(out.terms_.end(), e, c);
  return out;
}

template <class S>
S HoloPoly<S>::evaluate(std::span<const S> z) const {
  if (static_cast<int>(z.size()) != num_vars_) throw PreconditionError("evaluation point has wrong dimension");
  auto pw = scalar_powers(z, std::max(degree(), 0));
  S acc(0);
  for (const auto& [e, c] : terms_) {
    S term = c;
    for (int j = 0; j < num_vars_; ++j)
      if (e[j] > 0) term *= pw[j][e[j]];
    acc += term;
  }
  return acc;
}

template <class S>
double HoloPoly<S>::max_abs_coefficient() const {
  double best = 0.0;
  for (const auto& [e, c] : terms_) best = std::max(best, magnitude(c));
  return best;
}

template <class S>
HoloPoly<S>& HoloPoly<S>::operator+=(const HoloPoly& o) {
  if (o.num_vars_ != num_vars_) throw PreconditionError("polynomials in different variable counts");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

template <class S>
HoloPoly<S>& HoloPoly<S>::operator-=(const HoloPoly& o) {
  if (o.num_vars_ != num_vars_) throw PreconditionError("polynomials in different variable counts");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

template <class S>
HoloPoly<S>& HoloPoly<S>::operator*=(const S& c) {
  if (coefficient_is_zero(c)) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, x] : terms_) x *= c;
  return *this;
}

namespace {

// Terms of an exact polynomial as integers over one shared denominator, in
// the basis 1, i, sqrt2, i sqrt2.
struct ScaledTerms {
  mpz_class den = 1;
  std::vector<const Exponent*> exps;
  std::vector<int> degrees;
  std::vector<std::array<mpz_class, 4>> nums;
};

ScaledTerms scale_terms(const HoloPoly<Exact>& p, int max_degree) {
  ScaledTerms out;
  for (const auto& [e, c] : p.terms()) {
    if (max_degree >= 0 && total_degree(e) > max_degree) break;
    for (const mpq_class* part : {&c.re(), &c.im(), &c.re_s2(), &c.im_s2()})
      mpz_lcm(out.den.get_mpz_t(), out.den.get_mpz_t(), part->get_den_mpz_t());
  }
  for (const auto& [e, c] : p.terms()) {
    const int deg = total_degree(e);
    if (max_degree >= 0 && deg > max_degree) break;
    out.exps.push_back(&e);
    out.degrees.push_back(deg);
    std::array<mpz_class, 4> nums;
    const mpq_class* parts[4] = {&c.re(), &c.im(), &c.re_s2(), &c.im_s2()};
    for (int k = 0; k < 4; ++k) nums[k] = parts[k]->get_num() * (out.den / parts[k]->get_den());
    out.nums.push_back(std::move(nums));
  }
  return out;
}

HoloPoly<Exact> multiply_scaled(const HoloPoly<Exact>& a, const HoloPoly<Exact>& b, int max_degree) {
  const ScaledTerms sa = scale_terms(a, max_degree);
  const ScaledTerms sb = scale_terms(b, max_degree);
  std::vector<std::array<mpz_class, 2>> doubled(sb.nums.size());
  for (std::size_t j = 0; j < sb.nums.size(); ++j) {
    doubled[j][0] = 2 * sb.nums[j][2];
    doubled[j][1] = 2 * sb.nums[j][3];
  }
  std::map<Exponent, std::array<mpz_class, 4>, GradedLex> acc;
  Exponent e(a.num_vars());
  for (std::size_t i = 0; i < sa.exps.size(); ++i) {
    const Exponent& ea = *sa.exps[i];
    mpz_srcptr x0 = sa.nums[i][0].get_mpz_t(), x1 = sa.nums[i][1].get_mpz_t();
    mpz_srcptr x2 = sa.nums[i][2].get_mpz_t(), x3 = sa.nums[i][3].get_mpz_t();
    for (std::size_t j = 0; j < sb.exps.size(); ++j) {
      if (max_degree >= 0 && sa.degrees[i] + sb.degrees[j] > max_degree) break;
      const Exponent& eb = *sb.exps[j];
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = ea[v] + eb[v];
      auto& cell = acc[e];
      mpz_srcptr y0 = sb.nums[j][0].get_mpz_t(), y1 = sb.nums[j][1].get_mpz_t();
      mpz_srcptr y2 = sb.nums[j][2].get_mpz_t(), y3 = sb.nums[j][3].get_mpz_t();
      mpz_srcptr y2d = doubled[j][0].get_mpz_t(), y3d = doubled[j][1].get_mpz_t();
      mpz_ptr re = cell[0].get_mpz_t(), im = cell[1].get_mpz_t();
      mpz_ptr rs = cell[2].get_mpz_t(), is = cell[3].get_mpz_t();
      // (p + q sqrt2)(p' + q' sqrt2) = p p' + 2 q q' + (p q' + q p') sqrt2
      mpz_addmul(re, x0, y0);
      mpz_submul(re, x1, y1);
      mpz_addmul(re, x2, y2d);
      mpz_submul(re, x3, y3d);
      mpz_addmul(im, x0, y1);
      mpz_addmul(im, x1, y0);
      mpz_addmul(im, x2, y3d);
      mpz_addmul(im, x3, y2d);
      mpz_addmul(rs, x0, y2);
      mpz_submul(rs, x1, y3);
      mpz_addmul(rs, x2, y0);
      mpz_submul(rs, x3, y1);
      mpz_addmul(is, x0, y3);
      mpz_addmul(is, x1, y2);
      mpz_addmul(is, x2, y1);
      mpz_addmul(is, x3, y0);
    }
  }
  const mpz_class den = sa.den * sb.den;
  auto ratio = [&](const mpz_class& num) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  };
  HoloPoly<Exact> out(a.num_vars());
  for (const auto& [ex, cell] : acc) {
    if (cell[0] == 0 && cell[1] == 0 && cell[2] == 0 && cell[3] == 0) continue;
    out.add_term(ex, Exact(ratio(cell[0]), ratio(cell[1]), ratio(cell[2]), ratio(cell[3])));
  }
  return out;
}

// sum_k c_k p_k over one shared denominator.
HoloPoly<Exact> linear_combination_scaled(int num_vars,
                                          const std::vector<std::pair<Exact, const HoloPoly<Exact>*>>& terms) {
  mpz_class coef_den = 1, poly_den = 1;
  std::vector<ScaledTerms> scaled;
  scaled.reserve(terms.size());
  for (const auto& [c, poly] : terms) {
    for (const mpq_class* part : {&c.re(), &c.im(), &c.re_s2(), &c.im_s2()})
      mpz_lcm(coef_den.get_mpz_t(), coef_den.get_mpz_t(), part->get_den_mpz_t());
    scaled.push_back(scale_terms(*poly, -1));
    mpz_lcm(poly_den.get_mpz_t(), poly_den.get_mpz_t(), scaled.back().den.get_mpz_t());
  }
  std::map<Exponent, std::array<mpz_class, 4>, GradedLex> acc;
  std::array<mpz_class, 4> x;
  mpz_class x2d, x3d;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Exact& c = terms[k].first;
    const mpz_class lift = poly_den / scaled[k].den;
    const mpq_class* parts[4] = {&c.re(), &c.im(), &c.re_s2(), &c.im_s2()};
    for (int i = 0; i < 4; ++i) x[i] = parts[i]->get_num() * (coef_den / parts[i]->get_den()) * lift;
    x2d = 2 * x[2];
    x3d = 2 * x[3];
    for (std::size_t j = 0; j < scaled[k].exps.size(); ++j) {
      auto& cell = acc[*scaled[k].exps[j]];
      const auto& y = scaled[k].nums[j];
      mpz_srcptr y0 = y[0].get_mpz_t(), y1 = y[1].get_mpz_t(), y2 = y[2].get_mpz_t(), y3 = y[3].get_mpz_t();
      mpz_ptr re = cell[0].get_mpz_t(), im = cell[1].get_mpz_t();
      mpz_ptr rs = cell[2].get_mpz_t(), is = cell[3].get_mpz_t();
      mpz_addmul(re, x[0].get_mpz_t(), y0);
      mpz_submul(re, x[1].get_mpz_t(), y1);
      mpz_addmul(re, x2d.get_mpz_t(), y2);
      mpz_submul(re, x3d.get_mpz_t(), y3);
      mpz_addmul(im, x[0].get_mpz_t(), y1);
      mpz_addmul(im, x[1].get_mpz_t(), y0);
      mpz_addmul(im, x2d.get_mpz_t(), y3);
      mpz_addmul(im, x3d.get_mpz_t(), y2);
      mpz_addmul(rs, x[0].get_mpz_t(), y2);
      mpz_submul(rs, x[1].get_mpz_t(), y3);
      mpz_addmul(rs, x[2].get_mpz_t(), y0);
      mpz_submul(rs, x[3].get_mpz_t(), y1);
      mpz_addmul(is, x[0].get_mpz_t(), y3);
      mpz_addmul(is, x[1].get_mpz_t(), y2);
      mpz_addmul(is, x[2].get_mpz_t(), y1);
      mpz_addmul(is, x[3].get_mpz_t(), y0);
    }
  }
  const mpz_class den = coef_den * poly_den;
  auto ratio = [&](const mpz_class& num) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  };
  HoloPoly<Exact> out(num_vars);
  for (const auto& [ex, cell] : acc) {
    if (cell[0] == 0 && cell[1] == 0 && cell[2] == 0 && cell[3] == 0) continue;
    out.add_term(ex, Exact(ratio(cell[0]), ratio(cell[1]), ratio(cell[2]), ratio(cell[3])));
  }
  return out;
}

}  // namespace

template <class S>
HoloPoly<S> multiply_truncated(const HoloPoly<S>& a, const HoloPoly<S>& b, int max_degree) {
  if (a.num_vars() != b.num_vars()) throw PreconditionError("polynomials in different variable counts");
  if constexpr (is_exact_v<S>) {
    return multiply_scaled(a, b, max_degree);
  }
  HoloPoly<S> out(a.num_vars());
  std::map<Exponent, S, GradedLex> acc;
  Exponent e(a.num_vars());
  for (const auto& [ea, ca] : a.terms()) {
    const int da = total_degree(ea);
    if (max_degree >= 0 && da > max_degree) break;
    for (const auto& [eb, cb] : b.terms()) {
      if (max_degree >= 0 && da + total_degree(eb) > max_degree) break;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      auto it = acc.find(e);
      if (it == acc.end()) {
        acc.emplace(e, ca * cb);
      } else {
        it->second += ca * cb;
      }
    }
  }
  for (auto& [ex, c] : acc)
    if (!coefficient_is_zero(c)) out.add_term(ex, c);
  return out;
}

HoloPoly<Complex> to_floating(const HoloPoly<Exact>& p) {
  HoloPoly<Complex> out(p.num_vars());
  for (const auto& [e, c] : p.terms()) out.add_term(e, c.to_complex());
  return out;
}

// --------------------------------------------------------------- BidegPoly

template <class S>
BidegPoly<S> BidegPoly<S>::constant(int num_vars, const S& c) {
  BidegPoly p(num_vars);
  p.add_term(Exponent(num_vars, 0), Exponent(num_vars, 0), c);
  return p;
}

template <class S>
BidegPoly<S> BidegPoly<S>::hermitian_product(const HoloPoly<S>& f, const HoloPoly<S>& g, int max_each_side) {
  if (f.num_vars() != g.num_vars()) throw PreconditionError("polynomials in different variable counts");
  BidegPoly out(f.num_vars());
  for (const auto& [ea, ca] : f.terms()) {
    if (max_each_side >= 0 && total_degree(ea) > max_each_side) break;
    for (const auto& [eb, cb] : g.terms()) {
      if (max_each_side >= 0 && total_degree(eb) > max_each_side) break;
      out.add_term(ea, eb, ca * conjugate(cb));
    }
  }
  return out;
}

template <class S>
S BidegPoly<S>::coefficient(const Exponent& hol, const Exponent& anti) const {
  auto it = terms_.find(BiExponent(hol, anti));
  return it == terms_.end() ? S(0) : it->second;
}

template <class S>
void BidegPoly<S>::add_term(const Exponent& hol, const Exponent& anti, const S& c) {
  if (static_cast<int>(hol.size()) != num_vars_ || static_cast<int>(anti.size()) != num_vars_)
    throw PreconditionError("exponent length mismatch");
  if (coefficient_is_zero(c)) return;
  auto [it, inserted] = terms_.try_emplace(BiExponent(hol, anti), c);
  if (!inserted) {
    it->second += c;
    if (coefficient_is_zero(it->second)) terms_.erase(it);
  }
}

template <class S>
BidegPoly<S> BidegPoly<S>::truncated_box(int d) const {
  BidegPoly out(num_vars_);
  for (const auto& [e, c] : terms_)
    if (total_degree(e.first) <= d && total_degree(e.second) <= d) out.terms_.emplace_hint(out.terms_.end(), e, c);
  return out;
}

template <class S>
BidegPoly<S> BidegPoly<S>::truncated_total(int d) const {
  BidegPoly out(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (total_degree(e.first) + total_degree(e.second) > d) break;
    out.terms_.emplace_hint(out.terms_.end(), e, c);
  }
  return out;
}

template <class S>
BidegPoly<S> BidegPoly<S>::conjugate_function() const {
  BidegPoly out(num_vars_);
  for (const auto& [e, c] : terms_) out.terms_.emplace(BiExponent(e.second, e.first), conjugate(c));
  return out;
}

template <class S>
bool BidegPoly<S>::is_hermitian(double tol) const {
  BidegPoly diff = *this - conjugate_function();
  if constexpr (is_exact_v<S>) {
    (void)tol;
    return diff.is_zero();
  } else {
    return diff.max_abs_coefficient() <= tol;
  }
}

template <class S>
Complex BidegPoly<S>::evaluate(std::span<const Complex> z) const {
  if (static_cast<int>(z.size()) != num_vars_) throw PreconditionError("evaluation point has wrong dimension");
  int max_deg = 0;
  for (const auto& [e, c] : terms_) max_deg = std::max({max_deg, total_degree(e.first), total_degree(e.second)});
  std::vector<Complex> zbar(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) zbar[j] = std::conj(z[j]);
  auto pz = scalar_powers<Complex>(z, max_deg);
  auto pzb = scalar_powers<Complex>(zbar, max_deg);
  Complex acc = 0.0;
  for (const auto& [e, c] : terms_) {
    Complex term = to_complex(c);
    for (int j = 0; j < num_vars_; ++j) {
      if (e.first[j] > 0) term *= pz[j][e.first[j]];
      if (e.second[j] > 0) term *= pzb[j][e.second[j]];
    }
    acc += term;
  }
  return acc;
}

template <class S>
double BidegPoly<S>::max_abs_coefficient() const {
  double best = 0.0;
  for (const auto& [e, c] : terms_) best = std::max(best, magnitude(c));
  return best;
}

template <class S>
std::map<std::pair<int, int>, double> BidegPoly<S>::max_abs_by_bidegree() const {
  std::map<std::pair<int, int>, double> out;
  for (const auto& [e, c] : terms_) {
    double& slot = out[{total_degree(e.first), total_degree(e.second)}];
    slot = std::max(slot, magnitude(c));
  }
  return out;
}

template <class S>
BidegPoly<S>& BidegPoly<S>::operator+=(const BidegPoly& o) {
  if (o.num_vars_ != num_vars_) throw PreconditionError("polynomials in different variable counts");
  for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, c);
  return *this;
}

template <class S>
BidegPoly<S>& BidegPoly<S>::operator-=(const BidegPoly& o) {
  if (o.num_vars_ != num_vars_) throw PreconditionError("polynomials in different variable counts");
  for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, -c);
  return *this;
}

template <class S>
BidegPoly<S>& BidegPoly<S>::operator*=(const S& c) {
  if (coefficient_is_zero(c)) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, x] : terms_) x *= c;
  return *this;
}

template <class S>
BidegPoly<S> multiply_truncated(const BidegPoly<S>& a, const BidegPoly<S>& b, int max_total) {
  if (a.num_vars() != b.num_vars()) throw PreconditionError("polynomials in different variable counts");
  BidegPoly<S> out(a.num_vars());
  for (const auto& [ea, ca] : a.terms()) {
    const int da = total_degree(ea.first) + total_degree(ea.second);
    if (max_total >= 0 && da > max_total) break;
    for (const auto& [eb, cb] : b.terms()) {
      if (max_total >= 0 && da + total_degree(eb.first) + total_degree(eb.second) > max_total) break;
      out.add_term(add_exponents(ea.first, eb.first), add_exponents(ea.second, eb.second), ca * cb);
    }
  }
  return out;
}

template <class S>
Complex PolarizedPoly<S>::evaluate(std::span<const Complex> z, std::span<const Complex> xi) const {
  const int n = form_.num_vars();
  if (static_cast<int>(z.size()) != n || static_cast<int>(xi.size()) != n)
    throw PreconditionError("evaluation point has wrong dimension");
  Complex acc = 0.0;
  for (const auto& [e, c] : form_.terms()) {
    Complex term = to_complex(c);
    for (int j = 0; j < n; ++j) {
      if (e.first[j] > 0) term *= std::pow(z[j], e.first[j]);
      if (e.second[j] > 0) term *= std::pow(std::conj(xi[j]), e.second[j]);
    }
    acc += term;
  }
  return acc;
}

// ------------------------------------------------------------------ JetMap

template <class S>
JetMap<S>::JetMap(int source_dim, int degree, std::vector<HoloPoly<S>> components)
    : source_dim_(source_dim), degree_(degree) {
  if (source_dim < 1) throw PreconditionError("jet source dimension must be positive");
  if (degree < 0) throw PreconditionError("jet degree must be nonnegative");
  components_.reserve(components.size());
  for (auto& c : components) {
    if (c.num_vars() != source_dim) throw PreconditionError("jet component has wrong variable count");
    components_.push_back(c.truncated(degree));
  }
}

template <class S>
JetMap<S> JetMap<S>::identity(int n, int degree) {
  std::vector<HoloPoly<S>> comps;
  for (int j = 0; j < n; ++j) comps.push_back(HoloPoly<S>::variable(n, j));
  return JetMap(n, degree, std::move(comps));
}

template <class S>
JetMap<S> JetMap<S>::linear(const Matrix<S>& m, int degree) {
  const int n = static_cast<int>(m.cols());
  std::vector<HoloPoly<S>> comps;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    HoloPoly<S> p(n);
    for (int j = 0; j < n; ++j) p.add_term(unit_exponent(n, j), m(i, j));
    comps.push_back(std::move(p));
  }
  return JetMap(n, degree, std::move(comps));
}

template <class S>
bool JetMap<S>::has_zero_constant_term() const {
  for (const auto& c : components_)
    if (!c.is_zero() && c.low_degree() == 0) return false;
  return true;
}

template <class S>
Matrix<S> JetMap<S>::jacobian_at_origin() const {
  Matrix<S> out(components_.size(), source_dim_);
  for (std::size_t i = 0; i < components_.size(); ++i)
    for (int j = 0; j < source_dim_; ++j) out(i, j) = components_[i].coefficient(unit_exponent(source_dim_, j));
  return out;
}

template <class S>
std::vector<S> JetMap<S>::evaluate(std::span<const S> w) const {
  std::vector<S> out;
  for (const auto& c : components_) out.push_back(c.evaluate(w));
  return out;
}

template <class S>
JetMap<S> JetMap<S>::truncated(int d) const {
  return JetMap(source_dim_, std::min(d, degree_), components_);
}

template <class S>
std::vector<HoloPoly<S>> substitute(const std::vector<HoloPoly<S>>& polys, const JetMap<S>& inner, int d) {
  if (!inner.has_zero_constant_term()) throw PreconditionError("inner jet must vanish at the origin");
  const int m = inner.target_dim();
  const int n = inner.source_dim();
  // Values of monomials z^a o inner, built from a - e_j where j is the first
  // nonzero index.
  std::map<Exponent, HoloPoly<S>, GradedLex> memo;
  memo.emplace(Exponent(m, 0), HoloPoly<S>::constant(n, S(1)));
  std::vector<HoloPoly<S>> truncated_inner;
  for (const auto& c : inner.components()) truncated_inner.push_back(c.truncated(d));

  auto value_of = [&](auto&& self, const Exponent& a) -> const HoloPoly<S>& {
    auto it = memo.find(a);
    if (it != memo.end()) return it->second;
    int j = 0;
    while (a[j] == 0) ++j;
    Exponent rest = a;
    --rest[j];
    HoloPoly<S> v = multiply_truncated(self(self, rest), truncated_inner[j], d);
    return memo.emplace(a, std::move(v)).first->second;
  };

  std::vector<HoloPoly<S>> out;
  for (const auto& p : polys) {
    if (p.num_vars() != m) throw PreconditionError("substituted polynomial has wrong variable count");
    if constexpr (is_exact_v<S>) {
      std::vector<std::pair<Exact, const HoloPoly<Exact>*>> terms;
      for (const auto& [a, c] : p.terms()) {
        if (total_degree(a) > d) break;  // inner has no constant term
        terms.emplace_back(c, &value_of(value_of, a));
      }
      out.push_back(linear_combination_scaled(n, terms));
      continue;
    }
    HoloPoly<S> acc(n);
    for (const auto& [a, c] : p.terms()) {
      if (total_degree(a) > d) break;  // inner has no constant term
      HoloPoly<S> term = value_of(value_of, a);
      term *= c;
      acc += term;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

template <class S>
JetMap<S> compose_truncate(const JetMap<S>& outer, const JetMap<S>& inner, int d) {
  if (outer.source_dim() != inner.target_dim()) throw PreconditionError("composition dimension mismatch");
  return JetMap<S>(inner.source_dim(), d, substitute(outer.components(), inner, d));
}

template <class S>
std::vector<HoloPoly<S>> apply_matrix(const Matrix<S>& m, const std::vector<HoloPoly<S>>& f) {
  if (m.cols() != f.size()) throw PreconditionError("matrix and jet dimensions differ");
  const int n = f.empty() ? 0 : f.front().num_vars();
  std::vector<HoloPoly<S>> out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if constexpr (is_exact_v<S>) {
      std::vector<std::pair<Exact, const HoloPoly<Exact>*>> terms;
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (!is_zero(m(i, j))) terms.emplace_back(m(i, j), &f[j]);
      out.push_back(linear_combination_scaled(n, terms));
      continue;
    }
    HoloPoly<S> acc(n);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (is_zero(m(i, j))) continue;
      acc += f[j] * m(i, j);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

namespace {

// Coefficient rescaled by a shared denominator and split as p + q sqrt2 with
// p, q Gaussian integers; q is stored doubled for the q conj(q') term.
struct ScaledCoeff {
  std::size_t index;
  mpz_class pr, pi, qr, qi, qr2, qi2;
};

BidegPoly<Exact> squared_norm_scaled(const std::vector<HoloPoly<Exact>>& f, const std::vector<int>& signs, int d,
                                     const std::vector<Exponent>& kept,
                                     const std::map<Exponent, std::size_t, GradedLex>& index) {
  mpz_class den = 1;
  for (const auto& comp : f)
    for (const auto& [e, c] : comp.terms()) {
      if (total_degree(e) > d) break;
      for (const mpq_class* part : {&c.re(), &c.im(), &c.re_s2(), &c.im_s2()})
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), part->get_den_mpz_t());
    }
  auto scaled = [&](const mpq_class& q) { return mpz_class(q.get_num() * (den / q.get_den())); };
  const std::size_t m = kept.size();
  // Upper triangle only; the lower half is the conjugate.
  std::vector<std::array<mpz_class, 4>> grid(m * m);
  std::vector<ScaledCoeff> row;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto& comp = f[k];
    row.clear();
    for (const auto& [e, c] : comp.terms()) {
      if (total_degree(e) > d) break;
      ScaledCoeff s{index.at(e), scaled(c.re()), scaled(c.im()), scaled(c.re_s2()), scaled(c.im_s2()), 0, 0};
      s.qr2 = 2 * s.qr;
      s.qi2 = 2 * s.qi;
      row.push_back(std::move(s));
    }
    std::sort(row.begin(), row.end(), [](const ScaledCoeff& a, const ScaledCoeff& b) { return a.index < b.index; });
    const bool negate = signs[k] < 0;
    for (std::size_t a = 0; a < row.size(); ++a) {
      ScaledCoeff x = row[a];
      if (negate) {
        x.pr = -x.pr;
        x.pi = -x.pi;
        x.qr = -x.qr;
        x.qi = -x.qi;
      }
      for (std::size_t b = a; b < row.size(); ++b) {
        const ScaledCoeff& y = row[b];
        auto& cell = grid[x.index * m + y.index];
        mpz_ptr out[4] = {cell[0].get_mpz_t(), cell[1].get_mpz_t(), cell[2].get_mpz_t(), cell[3].get_mpz_t()};
        // x conj(y) = p conj(p') + 2 q conj(q') + (p conj(q') + q conj(p')) sqrt2
        mpz_addmul(out[0], x.pr.get_mpz_t(), y.pr.get_mpz_t());
        mpz_addmul(out[0], x.pi.get_mpz_t(), y.pi.get_mpz_t());
        mpz_addmul(out[0], x.qr.get_mpz_t(), y.qr2.get_mpz_t());
        mpz_addmul(out[0], x.qi.get_mpz_t(), y.qi2.get_mpz_t());
        mpz_addmul(out[1], x.pi.get_mpz_t(), y.pr.get_mpz_t());
        mpz_submul(out[1], x.pr.get_mpz_t(), y.pi.get_mpz_t());
        mpz_addmul(out[1], x.qi.get_mpz_t(), y.qr2.get_mpz_t());
        mpz_submul(out[1], x.qr.get_mpz_t(), y.qi2.get_mpz_t());
        mpz_addmul(out[2], x.pr.get_mpz_t(), y.qr.get_mpz_t());
        mpz_addmul(out[2], x.pi.get_mpz_t(), y.qi.get_mpz_t());
        mpz_addmul(out[2], x.qr.get_mpz_t(), y.pr.get_mpz_t());
        mpz_addmul(out[2], x.qi.get_mpz_t(), y.pi.get_mpz_t());
        mpz_addmul(out[3], x.pi.get_mpz_t(), y.qr.get_mpz_t());
        mpz_submul(out[3], x.pr.get_mpz_t(), y.qi.get_mpz_t());
        mpz_addmul(out[3], x.qi.get_mpz_t(), y.pr.get_mpz_t());
        mpz_submul(out[3], x.qr.get_mpz_t(), y.pi.get_mpz_t());
      }
    }
  }
  const mpz_class den2 = den * den;
  auto ratio = [&](const mpz_class& num) {
    mpq_class q(num, den2);
    q.canonicalize();
    return q;
  };
  BidegPoly<Exact> out(f.front().num_vars());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const auto& cell = grid[i * m + j];
      if (cell[0] == 0 && cell[1] == 0 && cell[2] == 0 && cell[3] == 0) continue;
      const Exact value(ratio(cell[0]), ratio(cell[1]), ratio(cell[2]), ratio(cell[3]));
      out.add_term(kept[i], kept[j], value);
      if (j != i) out.add_term(kept[j], kept[i], value.conj());
    }
  return out;
}

}  // namespace

template <class S>
BidegPoly<S> signed_squared_norm(const std::vector<HoloPoly<S>>& f, const std::vector<int>& signs, int d) {
  if (f.empty()) throw PreconditionError("squared norm of an empty map");
  if (signs.size() != f.size()) throw PreconditionError("one sign per component");
  const int n = f.front().num_vars();
  // Accumulate on a dense monomial grid first; map insertion per product is
  // the bottleneck otherwise.
  std::vector<Exponent> basis = monomial_support(f);
  std::vector<Exponent> kept;
  for (const auto& e : basis)
    if (total_degree(e) <= d) kept.push_back(e);
  std::map<Exponent, std::size_t, GradedLex> index;
  for (std::size_t i = 0; i < kept.size(); ++i) index.emplace(kept[i], i);
  const std::size_t m = kept.size();
  if constexpr (is_exact_v<S>) {
    return squared_norm_scaled(f, signs, d, kept, index);
  }
  std::vector<S> grid(m * m, S(0));
  std::vector<std::pair<std::size_t, S>> row;
  for (std::size_t k = 0; k < f.size(); ++k) {
    row.clear();
    for (const auto& [e, c] : f[k].terms()) {
      if (total_degree(e) > d) break;
      row.emplace_back(index.at(e), c);
    }
    const S sign(signs[k] < 0 ? -1 : 1);
    for (const auto& [i, ci] : row)
      for (const auto& [j, cj] : row) grid[i * m + j] += sign * ci * conjugate(cj);
  }
  BidegPoly<S> out(n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (!is_zero(grid[i * m + j])) out.add_term(kept[i], kept[j], grid[i * m + j]);
  return out;
}

template <class S>
BidegPoly<S> squared_norm(const std::vector<HoloPoly<S>>& f, int d) {
  return signed_squared_norm(f, std::vector<int>(f.size(), 1), d);
}

template <class S>
BidegPoly<S> log_truncate(const BidegPoly<S>& p, int d) {
  const int n = p.num_vars();
  const S c0 = p.coefficient(Exponent(n, 0), Exponent(n, 0));
  if constexpr (is_exact_v<S>) {
    if (!(c0 == S(1))) throw PreconditionError("log_truncate needs constant term 1");
  } else {
    if (std::abs(c0 - 1.0) > 1e-12) throw PreconditionError("log_truncate needs constant term 1");
  }
  BidegPoly<S> x = p.truncated_total(d) - BidegPoly<S>::constant(n, c0);
  BidegPoly<S> out(n);
  BidegPoly<S> power = x;
  for (int k = 1; k <= d && !power.is_zero(); ++k) {
    BidegPoly<S> term = power;
    term *= from_rational<S>(k % 2 == 1 ? 1 : -1, k);
    out += term;
    power = multiply_truncated(power, x, d);
  }
  return out;
}

template <class S>
BidegPoly<S> ball_kernel_power(int n, int k) {
  if (n < 1 || k < 0) throw PreconditionError("ball kernel needs n >= 1 and k >= 0");
  BidegPoly<S> base = BidegPoly<S>::constant(n, S(1));
  for (int j = 0; j < n; ++j) base.add_term(unit_exponent(n, j), unit_exponent(n, j), S(-1));
  BidegPoly<S> out = BidegPoly<S>::constant(n, S(1));
  for (int i = 0; i < k; ++i) out = out * base;
  return out;
}

template <class S>
std::vector<Exponent> monomial_support(const std::vector<HoloPoly<S>>& polys) {
  std::map<Exponent, int, GradedLex> seen;
  for (const auto& p : polys)
    for (const auto& [e, c] : p.terms()) seen.emplace(e, 0);
  std::vector<Exponent> out;
  for (const auto& [e, _] : seen) out.push_back(e);
  return out;
}

template <class S>
Matrix<S> coefficient_matrix(const std::vector<HoloPoly<S>>& polys, const std::vector<Exponent>& basis) {
  std::map<Exponent, std::size_t, GradedLex> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], i);
  Matrix<S> out(polys.size(), basis.size());
  for (std::size_t r = 0; r < polys.size(); ++r)
    for (const auto& [e, c] : polys[r].terms()) {
      auto it = index.find(e);
      if (it == index.end()) throw PreconditionError("monomial missing from basis");
      out(r, it->second) = c;
    }
  return out;
}

template <class S>
double max_coefficient_difference(const std::vector<HoloPoly<S>>& a, const std::vector<HoloPoly<S>>& b) {
  if (a.size() != b.size()) throw PreconditionError("component count mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, (a[i] - b[i]).max_abs_coefficient());
  return best;
}

#define HISOM_INSTANTIATE(S)                                                                               \
  template class HoloPoly<S>;                                                                              \
  template class BidegPoly<S>;                                                                             \
  template class PolarizedPoly<S>;                                                                         \
  template class JetMap<S>;                                                                                \
  template HoloPoly<S> multiply_truncated(const HoloPoly<S>&, const HoloPoly<S>&, int);                    \
  template BidegPoly<S> multiply_truncated(const BidegPoly<S>&, const BidegPoly<S>&, int);                 \
  template std::vector<HoloPoly<S>> substitute(const std::vector<HoloPoly<S>>&, const JetMap<S>&, int);    \
  template JetMap<S> compose_truncate(const JetMap<S>&, const JetMap<S>&, int);                            \
  template std::vector<HoloPoly<S>> apply_matrix(const Matrix<S>&, const std::vector<HoloPoly<S>>&);       \
  template BidegPoly<S> squared_norm(const std::vector<HoloPoly<S>>&, int);                                \
  template BidegPoly<S> signed_squared_norm(const std::vector<HoloPoly<S>>&, const std::vector<int>&, int);                                \
  template BidegPoly<S> log_truncate(const BidegPoly<S>&, int);                                            \
  template BidegPoly<S> ball_kernel_power(int, int);                                                       \
  template std::vector<Exponent> monomial_support(const std::vector<HoloPoly<S>>&);                        \
  template Matrix<S> coefficient_matrix(const std::vector<HoloPoly<S>>&, const std::vector<Exponent>&);    \
  template double max_coefficient_difference(const std::vector<HoloPoly<S>>&, const std::vector<HoloPoly<S>>&);

HISOM_INSTANTIATE(Exact)
HISOM_INSTANTIATE(Complex)

}  // namespace hisom
