#include "hisom/scalar.hpp"

#include <cmath>
#include <stdexcept>

#include "hisom/errors.hpp"

namespace hisom {

namespace {

bool q_zero(const mpq_class& q) { return mpq_sgn(q.get_mpq_t()) == 0; }

mpq_class parse_rational(const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0) throw PreconditionError("malformed rational: '" + text + "'");
  if (mpz_sgn(q.get_den_mpz_t()) == 0) throw PreconditionError("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

// (a + bi) * (c + di)
void gauss_mul(const mpq_class& a, const mpq_class& b, const mpq_class& c, const mpq_class& d,
               mpq_class& re, mpq_class& im) {
  if (q_zero(b) && q_zero(d)) {
    re = a * c;
    im = 0;
    return;
  }
  re = a * c - b * d;
  im = a * d + b * c;
}

std::string join_part(const mpq_class& plain, const mpq_class& s2) {
  std::string out;
  if (!q_zero(plain)) out = plain.get_str();
  if (!q_zero(s2)) {
    std::string t = s2.get_str() + "*sqrt2";
    if (out.empty()) {
      out = t;
    } else {
      out += (t[0] == '-' ? "" : "+") + t;
    }
  }
  return out;
}

}  // namespace

Exact::Exact(mpq_class re, mpq_class im, mpq_class re_s2, mpq_class im_s2)
    : re_(std::move(re)), im_(std::move(im)), re_s2_(std::move(re_s2)), im_s2_(std::move(im_s2)) {
  re_.canonicalize();
  im_.canonicalize();
  re_s2_.canonicalize();
  im_s2_.canonicalize();
}

Exact Exact::rational(long num, long den) {
  if (den == 0) throw PreconditionError("zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  return Exact(q);
}

Exact Exact::imag_unit() { return Exact(0, 1); }
Exact Exact::sqrt2() { return Exact(0, 0, 1); }

Exact Exact::parse(const std::string& re, const std::string& im, const std::string& re_s2,
                   const std::string& im_s2) {
  return Exact(parse_rational(re), parse_rational(im), parse_rational(re_s2), parse_rational(im_s2));
}

bool Exact::is_zero() const { return q_zero(re_) && q_zero(im_) && q_zero(re_s2_) && q_zero(im_s2_); }

bool Exact::has_sqrt2_part() const { return !q_zero(re_s2_) || !q_zero(im_s2_); }

Exact Exact::conj() const {
  Exact out = *this;
  out.im_ = -out.im_;
  out.im_s2_ = -out.im_s2_;
  return out;
}

Exact Exact::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero in Q(i,sqrt2)");
  // x = u + v*sqrt2 with u, v Gaussian; x * (u - v*sqrt2) = u^2 - 2 v^2 =: g.
  mpq_class g_re, g_im;
  {
    mpq_class uu_re, uu_im, vv_re, vv_im;
    gauss_mul(re_, im_, re_, im_, uu_re, uu_im);
    gauss_mul(re_s2_, im_s2_, re_s2_, im_s2_, vv_re, vv_im);
    g_re = uu_re - 2 * vv_re;
    g_im = uu_im - 2 * vv_im;
  }
  mpq_class norm = g_re * g_re + g_im * g_im;
  mpq_class inv_re = g_re / norm;
  mpq_class inv_im = -g_im / norm;
  Exact partner(re_, im_, -re_s2_, -im_s2_);
  return partner * Exact(inv_re, inv_im);
}

Complex Exact::to_complex() const {
  const double s = std::sqrt(2.0);
  return {re_.get_d() + s * re_s2_.get_d(), im_.get_d() + s * im_s2_.get_d()};
}

std::string Exact::to_string() const {
  std::string real = join_part(re_, re_s2_);
  std::string imag = join_part(im_, im_s2_);
  if (imag.empty()) return real.empty() ? "0" : real;
  std::string i_part = "(" + imag + ")*i";
  if (real.empty()) return i_part;
  return real + "+" + i_part;
}

Exact& Exact::operator+=(const Exact& o) {
  re_ += o.re_;
  if (!q_zero(o.im_)) im_ += o.im_;
  if (!q_zero(o.re_s2_)) re_s2_ += o.re_s2_;
  if (!q_zero(o.im_s2_)) im_s2_ += o.im_s2_;
  return *this;
}

Exact& Exact::operator-=(const Exact& o) {
  re_ -= o.re_;
  if (!q_zero(o.im_)) im_ -= o.im_;
  if (!q_zero(o.re_s2_)) re_s2_ -= o.re_s2_;
  if (!q_zero(o.im_s2_)) im_s2_ -= o.im_s2_;
  return *this;
}

Exact& Exact::operator*=(const Exact& o) {
  const bool s2a = has_sqrt2_part();
  const bool s2b = o.has_sqrt2_part();
  if (!s2a && !s2b) {
    if (q_zero(im_) && q_zero(o.im_)) {
      re_ *= o.re_;
      return *this;
    }
    mpq_class r, i;
    gauss_mul(re_, im_, o.re_, o.im_, r, i);
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  // (x + y s)(u + w s) = (xu + 2yw) + (xw + yu) s
  mpq_class xu_r, xu_i, yw_r, yw_i, xw_r, xw_i, yu_r, yu_i;
  gauss_mul(re_, im_, o.re_, o.im_, xu_r, xu_i);
  gauss_mul(re_s2_, im_s2_, o.re_s2_, o.im_s2_, yw_r, yw_i);
  gauss_mul(re_, im_, o.re_s2_, o.im_s2_, xw_r, xw_i);
  gauss_mul(re_s2_, im_s2_, o.re_, o.im_, yu_r, yu_i);
  re_ = xu_r + 2 * yw_r;
  im_ = xu_i + 2 * yw_i;
  re_s2_ = xw_r + yu_r;
  im_s2_ = xw_i + yu_i;
  return *this;
}

Exact& Exact::operator/=(const Exact& o) { return *this *= o.inverse(); }

Exact operator-(Exact a) {
  a.re_ = -a.re_;
  a.im_ = -a.im_;
  a.re_s2_ = -a.re_s2_;
  a.im_s2_ = -a.im_s2_;
  return a;
}

bool operator==(const Exact& a, const Exact& b) {
  return a.re_ == b.re_ && a.im_ == b.im_ && a.re_s2_ == b.re_s2_ && a.im_s2_ == b.im_s2_;
}

}  // namespace hisom
