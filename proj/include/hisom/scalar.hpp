#pragma once

#include <gmpxx.h>

#include <complex>
#include <concepts>
#include <string>
#include <type_traits>

namespace hisom {

using Complex = std::complex<double>;

// Element of Q(i, sqrt2), stored as (re + i*im) + (re_s2 + i*im_s2) * sqrt2.
// Big enough for every exact coefficient that shows up in the canonical
// isometries (the 1/sqrt2 and sqrt2 scalings) and closed under the rational
// unitary constructions used downstream.
class Exact {
 public:
  Exact() = default;
  Exact(long value) : re_(value) {}  // NOLINT(google-explicit-constructor)
  explicit Exact(mpq_class re, mpq_class im = 0, mpq_class re_s2 = 0, mpq_class im_s2 = 0);

  static Exact rational(long num, long den);
  static Exact imag_unit();
  static Exact sqrt2();
  // Parses "a/b" strings for each of the four rational parts.
  static Exact parse(const std::string& re, const std::string& im, const std::string& re_s2 = "0",
                     const std::string& im_s2 = "0");

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }
  const mpq_class& re_s2() const { return re_s2_; }
  const mpq_class& im_s2() const { return im_s2_; }

  bool is_zero() const;
  bool has_sqrt2_part() const;
  Exact conj() const;
  Exact inverse() const;
  Complex to_complex() const;
  std::string to_string() const;

  Exact& operator+=(const Exact& o);
  Exact& operator-=(const Exact& o);
  Exact& operator*=(const Exact& o);
  Exact& operator/=(const Exact& o);

  friend Exact operator+(Exact a, const Exact& b) { return a += b; }
  friend Exact operator-(Exact a, const Exact& b) { return a -= b; }
  friend Exact operator*(Exact a, const Exact& b) { return a *= b; }
  friend Exact operator/(Exact a, const Exact& b) { return a /= b; }
  friend Exact operator-(Exact a);
  friend bool operator==(const Exact& a, const Exact& b);

 private:
  mpq_class re_{0}, im_{0}, re_s2_{0}, im_s2_{0};
};

template <class S>
concept ScalarType = std::same_as<S, Exact> || std::same_as<S, Complex>;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Exact>;

inline Exact conjugate(const Exact& x) { return x.conj(); }
inline Complex conjugate(const Complex& x) { return std::conj(x); }

inline Complex to_complex(const Exact& x) { return x.to_complex(); }
inline Complex to_complex(const Complex& x) { return x; }

inline double magnitude(const Exact& x) { return x.is_zero() ? 0.0 : std::abs(x.to_complex()); }
inline double magnitude(const Complex& x) { return std::abs(x); }

inline bool is_zero(const Exact& x) { return x.is_zero(); }
inline bool is_zero(const Complex& x) { return x == Complex{}; }

template <ScalarType S>
S from_rational(long num, long den = 1) {
  if constexpr (is_exact_v<S>) {
    return Exact::rational(num, den);
  } else {
    return Complex(static_cast<double>(num) / static_cast<double>(den), 0.0);
  }
}

template <ScalarType S>
S sqrt2_value() {
  if constexpr (is_exact_v<S>) {
    return Exact::sqrt2();
  } else {
    return Complex(std::sqrt(2.0), 0.0);
  }
}

template <ScalarType S>
S imag_unit() {
  if constexpr (is_exact_v<S>) {
    return Exact::imag_unit();
  } else {
    return Complex(0.0, 1.0);
  }
}

// Twice the real part, kept in S so exact arithmetic never needs to split
// off the real component.
template <ScalarType S>
S twice_real(const S& x) {
  return x + conjugate(x);
}

template <ScalarType S>
const char* mode_name() {
  return is_exact_v<S> ? "exact" : "float";
}

}  // namespace hisom
