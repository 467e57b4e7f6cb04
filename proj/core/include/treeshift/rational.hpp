#pragma once

// Exact rational scalar used throughout the library.
//
// Values are kept factored as frac * 2^exp2, where frac is a canonical GMP
// rational with odd numerator and odd denominator. The weight families
// produced by the constructions attach factors like 2^-j to the j-th child,
// and the divergence certificates walk child indices up to 10^6; keeping the
// power of two as a machine exponent makes every such value O(1)-sized where
// a plain rational would need j bits.
//
// The string form is always "num/den" in lowest terms (materialized), which
// is the exchange format of weight dumps, vectors and certificates.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace treeshift {

class Rational {
 public:
  Rational() : frac_(0), exp2_(0) {}
  Rational(long num) : frac_(num), exp2_(0) { normalize(); }           // NOLINT: implicit
  Rational(long num, long den);
  explicit Rational(const mpq_class& q) : frac_(q), exp2_(0) { normalize(); }

  static Rational pow2(std::int64_t e);
  static Rational parse(std::string_view text);  // "num", "num/den"; throws std::invalid_argument

  bool is_zero() const { return sgn(frac_) == 0; }
  int sign() const { return sgn(frac_); }

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);  // throws std::domain_error on zero divisor
  Rational operator-() const;

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  // In-place multiplication by 2^e: the cheap operation everything leans on.
  Rational& mul_pow2(std::int64_t e);

  Rational reciprocal() const;  // throws std::domain_error on zero
  Rational sq() const { return *this * *this; }
  Rational abs() const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.exp2_ == b.exp2_ && a.frac_ == b.frac_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    return c < 0 ? std::strong_ordering::less
                 : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }
  static int cmp(const Rational& a, const Rational& b);

  // Materializes the exponent. Cheap for the exponents that reach
  // serialization; throws std::overflow_error past kMaxMaterializeBits.
  mpq_class to_mpq() const;
  std::string str() const;  // "num/den", lowest terms, den >= 1

  std::int64_t exp2() const { return exp2_; }
  const mpq_class& frac() const { return frac_; }

  static constexpr std::int64_t kMaxMaterializeBits = std::int64_t{1} << 24;

 private:
  void normalize();

  mpq_class frac_;     // canonical; odd num and den unless zero
  std::int64_t exp2_;  // value = frac_ * 2^exp2_; 0 when frac_ is 0
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

// A rational extended with +infinity, for tail sums and zeta values of
// families that are not summable at some vertex.
class ExtRational {
 public:
  ExtRational() : finite_(true) {}
  ExtRational(Rational v) : finite_(true), value_(std::move(v)) {}  // NOLINT: implicit
  static ExtRational infinity() {
    ExtRational e;
    e.finite_ = false;
    return e;
  }

  bool is_finite() const { return finite_; }
  const Rational& value() const;  // throws std::domain_error when infinite

  // Allocation-free setters for cursor hot loops.
  void assign_finite(const Rational& r) {
    finite_ = true;
    value_ = r;
  }
  void assign_infinite() { finite_ = false; }

  ExtRational& operator+=(const ExtRational& o);
  friend ExtRational operator+(ExtRational a, const ExtRational& b) { return a += b; }
  // Scaling by a *positive* rational; scaling infinity by zero is a caller
  // bug (the 0*inf convention is applied where f(u) = 0, before any scaling).
  ExtRational& operator*=(const Rational& s);
  friend ExtRational operator*(ExtRational a, const Rational& s) { return a *= s; }

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  bool operator==(const Rational& r) const { return finite_ && value_ == r; }
  bool exceeds(const Rational& r) const { return !finite_ || value_ > r; }

  std::string str() const { return finite_ ? value_.str() : "inf"; }

 private:
  bool finite_;
  Rational value_;
};

std::ostream& operator<<(std::ostream& os, const ExtRational& r);

}  // namespace treeshift
