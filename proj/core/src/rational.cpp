#include "treeshift/rational.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace treeshift {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Rational exponent overflow");
  return r;
}

// Bit length of |z|; 0 for z == 0.
std::int64_t bit_length(const mpz_class& z) {
  if (sgn(z) == 0) return 0;
  return static_cast<std::int64_t>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

}  // namespace

Rational::Rational(long num, long den) : frac_(num, den), exp2_(0) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  frac_.canonicalize();
  normalize();
}

Rational Rational::pow2(std::int64_t e) {
  Rational r(1);
  r.exp2_ = e;
  return r;
}

void Rational::normalize() {
  if (sgn(frac_) == 0) {
    exp2_ = 0;
    return;
  }
  mpz_class& num = frac_.get_num();
  mpz_class& den = frac_.get_den();
  auto vn = static_cast<std::int64_t>(mpz_scan1(num.get_mpz_t(), 0));
  if (vn > 0) mpz_tdiv_q_2exp(num.get_mpz_t(), num.get_mpz_t(), vn);
  auto vd = static_cast<std::int64_t>(mpz_scan1(den.get_mpz_t(), 0));
  if (vd > 0) mpz_tdiv_q_2exp(den.get_mpz_t(), den.get_mpz_t(), vd);
  exp2_ = checked_add(exp2_, vn - vd);
}

Rational& Rational::operator+=(const Rational& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) {
    *this = o;
    return *this;
  }
  if (exp2_ == o.exp2_) {
    frac_ += o.frac_;
    normalize();
    return *this;
  }
  // Align to the smaller exponent: a*2^x + b*2^y = (a + b*2^(y-x)) * 2^x.
  if (exp2_ < o.exp2_) {
    mpq_class shifted = o.frac_;
    mpz_mul_2exp(shifted.get_num().get_mpz_t(), shifted.get_num().get_mpz_t(),
                 static_cast<mp_bitcnt_t>(o.exp2_ - exp2_));
    frac_ += shifted;
  } else {
    std::int64_t d = exp2_ - o.exp2_;
    mpz_mul_2exp(frac_.get_num().get_mpz_t(), frac_.get_num().get_mpz_t(),
                 static_cast<mp_bitcnt_t>(d));
    exp2_ = o.exp2_;
    frac_ += o.frac_;
  }
  frac_.canonicalize();
  normalize();
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  if (is_zero() || o.is_zero()) {
    frac_ = 0;
    exp2_ = 0;
    return *this;
  }
  frac_ *= o.frac_;
  exp2_ = checked_add(exp2_, o.exp2_);
  normalize();  // odd*odd stays odd, but gcd reduction is still wanted
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  if (is_zero()) return *this;
  frac_ /= o.frac_;
  exp2_ = checked_add(exp2_, -o.exp2_);
  normalize();
  return *this;
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.frac_ = -r.frac_;
  return r;
}

Rational& Rational::mul_pow2(std::int64_t e) {
  if (!is_zero()) exp2_ = checked_add(exp2_, e);
  return *this;
}

Rational Rational::reciprocal() const {
  if (is_zero()) throw std::domain_error("Rational: reciprocal of zero");
  Rational r;
  r.frac_ = 1 / frac_;
  r.exp2_ = -exp2_;
  return r;
}

Rational Rational::abs() const {
  Rational r = *this;
  if (sgn(r.frac_) < 0) r.frac_ = -r.frac_;
  return r;
}

int Rational::cmp(const Rational& a, const Rational& b) {
  int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa < sb ? -1 : 1;
  if (sa == 0) return 0;
  if (a.exp2_ == b.exp2_) return ::cmp(a.frac_, b.frac_);
  // |frac| lies in (2^(bl(num)-bl(den)-1), 2^(bl(num)-bl(den)+1)); when the
  // magnitude windows are disjoint the subtraction (which materializes the
  // exponent gap) can be skipped.
  auto key = [](const Rational& r) {
    return r.exp2_ + bit_length(r.frac_.get_num()) - bit_length(r.frac_.get_den());
  };
  std::int64_t ka = key(a), kb = key(b);
  if (ka + 1 < kb - 1) return sa > 0 ? -1 : 1;  // |a| < |b|
  if (kb + 1 < ka - 1) return sa > 0 ? 1 : -1;
  Rational d = a;
  d -= b;
  return d.sign();
}

mpq_class Rational::to_mpq() const {
  if (exp2_ == 0) return frac_;
  if (exp2_ > kMaxMaterializeBits || exp2_ < -kMaxMaterializeBits)
    throw std::overflow_error("Rational: exponent too large to materialize");
  mpq_class q = frac_;
  if (exp2_ > 0) {
    mpz_mul_2exp(q.get_num().get_mpz_t(), q.get_num().get_mpz_t(),
                 static_cast<mp_bitcnt_t>(exp2_));
  } else {
    mpz_mul_2exp(q.get_den().get_mpz_t(), q.get_den().get_mpz_t(),
                 static_cast<mp_bitcnt_t>(-exp2_));
  }
  return q;  // num odd or den odd, so already canonical
}

std::string Rational::str() const {
  mpq_class q = to_mpq();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational Rational::parse(std::string_view text) {
  auto slash = text.find('/');
  std::string num(text.substr(0, slash));
  std::string den = slash == std::string_view::npos ? "1" : std::string(text.substr(slash + 1));
  if (num.empty() || den.empty()) throw std::invalid_argument("Rational: empty component");
  mpq_class q;
  try {
    q = mpq_class(mpz_class(num), mpz_class(den));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("Rational: cannot parse '" + std::string(text) + "'");
  }
  if (sgn(q.get_den()) == 0) throw std::domain_error("Rational: zero denominator");
  q.canonicalize();
  return Rational(q);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

const Rational& ExtRational::value() const {
  if (!finite_) throw std::domain_error("ExtRational: value() on infinity");
  return value_;
}

ExtRational& ExtRational::operator+=(const ExtRational& o) {
  if (!finite_ || !o.finite_) {
    finite_ = false;
    value_ = Rational();
    return *this;
  }
  value_ += o.value_;
  return *this;
}

ExtRational& ExtRational::operator*=(const Rational& s) {
  if (!finite_) {
    if (s.is_zero()) throw std::domain_error("ExtRational: 0 * infinity has no value here");
    return *this;
  }
  value_ *= s;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const ExtRational& r) { return os << r.str(); }

}  // namespace treeshift
