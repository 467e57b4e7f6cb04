#pragma once

// Finitely supported functions on the vertex set, with exact complex
// rational coefficients. Stored coefficients are never zero; absent
// addresses mean zero.
//
// Line format (one support vertex per line):
//   <address> <re_num>/<re_den> <im_num>/<im_den>

#include <map>
#include <string>
#include <string_view>

#include "treeshift/address.hpp"
#include "treeshift/rational.hpp"

namespace treeshift {

struct RationalComplex {
  Rational re;
  Rational im;

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  Rational abs_sq() const { return re.sq() + im.sq(); }

  RationalComplex& operator+=(const RationalComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend RationalComplex operator+(RationalComplex a, const RationalComplex& b) {
    return a += b;
  }
  friend RationalComplex operator*(const RationalComplex& a, const RationalComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const RationalComplex&, const RationalComplex&) = default;

  std::string str() const { return re.str() + " " + im.str(); }
};

class FiniteVector {
 public:
  FiniteVector() = default;

  static FiniteVector basis(const VertexAddr& u) {
    FiniteVector f;
    f.set(u, {Rational(1), Rational(0)});
    return f;
  }

  void set(const VertexAddr& u, const RationalComplex& c) {
    if (c.is_zero())
      support_.erase(u);
    else
      support_[u] = c;
  }
  RationalComplex at(const VertexAddr& u) const {
    auto it = support_.find(u);
    return it == support_.end() ? RationalComplex{} : it->second;
  }

  bool empty() const { return support_.empty(); }
  std::size_t size() const { return support_.size(); }
  const std::map<VertexAddr, RationalComplex>& support() const { return support_; }

  // f += scale * g
  void accumulate(const RationalComplex& scale, const FiniteVector& g);

  friend bool operator==(const FiniteVector&, const FiniteVector&) = default;

  std::string str() const;
  static FiniteVector parse(std::string_view text);  // throws std::invalid_argument

 private:
  std::map<VertexAddr, RationalComplex> support_;
};

}  // namespace treeshift
