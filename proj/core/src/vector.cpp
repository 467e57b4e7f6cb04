#include "treeshift/vector.hpp"

#include <sstream>
#include <stdexcept>

namespace treeshift {

void FiniteVector::accumulate(const RationalComplex& scale, const FiniteVector& g) {
  if (scale.is_zero()) return;
  for (const auto& [addr, coeff] : g.support_) {
    RationalComplex c = at(addr) + scale * coeff;
    set(addr, c);
  }
}

std::string FiniteVector::str() const {
  std::string out;
  for (const auto& [addr, coeff] : support_) {
    out += addr.str();
    out += ' ';
    out += coeff.str();
    out += '\n';
  }
  return out;
}

FiniteVector FiniteVector::parse(std::string_view text) {
  FiniteVector f;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string addr, re, im;
    if (!(ls >> addr >> re >> im))
      throw std::invalid_argument("FiniteVector: bad line '" + line + "'");
    VertexAddr u = VertexAddr::parse(addr);
    RationalComplex c{Rational::parse(re), Rational::parse(im)};
    if (c.is_zero()) throw std::invalid_argument("FiniteVector: zero coefficient stored");
    if (f.support_.count(u)) throw std::invalid_argument("FiniteVector: duplicate address");
    f.set(u, c);
  }
  return f;
}

}  // namespace treeshift
