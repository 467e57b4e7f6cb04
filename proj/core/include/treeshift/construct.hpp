#pragma once

// The four weight-family constructions, as deterministic lazy oracles with
// exact closed-form tails.
//
// All of them pin the same two free choices the same way: a prescribed child
// budget S is split geometrically (child j gets S * 2^-j), and wherever a
// "small enough" integer n is called for, the smallest admissible one is
// taken. That fixes a unique family per spec string, so weight dumps and
// certificates are reproducible byte for byte.
//
// SquareTrivial  children of v split 1/lambda^2(v), so
//                (sum of children's lambda^2) * lambda^2(v) = 1 everywhere.
// Hyponormal     same identity, but through the schedule
//                r_j = 1/(rn) for j <= n-1, r_j = 1/(rn*2^(j-n+1)) for j >= n,
//                n = max(2, ceil(1/r^2)), which also keeps
//                sum of lambda^4 over children <= 1 and all weights in (0,1).
// NonHyponormal  generation 1 splits geometrically; generation 2 realizes,
//                below the j-th child, a sequence summing to alpha^2 = 2^j/theta
//                whose first term is alpha^2*(1-delta), delta = min(1,1/alpha^2)/2,
//                making single child terms lambda^4/(1+lambda^2) unbounded
//                across branches; deeper generations are geometric again.
// Perturbed      one weight replaced by 1 + zeta^2(v0); everything else kept.
//
// Rootless variants put lambda^2 = 1/2 on every spine vertex u_k; the branch
// children of a spine vertex get (3/2) * 2^-(j-1) and their subtrees recurse
// with the rooted rule.

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "treeshift/rational.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/weight_family.hpp"

namespace treeshift {

enum class ConstructionMode { SquareTrivial, Hyponormal, NonHyponormal, Perturbed };

std::string_view to_string(ConstructionMode mode);

struct ConstructionSpec {
  ConstructionMode mode = ConstructionMode::SquareTrivial;
  bool rooted = true;
  std::optional<Rational> theta;      // root seed; rooted modes only, default 1/1
  std::optional<VertexAddr> perturb_at;  // v0; Perturbed only

  // "mode=<sqtrivial|hypo|nonhypo|perturb>;rooted=<0|1>;theta=<p/q>;v0=<addr>"
  static ConstructionSpec parse(std::string_view text);  // throws std::invalid_argument
  std::string str() const;  // canonical reprint
};

struct Construction {
  std::shared_ptr<const TreeModel> tree;
  std::shared_ptr<const WeightFamily> family;
  ConstructionSpec spec;
};

// Validates the spec and instantiates tree + family.
Construction build(const ConstructionSpec& spec);  // throws std::invalid_argument

// The individual builders.
std::shared_ptr<const WeightFamily> build_square_trivial_rooted(const Rational& theta);
std::shared_ptr<const WeightFamily> build_square_trivial_rootless();
std::shared_ptr<const WeightFamily> build_hyponormal_rooted(const Rational& theta);
std::shared_ptr<const WeightFamily> build_hyponormal_rootless();
std::shared_ptr<const WeightFamily> build_non_hyponormal(const Rational& theta);
std::shared_ptr<const WeightFamily> build_perturbed(std::shared_ptr<const WeightFamily> base,
                                                    const VertexAddr& v0);

}  // namespace treeshift
