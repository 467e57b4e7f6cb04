#include "treeshift/weight_family.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace treeshift {

Rational WeightFamily::weight_or_seed(const VertexAddr& v) const {
  if (!v.in_rootless_tree() && v.is_root()) {
    auto seed = root_seed();
    if (!seed) throw std::domain_error("WeightFamily: no weight at the root");
    return *seed;
  }
  return lambda_sq(v);
}

std::unique_ptr<ChildWeightCursor> WeightFamily::child_cursor(const VertexAddr& u) const {
  // Families with recurrences override; this generic cursor re-derives each
  // child from its address.
  struct Generic final : ChildWeightCursor {
    const WeightFamily& family;
    VertexAddr parent;
    std::int64_t j = 0;
    explicit Generic(const WeightFamily& f, VertexAddr u) : family(f), parent(std::move(u)) {}
    void next_into(ChildWeight& out) override {
      ++j;
      VertexAddr c = parent.child(j);
      out.lambda_sq = family.lambda_sq(c);
      out.zeta_sq = family.tail_sum_sq(c, 0);
    }
  };
  return std::make_unique<Generic>(*this, u);
}

void AddressChildCursor::next_into(ChildWeight& out) {
  ++j_;
  VertexAddr c = tree_.child(parent_, j_);
  out.lambda_sq = family_.lambda_sq(c);
  out.zeta_sq = family_.tail_sum_sq(c, 0);
}

ConstantWeightFamily::ConstantWeightFamily(Rational lambda_sq_value)
    : value_(std::move(lambda_sq_value)) {
  if (value_.sign() <= 0)
    throw std::invalid_argument("ConstantWeightFamily: weight must be positive");
}

Rational ConstantWeightFamily::lambda_sq(const VertexAddr& v) const {
  if (!v.in_rootless_tree() && v.is_root())
    throw std::domain_error("WeightFamily: root has no weight");
  return value_;
}

UserWeightFamily::UserWeightFamily(std::map<VertexAddr, std::vector<Rational>> explicit_children,
                                   std::map<VertexAddr, Rational> geometric_mass)
    : explicit_children_(std::move(explicit_children)),
      geometric_mass_(std::move(geometric_mass)) {
  for (const auto& [u, ws] : explicit_children_) {
    if (geometric_mass_.count(u))
      throw std::invalid_argument("UserWeightFamily: '" + u.str() +
                                  "' is both explicit and geometric");
    for (const Rational& w : ws)
      if (w.sign() <= 0) throw std::invalid_argument("UserWeightFamily: weights must be positive");
  }
  for (const auto& [u, mass] : geometric_mass_)
    if (mass.sign() <= 0) throw std::invalid_argument("UserWeightFamily: mass must be positive");
}

UserWeightFamily::Kind UserWeightFamily::classify(const VertexAddr& u, Rational* mass) const {
  if (explicit_children_.count(u)) return Kind::Explicit;
  auto it = geometric_mass_.find(u);
  if (it != geometric_mass_.end()) {
    if (mass) *mass = it->second;
    return Kind::Geometric;
  }
  // Below a geometric continuation the reciprocal rule applies: children of
  // v split 1/lambda^2(v) geometrically.
  for (VertexAddr at = u; !at.is_root();) {
    at = *at.parent();
    if (geometric_mass_.count(at)) {
      if (mass) *mass = lambda_sq(u).reciprocal();
      return Kind::Geometric;
    }
    if (explicit_children_.count(at)) break;
  }
  return Kind::Unknown;
}

Rational UserWeightFamily::lambda_sq(const VertexAddr& v) const {
  if (v.in_rootless_tree()) throw std::invalid_argument("UserWeightFamily: rooted addresses only");
  if (v.is_root()) throw std::domain_error("WeightFamily: root has no weight");
  VertexAddr p = *v.parent();
  std::int64_t j = v.index_in_parent();
  auto it = explicit_children_.find(p);
  if (it != explicit_children_.end()) {
    if (j > static_cast<std::int64_t>(it->second.size()))
      throw std::out_of_range("UserWeightFamily: no weight for '" + v.str() + "'");
    return it->second[static_cast<std::size_t>(j - 1)];
  }
  Rational mass;
  if (classify(p, &mass) != Kind::Geometric)
    throw std::out_of_range("UserWeightFamily: no weight for '" + v.str() + "'");
  return mass.mul_pow2(-j);
}

ExtRational UserWeightFamily::tail_sum_sq(const VertexAddr& u, std::int64_t m) const {
  if (m < 0) throw std::invalid_argument("tail_sum_sq: negative cut");
  auto it = explicit_children_.find(u);
  if (it != explicit_children_.end()) {
    Rational s(0);
    for (std::size_t j = static_cast<std::size_t>(m); j < it->second.size(); ++j)
      s += it->second[j];
    return s;
  }
  Rational mass;
  if (classify(u, &mass) != Kind::Geometric)
    throw std::out_of_range("UserWeightFamily: no tail data at '" + u.str() + "'");
  return mass.mul_pow2(-m);  // sum_{j>m} M*2^-j = M*2^-m
}

ExtRational UserWeightFamily::tail_sum_quartic(const VertexAddr& u, std::int64_t m) const {
  if (m < 0) throw std::invalid_argument("tail_sum_quartic: negative cut");
  auto it = explicit_children_.find(u);
  if (it != explicit_children_.end()) {
    Rational s(0);
    for (std::size_t j = static_cast<std::size_t>(m); j < it->second.size(); ++j)
      s += it->second[j].sq();
    return s;
  }
  Rational mass;
  if (classify(u, &mass) != Kind::Geometric)
    throw std::out_of_range("UserWeightFamily: no tail data at '" + u.str() + "'");
  // sum_{j>m} M^2*4^-j = M^2 * 4^-m / 3
  return (mass.sq() / Rational(3)).mul_pow2(-2 * m);
}

std::optional<ExtRational> UserWeightFamily::inner_tail(const VertexAddr& u,
                                                        std::int64_t m) const {
  auto it = explicit_children_.find(u);
  if (it != explicit_children_.end()) {
    ExtRational s{Rational(0)};
    for (std::size_t j = static_cast<std::size_t>(m); j < it->second.size(); ++j) {
      ExtRational zeta = tail_sum_sq(u.child(static_cast<std::int64_t>(j + 1)), 0);
      s += zeta * it->second[j];
    }
    return s;
  }
  if (classify(u, nullptr) == Kind::Geometric)
    return ExtRational::infinity();  // each term is exactly 1, countably many children
  return std::nullopt;
}

std::optional<ExtRational> UserWeightFamily::criterion_tail(const VertexAddr& u,
                                                            std::int64_t m) const {
  auto it = explicit_children_.find(u);
  if (it != explicit_children_.end()) {
    Rational s(0);
    for (std::size_t j = static_cast<std::size_t>(m); j < it->second.size(); ++j) {
      ExtRational zeta = tail_sum_sq(u.child(static_cast<std::int64_t>(j + 1)), 0);
      if (!zeta.is_finite()) continue;  // lambda^2 / zeta^2 -> 0
      if (zeta.value().is_zero()) return std::nullopt;
      s += it->second[j] / zeta.value();
    }
    return s;
  }
  if (classify(u, nullptr) == Kind::Geometric) return tail_sum_quartic(u, m);
  return std::nullopt;
}

DumpWeightFamily::DumpWeightFamily(std::map<VertexAddr, Rational> weights)
    : weights_(std::move(weights)) {
  for (const auto& [v, w] : weights_)
    if (w.sign() <= 0) throw std::invalid_argument("DumpWeightFamily: weights must be positive");
}

Rational DumpWeightFamily::lambda_sq(const VertexAddr& v) const {
  auto it = weights_.find(v);
  if (it == weights_.end())
    throw std::out_of_range("DumpWeightFamily: '" + v.str() + "' outside the dumped window");
  return it->second;
}

ExtRational DumpWeightFamily::tail_sum_sq(const VertexAddr&, std::int64_t) const {
  throw std::out_of_range("DumpWeightFamily: window-only family has no tails");
}

ExtRational DumpWeightFamily::tail_sum_quartic(const VertexAddr&, std::int64_t) const {
  throw std::out_of_range("DumpWeightFamily: window-only family has no tails");
}

std::vector<VertexAddr> dump_window(const TreeModel& tree, std::int64_t depth,
                                    std::int64_t width) {
  if (depth < 0 || width < 1) throw std::invalid_argument("dump_window: bad parameters");
  VertexAddr base = tree.is_rooted() ? VertexAddr::root() : VertexAddr::rootless(depth);
  std::vector<VertexAddr> out;
  std::vector<VertexAddr> level{base};
  if (!tree.is_rooted()) out.push_back(base);
  for (std::int64_t d = 1; d <= depth; ++d) {
    std::vector<VertexAddr> next;
    for (const VertexAddr& u : level) {
      ChildCount n = tree.child_count(u);
      std::int64_t take = n ? std::min(width, *n) : width;
      for (std::int64_t j = 1; j <= take; ++j) next.push_back(tree.child(u, j));
    }
    std::sort(next.begin(), next.end());
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

std::string format_weight_dump(const TreeModel& tree, const WeightFamily& family,
                               std::int64_t depth, std::int64_t width) {
  std::string out;
  for (const VertexAddr& v : dump_window(tree, depth, width)) {
    out += v.str();
    out += ' ';
    out += family.lambda_sq(v).str();
    out += '\n';
  }
  return out;
}

DumpWeightFamily parse_weight_dump(std::string_view text) {
  std::map<VertexAddr, Rational> weights;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string addr, value;
    if (!(ls >> addr >> value))
      throw std::invalid_argument("weight dump: bad line '" + line + "'");
    auto [it, inserted] = weights.emplace(VertexAddr::parse(addr), Rational::parse(value));
    if (!inserted) throw std::invalid_argument("weight dump: duplicate address '" + addr + "'");
  }
  return DumpWeightFamily(std::move(weights));
}

}  // namespace treeshift
