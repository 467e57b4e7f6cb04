#pragma once

// Weight families: lazy oracles assigning each non-root vertex an exact
// positive rational squared weight, with exact closed-form tail sums.
//
// Everything is kept in the lambda^2 domain; lambda itself (a square root)
// is never materialized, and every identity checked downstream is polynomial
// in lambda^2. A family answers, for each vertex u and cut m:
//
//   tail_sum_sq(u, m)      = sum_{j>m} lambda^2 of child j of u
//   tail_sum_quartic(u, m) = sum_{j>m} lambda^4
//   inner_tail(u, m)       = sum_{j>m} zeta^2(child j) * lambda^2(child j)
//   criterion_tail(u, m)   = sum_{j>m} lambda^2(child j) / zeta^2(child j)
//
// where zeta^2(v) = tail_sum_sq(v, 0) is the squared norm of the shift image
// of the basis vector at v. The last two are optional: a family that has no
// closed form for them returns nullopt and the diagnostics fall back to
// transcript-based divergence hunting or report a precondition failure.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treeshift/address.hpp"
#include "treeshift/rational.hpp"
#include "treeshift/tree.hpp"

namespace treeshift {

struct ChildWeight {
  Rational lambda_sq;
  ExtRational zeta_sq;
};

// Streams the children of one vertex in index order. Family implementations
// supply O(1)-per-step recurrences; the divergence transcripts walk child
// indices up to 10^6 through this, so next_into reuses the caller's storage
// (GMP assignments keep their limb buffers).
class ChildWeightCursor {
 public:
  virtual ~ChildWeightCursor() = default;
  virtual void next_into(ChildWeight& out) = 0;
  ChildWeight next() {
    ChildWeight cw;
    next_into(cw);
    return cw;
  }
};

enum class DensityGuarantee {
  kAllVertices,  // construction-level guarantee, valid beyond any probe window
  kWindowOnly,
};

class WeightFamily {
 public:
  virtual ~WeightFamily() = default;

  // lambda^2 of a non-root vertex. Throws std::domain_error at a rooted root.
  virtual Rational lambda_sq(const VertexAddr& v) const = 0;
  virtual ExtRational tail_sum_sq(const VertexAddr& u, std::int64_t m) const = 0;
  virtual ExtRational tail_sum_quartic(const VertexAddr& u, std::int64_t m) const = 0;

  virtual std::optional<ExtRational> inner_tail(const VertexAddr& u, std::int64_t m) const {
    (void)u;
    (void)m;
    return std::nullopt;
  }
  virtual std::optional<ExtRational> criterion_tail(const VertexAddr& u, std::int64_t m) const {
    (void)u;
    (void)m;
    return std::nullopt;
  }

  virtual std::unique_ptr<ChildWeightCursor> child_cursor(const VertexAddr& u) const;

  // True when the construction guarantees zeta^2(v) * lambda^2(v) = 1 at
  // every vertex (not just probed ones).
  virtual bool has_reciprocal_norm_identity() const { return false; }
  virtual DensityGuarantee density_guarantee() const { return DensityGuarantee::kWindowOnly; }

  // Root seed of rooted constructions: the arbitrary lambda^2 value assigned
  // to the root so the consistency identity can be stated there. The root
  // itself carries no weight.
  virtual std::optional<Rational> root_seed() const { return std::nullopt; }

  // lambda^2 of v, or the root seed when v is a rooted root.
  Rational weight_or_seed(const VertexAddr& v) const;
};

// Generic cursor: walks child addresses and queries the family per step.
class AddressChildCursor final : public ChildWeightCursor {
 public:
  AddressChildCursor(const TreeModel& tree, const WeightFamily& family, VertexAddr u)
      : tree_(tree), family_(family), parent_(std::move(u)) {}
  void next_into(ChildWeight& out) override;

 private:
  const TreeModel& tree_;
  const WeightFamily& family_;
  VertexAddr parent_;
  std::int64_t j_ = 0;
};

// Constant family lambda^2 = c on an infinitely branching tree. Its zeta
// values are all infinite; exists to exercise the non-dense paths.
class ConstantWeightFamily final : public WeightFamily {
 public:
  explicit ConstantWeightFamily(Rational lambda_sq_value);

  Rational lambda_sq(const VertexAddr& v) const override;
  ExtRational tail_sum_sq(const VertexAddr&, std::int64_t) const override {
    return ExtRational::infinity();
  }
  ExtRational tail_sum_quartic(const VertexAddr&, std::int64_t) const override {
    return ExtRational::infinity();
  }
  std::optional<ExtRational> inner_tail(const VertexAddr&, std::int64_t) const override {
    return ExtRational::infinity();
  }

 private:
  Rational value_;
};

// Explicitly declared family over a UserTree-style rooted tree.
//
// Vertices with finitely many children carry an explicit list of child
// weights. A vertex may instead carry a geometric continuation of mass M:
// its children get lambda^2 = M * 2^-j, and every vertex strictly below a
// continuation follows the reciprocal rule (children of v split 1/lambda^2(v)
// geometrically), so zeta^2 = 1/lambda^2 holds below it. That makes the
// family densely defined on infinitely branching parts with exact tails.
class UserWeightFamily final : public WeightFamily {
 public:
  UserWeightFamily(std::map<VertexAddr, std::vector<Rational>> explicit_children,
                   std::map<VertexAddr, Rational> geometric_mass);

  Rational lambda_sq(const VertexAddr& v) const override;
  ExtRational tail_sum_sq(const VertexAddr& u, std::int64_t m) const override;
  ExtRational tail_sum_quartic(const VertexAddr& u, std::int64_t m) const override;
  std::optional<ExtRational> inner_tail(const VertexAddr& u, std::int64_t m) const override;
  std::optional<ExtRational> criterion_tail(const VertexAddr& u, std::int64_t m) const override;

 private:
  enum class Kind { Explicit, Geometric, Unknown };
  // Resolves how the children of u are weighted; for Geometric also the mass.
  Kind classify(const VertexAddr& u, Rational* mass) const;

  std::map<VertexAddr, std::vector<Rational>> explicit_children_;
  std::map<VertexAddr, Rational> geometric_mass_;
};

// Family reconstructed from a weight dump: exact on the dumped window, no
// tail knowledge. Queries outside the window throw std::out_of_range.
class DumpWeightFamily final : public WeightFamily {
 public:
  explicit DumpWeightFamily(std::map<VertexAddr, Rational> weights);

  Rational lambda_sq(const VertexAddr& v) const override;
  ExtRational tail_sum_sq(const VertexAddr& u, std::int64_t m) const override;
  ExtRational tail_sum_quartic(const VertexAddr& u, std::int64_t m) const override;

  const std::map<VertexAddr, Rational>& weights() const { return weights_; }

 private:
  std::map<VertexAddr, Rational> weights_;
};

// Weight dump: one "<address> <num>/<den>" line per vertex of the truncated
// window (all paths of length <= depth with child indices <= width; the
// rooted root carries no weight and is omitted; the rootless window hangs
// off the spine vertex at offset `depth`). Level-major, address order.
std::string format_weight_dump(const TreeModel& tree, const WeightFamily& family,
                               std::int64_t depth, std::int64_t width);
DumpWeightFamily parse_weight_dump(std::string_view text);

// The vertices of the dump window, in dump order.
std::vector<VertexAddr> dump_window(const TreeModel& tree, std::int64_t depth,
                                    std::int64_t width);

}  // namespace treeshift
