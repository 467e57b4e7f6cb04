#pragma once

// The formal shift on finitely supported vectors, and the basic membership,
// density and injectivity checks.
//
// The image of a nonzero vector has infinite support on the canonical trees,
// so apply_lambda returns an explicit truncation: for each support vertex of
// f, the first `width` children. Each image entry keeps the parent
// coefficient f(par v) and lambda^2(v) separately; the image value at v is
// f(par v) * lambda_v with lambda_v the positive square root, which is never
// materialized (its square is all any downstream identity needs).

#include <cstdint>
#include <optional>
#include <vector>

#include "treeshift/certificate.hpp"
#include "treeshift/rational.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/vector.hpp"
#include "treeshift/weight_family.hpp"

namespace treeshift {

struct WindowImageEntry {
  VertexAddr vertex;
  RationalComplex parent_coeff;  // f(par v); never zero
  Rational weight_sq;            // lambda^2(v)

  // |image value|^2 = |f(par v)|^2 * lambda^2(v), exactly.
  Rational value_abs_sq() const { return parent_coeff.abs_sq() * weight_sq; }
};

struct WindowImage {
  std::vector<WindowImageEntry> entries;  // address order
  bool truncated = false;                 // some support vertex has more children

  Rational window_norm_sq() const;
  std::optional<WindowImageEntry> at(const VertexAddr& v) const;
};

WindowImage apply_lambda(const TreeModel& tree, const WeightFamily& family,
                         const FiniteVector& f, std::int64_t width);

// zeta^2(u) = sum of lambda^2 over the children of u, evaluated as an
// explicit prefix plus the family's closed-form tail.
ExtRational zeta_sq(const TreeModel& tree, const WeightFamily& family, const VertexAddr& u,
                    std::int64_t prefix_terms = 8);

struct MembershipResult {
  bool in_domain;
  Certificate certificate;
};

// Is the basis vector at u in the domain of the shift? True iff zeta^2(u) is
// finite; the certificate carries the exact value, or a partial-sum
// transcript exceeding `threshold` when the family reports divergence.
MembershipResult e_u_in_domain(const TreeModel& tree, const WeightFamily& family,
                               const VertexAddr& u, const Rational& threshold);

struct DensityReport {
  bool dense_on_window;
  DensityGuarantee guarantee;
  std::optional<VertexAddr> witness;  // first probed vertex with infinite zeta
  std::int64_t probed = 0;
};

// Probes e_u membership across the window; for families carrying the
// construction-level identity zeta^2 * lambda^2 = 1 it additionally
// re-derives that identity at every probed vertex, which is what certifies
// density beyond the window.
DensityReport densely_defined(const TreeModel& tree, const WeightFamily& family,
                              std::int64_t depth, std::int64_t width);

struct InjectivityReport {
  bool injective;
  std::optional<VertexAddr> witness;
  std::string reason;
  std::int64_t probed = 0;
};

// Leafless + zeta^2 > 0 at every probed vertex.
InjectivityReport injective_check(const TreeModel& tree, const WeightFamily& family,
                                  std::int64_t depth, std::int64_t width);

}  // namespace treeshift
