#pragma once

// The decision criteria, each returning an exact certificate.
//
// square_domain_test evaluates, for finitely supported f, the functional
//
//   sum_u (1 + zeta^2(u) + sum_{v in Chi(u)} zeta^2(v) lambda^2(v)) |f(u)|^2
//
// whose finiteness characterizes membership of f in the domain of the
// squared shift (with 0 * infinity = 0 where f vanishes). A finite value is
// certified exactly (prefix + closed-form tails); an infinite one is
// certified by a monotone partial-sum transcript exceeding the caller's
// threshold, since no finite computation can verify infinity itself.
//
// hyponormality_test evaluates sum_{v in Chi(u)} lambda^2(v) / zeta^2(v)
// exactly; the shift is hyponormal iff the value is <= 1 at every vertex.
//
// adjoint_mismatch_quantity / phi_unboundedness_witness compute the
// hypothesis quantities of the two adjoint-domain criteria; the conclusions
// they feed are implied by cited external results and are not asserted here.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "treeshift/certificate.hpp"
#include "treeshift/construct.hpp"
#include "treeshift/rational.hpp"
#include "treeshift/shift.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/vector.hpp"
#include "treeshift/weight_family.hpp"

namespace treeshift {

struct DiagnoseOptions {
  std::int64_t depth = 6;
  std::int64_t width = 64;
  Rational threshold = Rational(1000000);
  std::int64_t prefix_terms = 8;  // explicit terms ahead of closed-form tails
  std::int64_t max_divergence_terms = 10'000'000;
  std::int64_t max_witness_search = 1'000'000;
  std::string spec_label = "user:unspecified";  // recorded in certificates for replay
};

// Membership of f in the domain of the squared shift.
Certificate square_domain_test(const TreeModel& tree, const WeightFamily& family,
                               const FiniteVector& f, const Rational& threshold,
                               const DiagnoseOptions& opts = {});

// Exact criterion value at u; verdict is "<= 1". Throws PreconditionError if
// some child has zero or infinite zeta^2 in the window, or no tail is known.
Certificate hyponormality_test(const TreeModel& tree, const WeightFamily& family,
                               const VertexAddr& u, const DiagnoseOptions& opts = {});

// Consistency certificate: (prefix + tail of child lambda^2) * lambda^2(u),
// with verdict "product == 1". The rooted root uses the construction seed.
Certificate consistency_certificate(const TreeModel& tree, const WeightFamily& family,
                                    const VertexAddr& u, const DiagnoseOptions& opts = {});

// m-term partial sum of lambda^2(w) / (1 + zeta^2(w)) over children w of v.
// Terms with infinite zeta^2 contribute 0.
Rational adjoint_mismatch_quantity(const TreeModel& tree, const WeightFamily& family,
                                   const VertexAddr& v, std::int64_t m);

// Searches the children of `base` for a branch whose single-term mismatch
// value exceeds the threshold; emits an UnboundednessWitness transcript.
Certificate adjoint_unboundedness_search(const TreeModel& tree, const WeightFamily& family,
                                         const VertexAddr& base, const Rational& threshold,
                                         const DiagnoseOptions& opts = {});

// Least child index j with zeta^2(child j) > bound_sq, under the verified
// precondition zeta^2 * lambda^2 = 1 at every inspected child.
Certificate phi_unboundedness_witness(const TreeModel& tree, const WeightFamily& family,
                                      const VertexAddr& u, const Rational& bound_sq,
                                      const DiagnoseOptions& opts = {});

struct AdmissibilityReport {
  bool admissible = false;
  std::optional<VertexAddr> witness;          // finite-degree vertex, if any
  std::optional<Certificate> membership;      // e_(witness) domain-of-square certificate
  Certificate probe;                          // ExactBound transcript of the probed degrees
};

// Does every probed vertex declare countably many children? When not, and a
// weight family is supplied, the report carries the finite membership
// certificate showing e_(witness) lies in the domain of the squared shift.
AdmissibilityReport tree_admissibility(const TreeModel& tree, const WeightFamily* family,
                                       const DiagnoseOptions& opts = {});

// Structural replay plus recomputation of every transcript line when the
// certificate's spec string names a reproducible construction.
ReplayResult replay_certificate(const Certificate& cert);

}  // namespace treeshift
