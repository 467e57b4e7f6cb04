#include "treeshift/shift.hpp"

#include <algorithm>
#include <stdexcept>

namespace treeshift {

Rational WindowImage::window_norm_sq() const {
  Rational s(0);
  for (const WindowImageEntry& e : entries) s += e.value_abs_sq();
  return s;
}

std::optional<WindowImageEntry> WindowImage::at(const VertexAddr& v) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), v,
                             [](const WindowImageEntry& e, const VertexAddr& a) {
                               return e.vertex < a;
                             });
  if (it == entries.end() || !(it->vertex == v)) return std::nullopt;
  return *it;
}

WindowImage apply_lambda(const TreeModel& tree, const WeightFamily& family,
                         const FiniteVector& f, std::int64_t width) {
  if (width < 1) throw std::invalid_argument("apply_lambda: window width must be >= 1");
  WindowImage image;
  for (const auto& [u, coeff] : f.support()) {
    ChildCount n = tree.child_count(u);
    std::int64_t take = n ? std::min(width, *n) : width;
    if (!n || *n > width) image.truncated = true;
    for (std::int64_t j = 1; j <= take; ++j) {
      VertexAddr v = tree.child(u, j);
      image.entries.push_back({v, coeff, family.lambda_sq(v)});
    }
  }
  // Child sets of distinct vertices are disjoint, so addresses are unique.
  std::sort(image.entries.begin(), image.entries.end(),
            [](const WindowImageEntry& a, const WindowImageEntry& b) {
              return a.vertex < b.vertex;
            });
  return image;
}

ExtRational zeta_sq(const TreeModel& tree, const WeightFamily& family, const VertexAddr& u,
                    std::int64_t prefix_terms) {
  if (prefix_terms < 0) throw std::invalid_argument("zeta_sq: negative prefix");
  ChildCount n = tree.child_count(u);
  std::int64_t take = n ? std::min(prefix_terms, *n) : prefix_terms;
  Rational prefix(0);
  if (take > 0) {
    auto cursor = family.child_cursor(u);
    for (std::int64_t j = 1; j <= take; ++j) prefix += cursor->next().lambda_sq;
  }
  ExtRational tail = family.tail_sum_sq(u, take);
  return tail + ExtRational(prefix);
}

MembershipResult e_u_in_domain(const TreeModel& tree, const WeightFamily& family,
                               const VertexAddr& u, const Rational& threshold) {
  if (threshold.sign() <= 0) throw std::invalid_argument("e_u_in_domain: threshold must be > 0");
  Certificate cert;
  cert.address = u.str();
  cert.threshold = threshold;
  ExtRational z = zeta_sq(tree, family, u);
  if (z.is_finite()) {
    cert.kind = CertificateKind::FiniteMembership;
    cert.transcript.push_back({"zeta_total u=" + u.str(), z.value()});
    cert.transcript.push_back({"total", z.value()});
    cert.verdict = true;
    return {true, std::move(cert)};
  }
  cert.kind = CertificateKind::Divergence;
  auto cursor = family.child_cursor(u);
  Rational partial(0);
  std::int64_t next_checkpoint = 1;
  constexpr std::int64_t kCap = 10'000'000;
  for (std::int64_t m = 1; m <= kCap; ++m) {
    partial += cursor->next().lambda_sq;
    bool reached = partial >= threshold;
    if (m == next_checkpoint || reached) {
      cert.transcript.push_back({label_with_index("weight_partial", "m", m), partial});
      next_checkpoint *= 2;
    }
    if (reached) {
      cert.verdict = true;
      return {false, std::move(cert)};
    }
  }
  throw PreconditionError("e_u_in_domain: threshold not reached within " + std::to_string(kCap) +
                          " terms");
}

DensityReport densely_defined(const TreeModel& tree, const WeightFamily& family,
                              std::int64_t depth, std::int64_t width) {
  DensityReport report{true, family.density_guarantee(), std::nullopt, 0};
  for (const VertexAddr& u : tree.probe_window(depth, width)) {
    ++report.probed;
    ExtRational z = zeta_sq(tree, family, u);
    if (!z.is_finite()) {
      report.dense_on_window = false;
      report.guarantee = DensityGuarantee::kWindowOnly;
      report.witness = u;
      return report;
    }
    if (family.has_reciprocal_norm_identity() &&
        !(z.value() * family.weight_or_seed(u) == Rational(1))) {
      // The construction-level claim failed a probe: no all-vertex guarantee.
      report.guarantee = DensityGuarantee::kWindowOnly;
      report.witness = u;
    }
  }
  return report;
}

InjectivityReport injective_check(const TreeModel& tree, const WeightFamily& family,
                                  std::int64_t depth, std::int64_t width) {
  InjectivityReport report{true, std::nullopt, "", 0};
  for (const VertexAddr& u : tree.probe_window(depth, width)) {
    ++report.probed;
    ChildCount n = tree.child_count(u);
    if (n && *n == 0) {
      report.injective = false;
      report.witness = u;
      report.reason = "leaf";
      return report;
    }
    ExtRational z = zeta_sq(tree, family, u);
    if (z.is_finite() && z.value().sign() <= 0) {
      report.injective = false;
      report.witness = u;
      report.reason = "zero weight mass";
      return report;
    }
  }
  return report;
}

}  // namespace treeshift
