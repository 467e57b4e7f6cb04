#include "treeshift/diagnose.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace treeshift {

namespace {

const Rational kOne(1);

// Walks a monotone series to the threshold, recording partial sums at powers
// of two and at the stopping index. `add_term` accumulates one term into the
// running sum and returns false to abort (term not finite).
template <typename AddTerm>
std::int64_t drive_to_threshold(const Rational& threshold, std::int64_t cap,
                                std::string_view label_prefix, AddTerm&& add_term,
                                Rational& partial, std::vector<TranscriptLine>& transcript) {
  std::int64_t next_checkpoint = 1;
  for (std::int64_t m = 1; m <= cap; ++m) {
    if (!add_term(partial)) return -m;
    bool reached = partial >= threshold;
    if (m == next_checkpoint || reached) {
      transcript.push_back({label_with_index(label_prefix, "m", m), partial});
      if (m == next_checkpoint) next_checkpoint *= 2;
    }
    if (reached) return m;
  }
  throw PreconditionError("divergence transcript: threshold " + threshold.str() +
                          " not reached within " + std::to_string(cap) + " terms");
}

// Divergence of the plain child-weight series at `v`, scaled by nothing: the
// witness that zeta^2(v) is infinite.
Certificate weight_series_divergence(const WeightFamily& family, const VertexAddr& v,
                                     const Rational& threshold, const DiagnoseOptions& opts) {
  Certificate cert;
  cert.kind = CertificateKind::Divergence;
  cert.spec = opts.spec_label;
  cert.address = v.str();
  cert.threshold = threshold;
  auto cursor = family.child_cursor(v);
  ChildWeight cw;
  Rational partial(0);
  drive_to_threshold(
      threshold, opts.max_divergence_terms, "weight_partial",
      [&](Rational& sum) {
        cursor->next_into(cw);
        sum += cw.lambda_sq;
        return true;
      },
      partial, cert.transcript);
  cert.verdict = true;
  return cert;
}

struct VertexTerm {
  // t(u) = (1 + zeta^2(u) + inner(u)) |f(u)|^2 when everything is finite.
  Rational value;
  bool finite = true;
  Certificate divergence;  // filled when !finite
};

VertexTerm evaluate_vertex_term(const TreeModel& tree, const WeightFamily& family,
                                const VertexAddr& u, const Rational& coeff_abs_sq,
                                const Rational& threshold, const DiagnoseOptions& opts) {
  VertexTerm out;
  ExtRational zeta_u = zeta_sq(tree, family, u, opts.prefix_terms);
  if (!zeta_u.is_finite()) {
    out.finite = false;
    out.divergence = weight_series_divergence(family, u, threshold, opts);
    return out;
  }

  ChildCount degree = tree.child_count(u);
  bool coeff_is_one = coeff_abs_sq == kOne;
  Rational inner(0);
  bool inner_done = false;

  if (degree) {
    // Finitely many children: the inner sum is an explicit finite sum, each
    // zeta^2 evaluated through the child families' tails.
    auto cursor = family.child_cursor(u);
    ChildWeight cw;
    for (std::int64_t j = 1; j <= *degree; ++j) {
      cursor->next_into(cw);
      if (!cw.zeta_sq.is_finite()) {
        out.finite = false;
        out.divergence = weight_series_divergence(family, tree.child(u, j), threshold, opts);
        return out;
      }
      inner += cw.zeta_sq.value() * cw.lambda_sq;
    }
    inner_done = true;
  } else {
    std::optional<ExtRational> whole = family.inner_tail(u, 0);
    if (whole && whole->is_finite()) {
      // Exact value as explicit prefix + closed-form tail.
      auto cursor = family.child_cursor(u);
      ChildWeight cw;
      for (std::int64_t j = 1; j <= opts.prefix_terms; ++j) {
        cursor->next_into(cw);
        if (!cw.zeta_sq.is_finite())
          throw PreconditionError("inner series: finite tail but infinite term at child " +
                                  std::to_string(j) + " of " + u.str());
        inner += cw.zeta_sq.value() * cw.lambda_sq;
      }
      auto tail = family.inner_tail(u, opts.prefix_terms);
      if (!tail || !tail->is_finite())
        throw PreconditionError("inner series: inconsistent tail classification at " + u.str());
      inner += tail->value();
      inner_done = true;
    } else {
      // Divergent (or unclassified): certify by partial sums. The transcript
      // carries the values scaled by |f(u)|^2, i.e. the actual contribution.
      Certificate cert;
      cert.kind = CertificateKind::Divergence;
      cert.spec = opts.spec_label;
      cert.address = u.str();
      cert.threshold = threshold;
      Rational head = (kOne + zeta_u.value()) * coeff_abs_sq;
      cert.transcript.push_back({"head", head});
      auto cursor = family.child_cursor(u);
      ChildWeight cw;
      Rational term;
      Rational partial(0);
      std::int64_t stopped = drive_to_threshold(
          threshold, opts.max_divergence_terms, "inner_partial",
          [&](Rational& sum) {
            cursor->next_into(cw);
            if (!cw.zeta_sq.is_finite()) return false;
            term = cw.lambda_sq;
            term *= cw.zeta_sq.value();
            if (!coeff_is_one) term *= coeff_abs_sq;
            sum += term;
            return true;
          },
          partial, cert.transcript);
      if (stopped < 0) {
        // An infinite zeta^2 at child -stopped: witness that child's series.
        out.finite = false;
        out.divergence =
            weight_series_divergence(family, tree.child(u, -stopped), threshold, opts);
        return out;
      }
      cert.verdict = true;
      out.finite = false;
      out.divergence = std::move(cert);
      return out;
    }
  }

  (void)inner_done;
  out.value = kOne + zeta_u.value() + inner;
  if (!coeff_is_one) out.value *= coeff_abs_sq;
  return out;
}

}  // namespace

Certificate square_domain_test(const TreeModel& tree, const WeightFamily& family,
                               const FiniteVector& f, const Rational& threshold,
                               const DiagnoseOptions& opts) {
  if (threshold.sign() <= 0)
    throw std::invalid_argument("square_domain_test: threshold must be > 0");
  Certificate cert;
  cert.kind = CertificateKind::FiniteMembership;
  cert.spec = opts.spec_label;
  cert.threshold = threshold;
  Rational total(0);
  for (const auto& [u, coeff] : f.support()) {
    // Vertices outside the support contribute 0 even where the factor in
    // parentheses is infinite (the 0 * infinity convention).
    VertexTerm t = evaluate_vertex_term(tree, family, u, coeff.abs_sq(), threshold, opts);
    if (!t.finite) return std::move(t.divergence);
    cert.transcript.push_back({"term u=" + u.str(), t.value});
    total += t.value;
  }
  if (!f.empty()) cert.address = f.support().begin()->first.str();
  cert.transcript.push_back({"total", total});
  cert.verdict = true;
  return cert;
}

Certificate hyponormality_test(const TreeModel& tree, const WeightFamily& family,
                               const VertexAddr& u, const DiagnoseOptions& opts) {
  Certificate cert;
  cert.kind = CertificateKind::ExactBound;
  cert.spec = opts.spec_label;
  cert.address = u.str();
  ChildCount degree = tree.child_count(u);
  std::int64_t take = degree ? std::min(opts.width, *degree) : opts.width;
  auto cursor = family.child_cursor(u);
  ChildWeight cw;
  Rational total(0);
  for (std::int64_t j = 1; j <= take; ++j) {
    cursor->next_into(cw);
    if (!cw.zeta_sq.is_finite())
      throw PreconditionError("hyponormality criterion inapplicable at child " +
                              std::to_string(j) + " of " + u.str() + ": infinite norm");
    if (cw.zeta_sq.value().is_zero())
      throw PreconditionError("hyponormality criterion inapplicable at child " +
                              std::to_string(j) + " of " + u.str() + ": zero norm");
    Rational term = cw.lambda_sq / cw.zeta_sq.value();
    cert.transcript.push_back({label_with_index("term", "j", j), term});
    total += term;
  }
  Rational tail(0);
  if (!degree || take < *degree) {
    auto t = family.criterion_tail(u, take);
    if (!t)
      throw PreconditionError("hyponormality criterion: no closed-form tail at " + u.str());
    if (!t->is_finite())
      throw PreconditionError("hyponormality criterion: divergent tail at " + u.str());
    tail = t->value();
  }
  cert.transcript.push_back({label_with_index("tail", "m", take), tail});
  total += tail;
  cert.transcript.push_back({"criterion_value", total});
  cert.verdict = total <= kOne;
  return cert;
}

Certificate consistency_certificate(const TreeModel& tree, const WeightFamily& family,
                                    const VertexAddr& u, const DiagnoseOptions& opts) {
  Certificate cert;
  cert.kind = CertificateKind::ExactBound;
  cert.spec = opts.spec_label;
  cert.address = u.str();
  ChildCount degree = tree.child_count(u);
  std::int64_t take = degree ? std::min(opts.width, *degree) : opts.width;
  auto cursor = family.child_cursor(u);
  ChildWeight cw;
  Rational prefix(0);
  for (std::int64_t j = 1; j <= take; ++j) {
    cursor->next_into(cw);
    prefix += cw.lambda_sq;
  }
  ExtRational tail = family.tail_sum_sq(u, take);
  if (!tail.is_finite())
    throw PreconditionError("consistency: infinite child mass at " + u.str());
  Rational lambda = family.weight_or_seed(u);
  Rational product = (prefix + tail.value()) * lambda;
  cert.transcript.push_back({label_with_index("sum_prefix", "m", take), prefix});
  cert.transcript.push_back({label_with_index("tail", "m", take), tail.value()});
  cert.transcript.push_back({"lambda_sq", lambda});
  cert.transcript.push_back({"identity_product", product});
  cert.verdict = product == kOne;
  return cert;
}

Rational adjoint_mismatch_quantity(const TreeModel& tree, const WeightFamily& family,
                                   const VertexAddr& v, std::int64_t m) {
  if (m < 0) throw std::invalid_argument("adjoint_mismatch_quantity: negative term count");
  ChildCount degree = tree.child_count(v);
  std::int64_t take = degree ? std::min(m, *degree) : m;
  auto cursor = family.child_cursor(v);
  ChildWeight cw;
  Rational sum(0);
  for (std::int64_t j = 1; j <= take; ++j) {
    cursor->next_into(cw);
    if (!cw.zeta_sq.is_finite()) continue;  // lambda^2 / (1 + inf) -> 0
    sum += cw.lambda_sq / (kOne + cw.zeta_sq.value());
  }
  return sum;
}

Certificate adjoint_unboundedness_search(const TreeModel& tree, const WeightFamily& family,
                                         const VertexAddr& base, const Rational& threshold,
                                         const DiagnoseOptions& opts) {
  Certificate cert;
  cert.kind = CertificateKind::UnboundednessWitness;
  cert.spec = opts.spec_label;
  cert.address = base.str();
  cert.threshold = threshold;
  ChildCount degree = tree.child_count(base);
  std::int64_t take = degree ? std::min(opts.width, *degree) : opts.width;
  for (std::int64_t j = 1; j <= take; ++j) {
    Rational q = adjoint_mismatch_quantity(tree, family, tree.child(base, j), 1);
    cert.transcript.push_back({label_with_index("mismatch", "j", j), q});
    if (q > threshold) {
      cert.verdict = true;
      return cert;
    }
  }
  cert.verdict = false;
  return cert;
}

Certificate phi_unboundedness_witness(const TreeModel& tree, const WeightFamily& family,
                                      const VertexAddr& u, const Rational& bound_sq,
                                      const DiagnoseOptions& opts) {
  (void)tree;
  Certificate cert;
  cert.kind = CertificateKind::UnboundednessWitness;
  cert.spec = opts.spec_label;
  cert.address = u.str();
  cert.threshold = bound_sq;
  auto cursor = family.child_cursor(u);
  ChildWeight cw;
  for (std::int64_t j = 1; j <= opts.max_witness_search; ++j) {
    cursor->next_into(cw);
    if (!cw.zeta_sq.is_finite())
      throw PreconditionError("phi witness: infinite norm at child " + std::to_string(j) +
                              " of " + u.str() + " (identity precondition violated)");
    if (!(cw.zeta_sq.value() * cw.lambda_sq == kOne))
      throw PreconditionError("phi witness: zeta^2 * lambda^2 != 1 at child " +
                              std::to_string(j) + " of " + u.str());
    cert.transcript.push_back({label_with_index("zeta_sq", "j", j), cw.zeta_sq.value()});
    if (cw.zeta_sq.value() > bound_sq) {
      cert.verdict = true;
      return cert;
    }
  }
  throw PreconditionError("phi witness: no child exceeded the bound within " +
                          std::to_string(opts.max_witness_search) + " indices");
}

AdmissibilityReport tree_admissibility(const TreeModel& tree, const WeightFamily* family,
                                       const DiagnoseOptions& opts) {
  AdmissibilityReport report;
  report.probe.kind = CertificateKind::ExactBound;
  report.probe.spec = opts.spec_label;
  report.probe.address = tree.base_vertex().str();
  for (const VertexAddr& u : tree.probe_window(opts.depth, opts.width)) {
    bool infinite = !tree.child_count(u).has_value();
    report.probe.transcript.push_back(
        {"children u=" + u.str(), infinite ? Rational(1) : Rational(0)});
    if (!infinite) {
      report.witness = u;
      break;
    }
  }
  report.admissible = !report.witness.has_value();
  report.probe.verdict = report.admissible;
  if (report.witness && family) {
    report.membership = square_domain_test(tree, *family, FiniteVector::basis(*report.witness),
                                           opts.threshold, opts);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Deep replay: rebuild the construction named by the certificate's spec and
// recompute every transcript line. Certificates whose spec is not a
// construction string (user families) get the structural check only.

namespace {

ReplayResult recompute_lines(const Certificate& cert, const Construction& c);

}  // namespace

ReplayResult replay_certificate(const Certificate& cert) {
  ReplayResult structural = replay_structural(cert);
  if (!structural.ok) return structural;
  ConstructionSpec spec;
  try {
    spec = ConstructionSpec::parse(cert.spec);
  } catch (const std::invalid_argument&) {
    return structural;  // not a reproducible construction; structural check only
  }
  Construction c;
  try {
    c = build(spec);
  } catch (const std::invalid_argument& e) {
    return ReplayResult::failure(0, std::string("irreproducible spec: ") + e.what());
  }
  return recompute_lines(cert, c);
}

namespace {

ReplayResult recompute_lines(const Certificate& cert, const Construction& c) {
  VertexAddr u;
  try {
    u = VertexAddr::parse(cert.address);
  } catch (const std::invalid_argument& e) {
    return ReplayResult::failure(0, std::string("bad address: ") + e.what());
  }
  if (!c.tree->contains(u)) return ReplayResult::failure(0, "address not in the tree");

  const WeightFamily& family = *c.family;
  const TreeModel& tree = *c.tree;
  DiagnoseOptions opts;
  opts.spec_label = cert.spec;

  // Cursor-backed series recomputation shared by several label kinds.
  auto cursor = family.child_cursor(u);
  std::int64_t cursor_at = 0;
  ChildWeight cw;
  Rational inner_partial(0), weight_partial(0);
  auto advance_to = [&](std::int64_t m) {
    for (; cursor_at < m; ++cursor_at) {
      cursor->next_into(cw);
      weight_partial += cw.lambda_sq;
      if (cw.zeta_sq.is_finite()) {
        Rational term = cw.lambda_sq;
        term *= cw.zeta_sq.value();
        inner_partial += term;
      }
    }
  };

  Rational term_sum(0);
  std::int64_t max_term_j = 0;

  for (std::size_t i = 0; i < cert.transcript.size(); ++i) {
    const TranscriptLine& l = cert.transcript[i];
    auto fail = [&](const std::string& msg) { return ReplayResult::failure(i + 1, msg); };

    if (auto m = index_from_label(l.label, "inner_partial", "m")) {
      advance_to(*m);
      if (!(inner_partial == l.value)) return fail("inner partial sum does not recompute");
    } else if (auto m2 = index_from_label(l.label, "weight_partial", "m")) {
      advance_to(*m2);
      if (!(weight_partial == l.value)) return fail("weight partial sum does not recompute");
    } else if (l.label == "head") {
      ExtRational z = zeta_sq(tree, family, u, opts.prefix_terms);
      if (!z.is_finite()) return fail("head recomputes to infinity");
      if (!(kOne + z.value() == l.value)) return fail("head does not recompute");
    } else if (auto j = index_from_label(l.label, "term", "j")) {
      advance_to(*j);
      if (!cw.zeta_sq.is_finite() || cw.zeta_sq.value().is_zero())
        return fail("criterion term inapplicable on recompute");
      Rational term = cw.lambda_sq / cw.zeta_sq.value();
      if (!(term == l.value)) return fail("criterion term does not recompute");
      term_sum += term;
      max_term_j = *j;
    } else if (auto mt = index_from_label(l.label, "tail", "m")) {
      // Criterion tail when term lines precede it, child-mass tail otherwise.
      bool criterion = max_term_j > 0;
      if (criterion) {
        auto t = family.criterion_tail(u, *mt);
        if (!t || !t->is_finite()) return fail("criterion tail unavailable on recompute");
        if (!(t->value() == l.value)) return fail("criterion tail does not recompute");
      } else {
        ExtRational t = family.tail_sum_sq(u, *mt);
        if (!t.is_finite()) return fail("tail recomputes to infinity");
        if (!(t.value() == l.value)) return fail("tail does not recompute");
      }
    } else if (auto mp = index_from_label(l.label, "sum_prefix", "m")) {
      advance_to(*mp);
      if (!(weight_partial == l.value)) return fail("prefix sum does not recompute");
    } else if (l.label == "lambda_sq") {
      if (!(family.weight_or_seed(u) == l.value)) return fail("lambda_sq does not recompute");
    } else if (l.label == "identity_product" || l.label == "criterion_value") {
      // Re-added structurally; nothing family-specific left to check.
    } else if (l.label == "total" || l.label.rfind("term u=", 0) == 0 ||
               l.label.rfind("zeta_total u=", 0) == 0) {
      if (l.label.rfind("zeta_total u=", 0) == 0) {
        VertexAddr v = VertexAddr::parse(l.label.substr(13));
        ExtRational z = zeta_sq(tree, family, v, opts.prefix_terms);
        if (!z.is_finite() || !(z.value() == l.value))
          return fail("zeta total does not recompute");
      } else if (l.label.rfind("term u=", 0) == 0) {
        // Reproducible only for basis vectors: the certificate's address
        // names the support vertex and the coefficient is 1.
        VertexAddr v = VertexAddr::parse(l.label.substr(7));
        if (v == u) {
          ExtRational z = zeta_sq(tree, family, v, opts.prefix_terms);
          auto whole = family.inner_tail(v, 0);
          ChildCount degree = tree.child_count(v);
          if (z.is_finite() && ((whole && whole->is_finite()) || degree)) {
            Rational inner(0);
            if (degree) {
              auto cur2 = family.child_cursor(v);
              ChildWeight cw2;
              for (std::int64_t jj = 1; jj <= *degree; ++jj) {
                cur2->next_into(cw2);
                if (!cw2.zeta_sq.is_finite()) return fail("term recomputes to infinity");
                inner += cw2.zeta_sq.value() * cw2.lambda_sq;
              }
            } else {
              inner = whole->value();
            }
            if (!(kOne + z.value() + inner == l.value)) return fail("term does not recompute");
          }
        }
      }
    } else if (auto jz = index_from_label(l.label, "zeta_sq", "j")) {
      advance_to(*jz);
      if (!cw.zeta_sq.is_finite()) return fail("zeta recomputes to infinity");
      if (!(cw.zeta_sq.value() == l.value)) return fail("zeta does not recompute");
      if (!(cw.zeta_sq.value() * cw.lambda_sq == kOne))
        return fail("identity precondition fails on recompute");
    } else if (auto jm = index_from_label(l.label, "mismatch", "j")) {
      Rational q = adjoint_mismatch_quantity(tree, family, tree.child(u, *jm), 1);
      if (!(q == l.value)) return fail("mismatch value does not recompute");
    } else if (l.label.rfind("children u=", 0) == 0) {
      VertexAddr v = VertexAddr::parse(l.label.substr(11));
      if (!tree.contains(v)) return fail("probed vertex not in the tree");
      bool infinite = !tree.child_count(v).has_value();
      if (!(l.value == (infinite ? Rational(1) : Rational(0))))
        return fail("child count does not recompute");
    } else {
      return fail("unexpected line '" + l.label + "'");
    }
  }
  return {};
}

}  // namespace

}  // namespace treeshift
