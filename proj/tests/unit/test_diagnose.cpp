#include "treeshift/diagnose.hpp"

#include <doctest.h>

#include <map>

using namespace treeshift;

namespace {

Rational rat(long n, long d = 1) { return Rational(n, d); }
VertexAddr R(std::vector<std::int64_t> p) { return VertexAddr::rooted(std::move(p)); }

const Rational* line_value(const Certificate& cert, const std::string& label) {
  for (const TranscriptLine& l : cert.transcript)
    if (l.label == label) return &l.value;
  return nullptr;
}

struct BinaryRootFixture {
  std::shared_ptr<UserTree> tree;
  std::shared_ptr<UserWeightFamily> family;
  BinaryRootFixture() {
    std::map<VertexAddr, ChildCount> degrees;
    degrees[VertexAddr::root()] = 2;
    degrees[R({1})] = std::nullopt;
    degrees[R({2})] = std::nullopt;
    tree = std::make_shared<UserTree>(degrees, ChildCount{});
    std::map<VertexAddr, std::vector<Rational>> explicit_children;
    explicit_children[VertexAddr::root()] = {rat(1), rat(1)};
    std::map<VertexAddr, Rational> mass;
    mass[R({1})] = rat(1);
    mass[R({2})] = rat(1);
    family = std::make_shared<UserWeightFamily>(explicit_children, mass);
  }
};

DiagnoseOptions labeled(const char* spec) {
  DiagnoseOptions opts;
  opts.spec_label = spec;
  return opts;
}

}  // namespace

TEST_CASE("square domain test certifies divergence with unit inner terms") {
  RootedInfiniteTree tree;
  auto c = build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=1/1"));
  DiagnoseOptions opts = labeled("mode=sqtrivial;rooted=1;theta=1/1");

  Certificate cert =
      square_domain_test(*c.tree, *c.family, FiniteVector::basis(VertexAddr::root()), rat(10),
                         opts);
  CHECK(cert.kind == CertificateKind::Divergence);
  CHECK(cert.verdict);
  CHECK(*line_value(cert, "head") == rat(2));  // (1 + zeta^2) * 1
  for (const TranscriptLine& l : cert.transcript) {
    if (auto m = index_from_label(l.label, "inner_partial", "m"))
      CHECK(l.value == Rational(*m));  // partial sum after m children is exactly m
  }
  CHECK(*line_value(cert, "inner_partial m=10") == rat(10));
  CHECK(replay_certificate(cert).ok);

  // Divergence growth with a non-unit coefficient: |3+4i|^2 = 25 per term.
  FiniteVector f;
  f.set(VertexAddr::root(), {rat(3), rat(4)});
  Certificate scaled = square_domain_test(*c.tree, *c.family, f, rat(1000), opts);
  CHECK(scaled.kind == CertificateKind::Divergence);
  CHECK(*line_value(scaled, "head") == rat(50));
  CHECK(scaled.transcript.back().value == rat(1000));
  CHECK(index_from_label(scaled.transcript.back().label, "inner_partial", "m") == 40);

  Certificate empty = square_domain_test(*c.tree, *c.family, FiniteVector(), rat(10), opts);
  CHECK(empty.kind == CertificateKind::FiniteMembership);
  CHECK(empty.verdict);
  CHECK(*line_value(empty, "total") == rat(0));
}

TEST_CASE("square domain test on a finite-degree vertex is exact") {
  BinaryRootFixture fx;
  Certificate cert = square_domain_test(*fx.tree, *fx.family,
                                        FiniteVector::basis(VertexAddr::root()), rat(1000000));
  CHECK(cert.kind == CertificateKind::FiniteMembership);
  CHECK(cert.verdict);
  // 1 + zeta^2(root) + sum over the two children of zeta^2 * lambda^2
  //   = 1 + 2 + (1*1 + 1*1) = 5.
  CHECK(*line_value(cert, "total") == rat(5));
  CHECK(replay_structural(cert).ok);
}

TEST_CASE("hyponormality criterion values") {
  auto hypo = build(ConstructionSpec::parse("mode=hypo;rooted=1;theta=1/2"));
  Certificate root_cert = hyponormality_test(*hypo.tree, *hypo.family, VertexAddr::root(),
                                             labeled("mode=hypo;rooted=1;theta=1/2"));
  CHECK(root_cert.verdict);
  CHECK(*line_value(root_cert, "criterion_value") == rat(5, 6));
  CHECK(replay_certificate(root_cert).ok);

  auto rootless = build(ConstructionSpec::parse("mode=hypo;rooted=0"));
  Certificate spine = hyponormality_test(*rootless.tree, *rootless.family,
                                         VertexAddr::rootless(2), labeled("mode=hypo;rooted=0"));
  CHECK(spine.verdict);
  CHECK(*line_value(spine, "criterion_value") == rat(1));  // exactly the boundary
  Certificate u1 = hyponormality_test(*rootless.tree, *rootless.family, VertexAddr::rootless(0),
                                      labeled("mode=hypo;rooted=0"));
  CHECK(*line_value(u1, "criterion_value") == rat(5, 6));

  // Square-trivial families satisfy the identity, so the criterion value is
  // the quartic sum: 1/3 at the root (hyponormal there) but 4/3 > 1 at [1].
  auto sq = build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=1/1"));
  Certificate at_root = hyponormality_test(*sq.tree, *sq.family, VertexAddr::root());
  CHECK(*line_value(at_root, "criterion_value") == rat(1, 3));
  CHECK(at_root.verdict);
  // Criterion value identity: with zeta^2 * lambda^2 = 1 the criterion sum
  // is exactly the quartic sum.
  CHECK(*line_value(at_root, "criterion_value") ==
        sq.family->tail_sum_quartic(VertexAddr::root(), 0).value());
  Certificate at_one = hyponormality_test(*sq.tree, *sq.family, R({1}));
  CHECK(*line_value(at_one, "criterion_value") == rat(4, 3));
  CHECK(!at_one.verdict);

  // Perturbed family: the v0 term alone already breaks the bound.
  auto pert = build(ConstructionSpec::parse("mode=perturb;rooted=1;theta=1/1;v0=1"));
  Certificate broken = hyponormality_test(*pert.tree, *pert.family, VertexAddr::root(),
                                          labeled("mode=perturb;rooted=1;theta=1/1;v0=1"));
  CHECK(*line_value(broken, "term j=1") == rat(3, 2));
  CHECK(*line_value(broken, "criterion_value") == rat(19, 12));
  CHECK(!broken.verdict);
  CHECK(replay_certificate(broken).ok);

  RootedInfiniteTree tree;
  ConstantWeightFamily ones{rat(1)};
  CHECK_THROWS_AS(hyponormality_test(tree, ones, VertexAddr::root()), PreconditionError);
}

TEST_CASE("consistency certificates") {
  auto c = build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=3/7"));
  Certificate cert = consistency_certificate(*c.tree, *c.family, VertexAddr::root(),
                                             labeled("mode=sqtrivial;rooted=1;theta=3/7"));
  CHECK(cert.verdict);
  CHECK(*line_value(cert, "identity_product") == rat(1));
  CHECK(*line_value(cert, "lambda_sq") == rat(3, 7));
  CHECK(replay_certificate(cert).ok);

  // The perturbed family breaks the identity exactly at the root.
  auto pert = build(ConstructionSpec::parse("mode=perturb;rooted=1;theta=1/1;v0=1"));
  Certificate broken = consistency_certificate(*pert.tree, *pert.family, VertexAddr::root(),
                                               labeled("mode=perturb;rooted=1;theta=1/1;v0=1"));
  CHECK(!broken.verdict);
  CHECK(*line_value(broken, "identity_product") == rat(7, 2));
  CHECK(replay_certificate(broken).ok);
}

TEST_CASE("adjoint mismatch quantities grow without bound on the nonhypo family") {
  auto c = build(ConstructionSpec::parse("mode=nonhypo;rooted=1;theta=1/1"));
  CHECK(adjoint_mismatch_quantity(*c.tree, *c.family, R({1}), 0) == rat(0));
  // Single-term value at branch j: (2^(j+1)-1)^2 / (2*(2^(j+1)+1)).
  CHECK(adjoint_mismatch_quantity(*c.tree, *c.family, R({1}), 1) == rat(9, 10));
  CHECK(adjoint_mismatch_quantity(*c.tree, *c.family, R({2}), 1) == rat(49, 18));
  CHECK(adjoint_mismatch_quantity(*c.tree, *c.family, R({10}), 1) == rat(4190209, 4098));

  Rational prev(0);
  for (std::int64_t j = 1; j <= 12; ++j) {
    Rational q = adjoint_mismatch_quantity(*c.tree, *c.family, R({j}), 1);
    CHECK(q > prev);
    prev = q;
  }
  CHECK(prev > rat(1000));

  Certificate found = adjoint_unboundedness_search(*c.tree, *c.family, VertexAddr::root(),
                                                   rat(1000),
                                                   labeled("mode=nonhypo;rooted=1;theta=1/1"));
  CHECK(found.verdict);
  CHECK(found.transcript.size() == 10);  // j = 10 is the first branch past 1000
  CHECK(replay_certificate(found).ok);

  // On the square-trivial family the same quantity stays small: terms are
  // lambda^4/(1+lambda^2) <= lambda^4 and the whole series is below 1/3.
  auto sq = build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=1/1"));
  Rational q20 = adjoint_mismatch_quantity(*sq.tree, *sq.family, VertexAddr::root(), 20);
  CHECK(q20 < rat(1, 3));
  Certificate none = adjoint_unboundedness_search(*sq.tree, *sq.family, VertexAddr::root(),
                                                  rat(1000),
                                                  labeled("mode=sqtrivial;rooted=1;theta=1/1"));
  CHECK(!none.verdict);
}

TEST_CASE("phi unboundedness witness") {
  auto c = build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=1/1"));
  DiagnoseOptions opts = labeled("mode=sqtrivial;rooted=1;theta=1/1");
  Certificate cert =
      phi_unboundedness_witness(*c.tree, *c.family, VertexAddr::root(), rat(1000), opts);
  CHECK(cert.verdict);
  CHECK(cert.transcript.size() == 10);
  CHECK(cert.transcript.back().value == rat(1024));  // zeta^2 at child 10
  CHECK(replay_certificate(cert).ok);

  Certificate first =
      phi_unboundedness_witness(*c.tree, *c.family, VertexAddr::root(), rat(1, 2), opts);
  CHECK(first.transcript.size() == 1);  // zeta^2(child 1) = 2 already exceeds
  CHECK(first.transcript.back().value == rat(2));
  Certificate zero =
      phi_unboundedness_witness(*c.tree, *c.family, VertexAddr::root(), rat(0), opts);
  CHECK(zero.transcript.size() == 1);

  // The perturbed family violates the identity precondition at the root.
  auto pert = build(ConstructionSpec::parse("mode=perturb;rooted=1;theta=1/1;v0=1"));
  CHECK_THROWS_AS(
      phi_unboundedness_witness(*pert.tree, *pert.family, VertexAddr::root(), rat(10), opts),
      PreconditionError);
}

TEST_CASE("admissibility") {
  auto c = build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=1/1"));
  DiagnoseOptions small;
  small.depth = 2;
  small.width = 8;
  AdmissibilityReport ok = tree_admissibility(*c.tree, c.family.get(), small);
  CHECK(ok.admissible);
  CHECK(!ok.witness);
  CHECK(ok.probe.verdict);
  CHECK(replay_structural(ok.probe).ok);

  BinaryRootFixture fx;
  AdmissibilityReport bad = tree_admissibility(*fx.tree, fx.family.get(), small);
  CHECK(!bad.admissible);
  CHECK(bad.witness == VertexAddr::root());
  REQUIRE(bad.membership.has_value());
  CHECK(bad.membership->kind == CertificateKind::FiniteMembership);
  CHECK(bad.membership->transcript.back().value == rat(5));
}

TEST_CASE("replay detects tampering") {
  auto c = build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=1/1"));
  DiagnoseOptions opts = labeled("mode=sqtrivial;rooted=1;theta=1/1");
  Certificate cert =
      square_domain_test(*c.tree, *c.family, FiniteVector::basis(R({1})), rat(100), opts);
  CHECK(replay_certificate(cert).ok);

  Certificate forged = cert;
  forged.transcript.back().value += rat(1);
  ReplayResult r = replay_certificate(forged);
  CHECK(!r.ok);
  CHECK(r.line == forged.transcript.size());

  Certificate reordered = cert;
  std::swap(reordered.transcript[1].value, reordered.transcript[2].value);
  CHECK(!replay_certificate(reordered).ok);

  Certificate wrong_verdict = cert;
  wrong_verdict.verdict = false;
  CHECK(!replay_certificate(wrong_verdict).ok);

  // A user-family certificate replays structurally even though its spec
  // cannot be rebuilt.
  BinaryRootFixture fx;
  DiagnoseOptions user = labeled("user:binary-root-fixture");
  Certificate fini = square_domain_test(*fx.tree, *fx.family,
                                        FiniteVector::basis(VertexAddr::root()), rat(10), user);
  CHECK(replay_certificate(fini).ok);
  Certificate forged2 = fini;
  forged2.transcript.back().value += rat(1);
  CHECK(!replay_certificate(forged2).ok);
}
