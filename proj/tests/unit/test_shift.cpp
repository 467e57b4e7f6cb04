#include "treeshift/shift.hpp"

#include <doctest.h>

#include <random>

#include "treeshift/construct.hpp"

using namespace treeshift;

namespace {

Rational rat(long n, long d = 1) { return Rational(n, d); }
VertexAddr R(std::vector<std::int64_t> p) { return VertexAddr::rooted(std::move(p)); }

RationalComplex cx(long re_n, long re_d, long im_n, long im_d) {
  return {Rational(re_n, re_d), Rational(im_n, im_d)};
}

// Criterion-style fixture: a binary root whose two children each carry unit
// weight and a geometric continuation of mass 1 (so zeta^2 = 1 at both).
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

// Family that reports an infinite child mass at exactly one vertex.
struct OneDivergentVertex final : WeightFamily {
  std::shared_ptr<const WeightFamily> base = build_square_trivial_rooted(Rational(1));
  VertexAddr bad = R({2});
  Rational lambda_sq(const VertexAddr& v) const override { return base->lambda_sq(v); }
  ExtRational tail_sum_sq(const VertexAddr& u, std::int64_t m) const override {
    return u == bad ? ExtRational::infinity() : base->tail_sum_sq(u, m);
  }
  ExtRational tail_sum_quartic(const VertexAddr& u, std::int64_t m) const override {
    return u == bad ? ExtRational::infinity() : base->tail_sum_quartic(u, m);
  }
};

}  // namespace

TEST_CASE("apply_lambda on basis vectors") {
  RootedInfiniteTree tree;
  auto fam = build_square_trivial_rooted(rat(1));
  WindowImage image = apply_lambda(tree, *fam, FiniteVector::basis(VertexAddr::root()), 2);
  REQUIRE(image.entries.size() == 2);
  CHECK(image.truncated);
  CHECK(image.entries[0].vertex == R({1}));
  CHECK(image.entries[0].parent_coeff == cx(1, 1, 0, 1));
  CHECK(image.entries[0].weight_sq == rat(1, 2));
  CHECK(image.entries[1].vertex == R({2}));
  CHECK(image.entries[1].weight_sq == rat(1, 4));

  CHECK(apply_lambda(tree, *fam, FiniteVector(), 5).entries.empty());

  FiniteVector two;
  two.set(R({1}), cx(1, 1, 0, 1));
  two.set(R({2}), cx(1, 1, 0, 1));
  WindowImage img2 = apply_lambda(tree, *fam, two, 1);
  REQUIRE(img2.entries.size() == 2);
  CHECK(img2.entries[0].vertex == R({1, 1}));
  CHECK(img2.entries[0].weight_sq == rat(1));
  CHECK(img2.entries[1].vertex == R({2, 1}));
  CHECK(img2.entries[1].weight_sq == rat(2));
}

TEST_CASE("apply_lambda is linear in the parent coefficients") {
  RootedInfiniteTree tree;
  auto fam = build_square_trivial_rooted(rat(2, 3));
  std::mt19937 rng(23);
  std::uniform_int_distribution<long> coef(-5, 5);
  for (int it = 0; it < 50; ++it) {
    FiniteVector f, g;
    f.set(R({1}), cx(coef(rng), 1, coef(rng), 3));
    f.set(R({2, 2}), cx(coef(rng), 2, coef(rng), 1));
    g.set(R({1}), cx(coef(rng), 1, coef(rng), 1));
    g.set(R({3}), cx(coef(rng), 4, coef(rng), 1));
    RationalComplex alpha = cx(coef(rng), 1, coef(rng), 2);
    RationalComplex beta = cx(coef(rng), 3, coef(rng), 1);
    FiniteVector combo;
    combo.accumulate(alpha, f);
    combo.accumulate(beta, g);
    WindowImage image = apply_lambda(tree, *fam, combo, 3);
    for (const WindowImageEntry& e : image.entries) {
      VertexAddr parent = *e.vertex.parent();
      RationalComplex expect = alpha * f.at(parent) + beta * g.at(parent);
      CHECK(e.parent_coeff == expect);
      CHECK(e.weight_sq == fam->lambda_sq(e.vertex));
    }
  }
}

TEST_CASE("window norm plus tail recovers zeta^2 and windows are monotone") {
  RootedInfiniteTree tree;
  auto fam = build_square_trivial_rooted(rat(1));
  for (auto u : {VertexAddr::root(), R({2}), R({1, 3})}) {
    FiniteVector f = FiniteVector::basis(u);
    for (std::int64_t w : {1, 4, 9}) {
      WindowImage image = apply_lambda(tree, *fam, f, w);
      Rational total = image.window_norm_sq() + fam->tail_sum_sq(u, w).value();
      CHECK(ExtRational(total) == zeta_sq(tree, *fam, u));
    }
    // enlarging the window only appends
    WindowImage small = apply_lambda(tree, *fam, f, 3);
    WindowImage large = apply_lambda(tree, *fam, f, 7);
    for (const WindowImageEntry& e : small.entries) {
      auto again = large.at(e.vertex);
      REQUIRE(again.has_value());
      CHECK(again->parent_coeff == e.parent_coeff);
      CHECK(again->weight_sq == e.weight_sq);
    }
  }
}

TEST_CASE("zeta_sq values") {
  RootedInfiniteTree tree;
  auto fam = build_square_trivial_rooted(rat(1));
  CHECK(zeta_sq(tree, *fam, VertexAddr::root()) == ExtRational(rat(1)));
  CHECK(zeta_sq(tree, *fam, R({1})) == ExtRational(rat(2)));
  // prefix length must not change the value
  for (std::int64_t p : {0, 1, 5, 30})
    CHECK(zeta_sq(tree, *fam, R({2, 1}), p) == zeta_sq(tree, *fam, R({2, 1})));

  auto hypo = build_hyponormal_rooted(rat(1));
  CHECK(zeta_sq(tree, *hypo, VertexAddr::root()) == ExtRational(rat(1)));

  ConstantWeightFamily ones{rat(1)};
  CHECK(!zeta_sq(tree, ones, VertexAddr::root()).is_finite());

  BinaryRootFixture fx;
  CHECK(zeta_sq(*fx.tree, *fx.family, VertexAddr::root()) == ExtRational(rat(2)));
  CHECK(zeta_sq(*fx.tree, *fx.family, R({1})) == ExtRational(rat(1)));
}

TEST_CASE("basis membership in the shift domain") {
  RootedInfiniteTree tree;
  auto fam = build_square_trivial_rooted(rat(1));
  MembershipResult in = e_u_in_domain(tree, *fam, R({1}), rat(10));
  CHECK(in.in_domain);
  CHECK(in.certificate.kind == CertificateKind::FiniteMembership);
  CHECK(in.certificate.transcript.back().value == rat(2));
  CHECK(replay_structural(in.certificate).ok);

  ConstantWeightFamily ones{rat(1)};
  MembershipResult out = e_u_in_domain(tree, ones, VertexAddr::root(), rat(10));
  CHECK(!out.in_domain);
  CHECK(out.certificate.kind == CertificateKind::Divergence);
  CHECK(out.certificate.transcript.back().value == rat(10));  // ten unit terms
  CHECK(replay_structural(out.certificate).ok);
}

TEST_CASE("density probe") {
  RootedInfiniteTree tree;
  auto fam = build_square_trivial_rooted(rat(1));
  DensityReport r = densely_defined(tree, *fam, 3, 8);
  CHECK(r.dense_on_window);
  CHECK(r.guarantee == DensityGuarantee::kAllVertices);
  CHECK(!r.witness.has_value());
  CHECK(r.probed > 0);

  ConstantWeightFamily ones{rat(1)};
  DensityReport bad = densely_defined(tree, ones, 3, 8);
  CHECK(!bad.dense_on_window);
  CHECK(bad.witness == VertexAddr::root());
  CHECK(bad.guarantee == DensityGuarantee::kWindowOnly);

  OneDivergentVertex spot;
  DensityReport witness = densely_defined(tree, spot, 2, 8);
  CHECK(!witness.dense_on_window);
  CHECK(witness.witness == R({2}));
}

TEST_CASE("injectivity probe") {
  RootedInfiniteTree tree;
  auto fam = build_square_trivial_rooted(rat(1));
  CHECK(injective_check(tree, *fam, 3, 8).injective);

  BinaryRootFixture fx;  // leafless (infinite continuation below both children)
  CHECK(injective_check(*fx.tree, *fx.family, 1, 2).injective);

  std::map<VertexAddr, ChildCount> degrees;
  degrees[VertexAddr::root()] = 1;
  degrees[R({1})] = 0;  // declared leaf
  UserTree leafy(degrees, ChildCount{0});
  std::map<VertexAddr, std::vector<Rational>> ws;
  ws[VertexAddr::root()] = {rat(1)};
  ws[R({1})] = {};
  UserWeightFamily wfam(ws, {});
  InjectivityReport r = injective_check(leafy, wfam, 2, 4);
  CHECK(!r.injective);
  CHECK(r.witness == R({1}));
  CHECK(r.reason == "leaf");
}
