#include "treeshift/construct.hpp"

#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "treeshift/weight_family.hpp"

using namespace treeshift;

namespace {

Rational rat(long n, long d = 1) { return Rational(n, d); }

VertexAddr R(std::vector<std::int64_t> p) { return VertexAddr::rooted(std::move(p)); }
VertexAddr L(std::int64_t k, std::vector<std::int64_t> p = {}) {
  return VertexAddr::rootless(k, std::move(p));
}

// Independent check of the closed-form tails: tail(u, m) - tail(u, m+k) must
// equal the explicitly enumerated weights of children m+1 .. m+k.
void check_tail_consistency(const WeightFamily& fam, const VertexAddr& u) {
  for (std::int64_t m : {0, 1, 3, 7}) {
    for (std::int64_t k : {1, 2, 5}) {
      Rational sq_sum(0), q4_sum(0);
      for (std::int64_t j = m + 1; j <= m + k; ++j) {
        Rational w = fam.lambda_sq(u.child(j));
        sq_sum += w;
        q4_sum += w.sq();
      }
      CHECK(fam.tail_sum_sq(u, m).value() - fam.tail_sum_sq(u, m + k).value() == sq_sum);
      CHECK(fam.tail_sum_quartic(u, m).value() - fam.tail_sum_quartic(u, m + k).value() ==
            q4_sum);
    }
  }
}

// The O(1) cursor recurrences must agree with the address-based oracle.
void check_cursor(const WeightFamily& fam, const VertexAddr& u, std::int64_t count = 20) {
  auto cursor = fam.child_cursor(u);
  ChildWeight cw;
  for (std::int64_t j = 1; j <= count; ++j) {
    cursor->next_into(cw);
    CHECK(cw.lambda_sq == fam.lambda_sq(u.child(j)));
    CHECK(cw.zeta_sq == fam.tail_sum_sq(u.child(j), 0));
  }
}

// (sum of children's lambda^2) * lambda^2(u) == 1, prefix + closed tail.
void check_identity(const WeightFamily& fam, const VertexAddr& u, std::int64_t prefix = 16) {
  Rational sum(0);
  for (std::int64_t j = 1; j <= prefix; ++j) sum += fam.lambda_sq(u.child(j));
  sum += fam.tail_sum_sq(u, prefix).value();
  CHECK(sum * fam.weight_or_seed(u) == Rational(1));
}

}  // namespace

TEST_CASE("square-trivial rooted weights") {
  auto fam = build_square_trivial_rooted(rat(1));
  CHECK(fam->lambda_sq(R({1})) == rat(1, 2));
  CHECK(fam->lambda_sq(R({2})) == rat(1, 4));
  CHECK(fam->lambda_sq(R({1, 1})) == rat(1));
  CHECK(fam->lambda_sq(R({2, 5})) == rat(1, 8));
  CHECK(fam->tail_sum_sq(VertexAddr::root(), 0).value() == rat(1));
  CHECK(fam->tail_sum_sq(R({1}), 0).value() == rat(2));
  CHECK(!fam->inner_tail(VertexAddr::root(), 0)->is_finite());
  CHECK(fam->criterion_tail(VertexAddr::root(), 0)->value() == rat(1, 3));
  CHECK(fam->has_reciprocal_norm_identity());
  CHECK(fam->root_seed() == rat(1));
  CHECK_THROWS_AS(fam->lambda_sq(VertexAddr::root()), std::domain_error);
  CHECK_THROWS_AS(build_square_trivial_rooted(rat(0)), std::invalid_argument);
  CHECK_THROWS_AS(build_square_trivial_rooted(rat(-2)), std::invalid_argument);

  for (auto u : {VertexAddr::root(), R({1}), R({2, 5}), R({3, 1, 4})}) {
    check_tail_consistency(*fam, u);
    check_cursor(*fam, u);
    check_identity(*fam, u);
  }

  auto skew = build_square_trivial_rooted(rat(3, 7));
  CHECK(skew->lambda_sq(R({1})) == rat(7, 6));
  CHECK(skew->lambda_sq(R({1, 1})) == rat(3, 7));
  CHECK(skew->tail_sum_sq(VertexAddr::root(), 0).value() == rat(7, 3));
  check_identity(*skew, VertexAddr::root());
  check_identity(*skew, R({2, 3}));
}

TEST_CASE("square-trivial rootless weights") {
  auto fam = build_square_trivial_rootless();
  for (std::int64_t k = 0; k <= 5; ++k) CHECK(fam->lambda_sq(L(k)) == rat(1, 2));
  CHECK(fam->lambda_sq(L(1, {2})) == rat(3, 4));
  CHECK(fam->lambda_sq(L(1, {3})) == rat(3, 8));
  CHECK(fam->lambda_sq(L(0, {1})) == rat(1));
  CHECK(fam->lambda_sq(L(0, {2})) == rat(1, 2));
  CHECK(fam->lambda_sq(L(2, {2, 1})) == rat(4, 6) * rat(1));  // (1/(3/4))*2^-1 = 2/3
  CHECK(fam->lambda_sq(L(2, {2, 1})) == rat(2, 3));

  // Spine budget: total branch mass is 2 - 1/2 = 3/2.
  CHECK(fam->tail_sum_sq(L(3), 0).value() == rat(2));
  CHECK(fam->tail_sum_sq(L(3), 1).value() == rat(3, 2));
  CHECK(fam->tail_sum_sq(L(0), 0).value() == rat(2));

  for (auto u : {L(0), L(1), L(4), L(1, {2}), L(0, {3}), L(2, {5, 1})}) {
    check_tail_consistency(*fam, u);
    check_cursor(*fam, u);
    check_identity(*fam, u);
  }
  CHECK_THROWS_AS(fam->lambda_sq(R({1})), std::invalid_argument);
}

TEST_CASE("hyponormal rooted schedule") {
  auto fam = build_hyponormal_rooted(rat(1, 2));
  // r = 1/2: n = 4, plateau 1/2 for j <= 3, then halving.
  CHECK(fam->lambda_sq(R({1})) == rat(1, 2));
  CHECK(fam->lambda_sq(R({3})) == rat(1, 2));
  CHECK(fam->lambda_sq(R({4})) == rat(1, 4));
  CHECK(fam->lambda_sq(R({5})) == rat(1, 8));
  CHECK(fam->lambda_sq(R({1, 1})) == rat(1, 2));   // child of a 1/2 vertex: same schedule
  CHECK(fam->lambda_sq(R({4, 1})) == rat(1, 4));   // r = 1/4: n = 16, plateau 1/4
  CHECK(fam->tail_sum_sq(VertexAddr::root(), 0).value() == rat(2));
  // Quartic sum at the root: 3*(1/4) + sum_{j>=4} (2^-(j-2))^2 = 3/4 + 1/12.
  CHECK(fam->tail_sum_quartic(VertexAddr::root(), 0).value() == rat(3, 4) + rat(1, 12));
  CHECK(fam->tail_sum_quartic(VertexAddr::root(), 0).value() == rat(5, 6));

  auto third = build_hyponormal_rooted(rat(1, 3));
  // r = 1/3: n = 9, plateau 1/3 for j <= 8.
  CHECK(third->lambda_sq(R({8})) == rat(1, 3));
  CHECK(third->lambda_sq(R({9})) == rat(1, 6));
  CHECK(third->lambda_sq(R({10})) == rat(1, 12));
  CHECK(third->tail_sum_sq(VertexAddr::root(), 0).value() == rat(3));
  CHECK(third->tail_sum_quartic(VertexAddr::root(), 0).value() == rat(25, 27));

  // theta = 1 is admissible: the root seed is not itself a weight.
  auto unit = build_hyponormal_rooted(rat(1));
  CHECK(unit->lambda_sq(R({1})) == rat(1, 2));
  CHECK(unit->lambda_sq(R({2})) == rat(1, 4));
  CHECK(unit->tail_sum_sq(VertexAddr::root(), 0).value() == rat(1));

  for (auto& f : {fam, third, unit}) {
    for (auto u : {VertexAddr::root(), R({1}), R({4, 2}), R({9, 1, 3})}) {
      check_tail_consistency(*f, u);
      check_cursor(*f, u);
      check_identity(*f, u);
      // quartic bound and range constraint on a window
      CHECK(f->tail_sum_quartic(u, 0).value() <= rat(1));
      for (std::int64_t j = 1; j <= 12; ++j) {
        Rational w = f->lambda_sq(u.child(j));
        CHECK(w.sign() > 0);
        CHECK(w < rat(1));
      }
    }
  }
}

TEST_CASE("hyponormal rootless schedule") {
  auto fam = build_hyponormal_rootless();
  CHECK(fam->lambda_sq(L(2)) == rat(1, 2));
  CHECK(fam->lambda_sq(L(1, {2})) == rat(3, 4));
  CHECK(fam->lambda_sq(L(0, {1})) == rat(1, 2));  // u_1 follows the rooted schedule, r = 1/2
  CHECK(fam->lambda_sq(L(0, {4})) == rat(1, 4));
  // Boundary case: spine quartic sum is exactly 1.
  CHECK(fam->tail_sum_quartic(L(1), 0).value() == rat(1));
  CHECK(fam->tail_sum_quartic(L(0), 0).value() == rat(5, 6));
  CHECK(fam->tail_sum_sq(L(1), 0).value() == rat(2));

  for (auto u : {L(0), L(2), L(1, {2}), L(0, {4}), L(3, {2, 1})}) {
    check_tail_consistency(*fam, u);
    check_cursor(*fam, u);
    check_identity(*fam, u);
  }
}

TEST_CASE("non-hyponormal weights") {
  auto fam = build_non_hyponormal(rat(1));
  CHECK(fam->lambda_sq(R({2})) == rat(1, 4));
  // alpha^2 = 4, delta = 1/8 below [2]:
  CHECK(fam->lambda_sq(R({2, 1})) == rat(7, 2));
  CHECK(fam->lambda_sq(R({2, 2})) == rat(1, 4));
  CHECK(fam->lambda_sq(R({2, 3})) == rat(1, 8));
  CHECK(fam->tail_sum_sq(R({2}), 0).value() == rat(4));  // realizes alpha^2 exactly
  // First children across branches grow without bound: 2^j - 1/2.
  CHECK(fam->lambda_sq(R({1, 1})) == rat(3, 2));
  CHECK(fam->lambda_sq(R({3, 1})) == rat(15, 2));
  CHECK(fam->lambda_sq(R({5, 1})) == rat(63, 2));
  // Square-root inequality |lambda_1 - alpha| < 1 in its rational form
  // 4*alpha^2 > (1 + alpha^2*delta)^2 for alpha^2 = 4, delta = 1/8:
  CHECK(rat(4) * rat(4) > (rat(1) + rat(4) * rat(1, 8)).sq());
  // Deeper layers return to the geometric rule.
  CHECK(fam->lambda_sq(R({2, 1, 1})) == rat(1, 7));

  for (auto u : {VertexAddr::root(), R({1}), R({2}), R({2, 1}), R({1, 2, 3})}) {
    check_tail_consistency(*fam, u);
    check_cursor(*fam, u);
    check_identity(*fam, u);
  }

  // A seed above 1 puts the alpha^2 <= 1 branch of delta into play.
  auto wide = build_non_hyponormal(rat(1, 4));
  CHECK(wide->lambda_sq(R({1})) == rat(2));
  CHECK(wide->lambda_sq(R({1, 1})) == rat(1, 4));  // A = 1/2, delta = 1/2
  check_tail_consistency(*wide, R({1}));
  check_cursor(*wide, R({1}));
  check_identity(*wide, R({1}));
}

TEST_CASE("perturbation changes exactly one weight") {
  auto base = build_square_trivial_rooted(rat(1));
  auto fam = build_perturbed(base, R({1}));
  CHECK(fam->lambda_sq(R({1})) == rat(3));  // 1 + zeta^2 = 1 + 2
  CHECK(fam->lambda_sq(R({2})) == base->lambda_sq(R({2})));
  CHECK(fam->lambda_sq(R({1, 1})) == base->lambda_sq(R({1, 1})));
  CHECK(fam->tail_sum_sq(VertexAddr::root(), 0).value() == rat(7, 2));
  CHECK(fam->tail_sum_sq(VertexAddr::root(), 1).value() == rat(1, 2));
  CHECK(fam->tail_sum_sq(R({1}), 0).value() == rat(2));  // children untouched
  CHECK(!fam->inner_tail(VertexAddr::root(), 0)->is_finite());
  // Criterion series at the root: 3/2 from v0, then lambda^4 terms.
  CHECK(fam->criterion_tail(VertexAddr::root(), 0)->value() == rat(19, 12));
  CHECK(!fam->has_reciprocal_norm_identity());

  check_cursor(*fam, VertexAddr::root());
  check_cursor(*fam, R({1}));
  check_tail_consistency(*fam, VertexAddr::root());

  auto fam2 = build_perturbed(base, R({2}));
  CHECK(fam2->lambda_sq(R({2})) == rat(5));  // 1 + 4
  CHECK(fam2->tail_sum_sq(VertexAddr::root(), 1).value() == rat(21, 4));

  auto deep = build_perturbed(base, R({2, 3}));
  check_cursor(*deep, R({2}));      // lambda patch layer
  check_cursor(*deep, VertexAddr::root());  // zeta patch layer
  check_tail_consistency(*deep, R({2}));

  CHECK_THROWS_AS(build_perturbed(base, VertexAddr::root()), std::invalid_argument);
}

TEST_CASE("construction specs parse, validate and reprint") {
  auto spec = ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=1/1");
  CHECK(spec.mode == ConstructionMode::SquareTrivial);
  CHECK(spec.rooted);
  CHECK(*spec.theta == rat(1));
  CHECK(spec.str() == "mode=sqtrivial;rooted=1;theta=1/1");

  auto p = build(ConstructionSpec::parse("mode=perturb;v0=1"));
  CHECK(p.spec.str() == "mode=perturb;rooted=1;theta=1/1;v0=1");
  CHECK(p.family->lambda_sq(R({1})) == rat(3));

  auto rootless = build(ConstructionSpec::parse("mode=hypo;rooted=0"));
  CHECK(!rootless.tree->is_rooted());
  CHECK(rootless.spec.str() == "mode=hypo;rooted=0");

  CHECK_THROWS_AS(ConstructionSpec::parse("mode=bogus"), std::invalid_argument);
  CHECK_THROWS_AS(ConstructionSpec::parse("rooted=1"), std::invalid_argument);
  CHECK_THROWS_AS(ConstructionSpec::parse("mode=hypo;rooted=2"), std::invalid_argument);
  CHECK_THROWS_AS(ConstructionSpec::parse("mode=hypo;foo=1"), std::invalid_argument);
  CHECK_THROWS_AS(build(ConstructionSpec::parse("mode=nonhypo;rooted=0")),
                  std::invalid_argument);
  CHECK_THROWS_AS(build(ConstructionSpec::parse("mode=sqtrivial;rooted=0;theta=1/2")),
                  std::invalid_argument);
  CHECK_THROWS_AS(build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;v0=1")),
                  std::invalid_argument);
  CHECK_THROWS_AS(build(ConstructionSpec::parse("mode=perturb;rooted=1")),
                  std::invalid_argument);
  CHECK_THROWS_AS(build(ConstructionSpec::parse("mode=perturb;rooted=1;v0=ε")),
                  std::invalid_argument);
  CHECK_THROWS_AS(build(ConstructionSpec::parse("mode=perturb;rooted=0;v0=1")),
                  std::invalid_argument);  // rooted address in rootless tree
  CHECK_THROWS_AS(build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=0/1")),
                  std::invalid_argument);
}

TEST_CASE("identical specs produce byte-identical dumps") {
  for (const char* s : {"mode=sqtrivial;rooted=1;theta=2/3", "mode=hypo;rooted=0",
                        "mode=nonhypo;rooted=1;theta=1/1", "mode=perturb;rooted=1;v0=2.1"}) {
    auto a = build(ConstructionSpec::parse(s));
    auto b = build(ConstructionSpec::parse(s));
    CHECK(format_weight_dump(*a.tree, *a.family, 3, 4) ==
          format_weight_dump(*b.tree, *b.family, 3, 4));
  }
}
