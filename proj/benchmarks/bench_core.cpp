// Microbenchmarks for the hot paths: weight oracle lookups, cursor stepping
// (the divergence-transcript inner loop) and criterion evaluation.

#include <benchmark/benchmark.h>

#include "treeshift/construct.hpp"
#include "treeshift/diagnose.hpp"

using namespace treeshift;

namespace {

Construction sqtrivial() {
  return build(ConstructionSpec::parse("mode=sqtrivial;rooted=1;theta=1/1"));
}

void BM_LambdaSqByAddress(benchmark::State& state) {
  Construction c = sqtrivial();
  std::vector<std::int64_t> path(static_cast<std::size_t>(state.range(0)), 3);
  VertexAddr v = VertexAddr::rooted(path);
  for (auto _ : state) {
    Rational w = c.family->lambda_sq(v);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_LambdaSqByAddress)->Arg(2)->Arg(8)->Arg(32);

void BM_CursorSteps(benchmark::State& state) {
  Construction c = sqtrivial();
  for (auto _ : state) {
    auto cursor = c.family->child_cursor(VertexAddr::root());
    ChildWeight cw;
    Rational sum(0);
    for (std::int64_t j = 0; j < state.range(0); ++j) {
      cursor->next_into(cw);
      Rational term = cw.lambda_sq;
      term *= cw.zeta_sq.value();
      sum += term;
    }
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CursorSteps)->Arg(1000)->Arg(100000);

void BM_DivergenceCertificate(benchmark::State& state) {
  Construction c = sqtrivial();
  DiagnoseOptions opts;
  Rational threshold(state.range(0));
  for (auto _ : state) {
    Certificate cert = square_domain_test(*c.tree, *c.family,
                                          FiniteVector::basis(VertexAddr::root()), threshold,
                                          opts);
    benchmark::DoNotOptimize(cert);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DivergenceCertificate)->Arg(10000)->Arg(1000000);

void BM_HyponormalityTest(benchmark::State& state) {
  Construction c = build(ConstructionSpec::parse("mode=hypo;rooted=1;theta=1/2"));
  DiagnoseOptions opts;
  opts.width = state.range(0);
  for (auto _ : state) {
    Certificate cert = hyponormality_test(*c.tree, *c.family, VertexAddr::root(), opts);
    benchmark::DoNotOptimize(cert);
  }
}
BENCHMARK(BM_HyponormalityTest)->Arg(16)->Arg(64);

void BM_AddressParseRoundTrip(benchmark::State& state) {
  VertexAddr a = VertexAddr::rootless(3, {7, 2, 9, 4});
  for (auto _ : state) {
    VertexAddr b = VertexAddr::parse(a.str());
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_AddressParseRoundTrip);

}  // namespace

BENCHMARK_MAIN();
