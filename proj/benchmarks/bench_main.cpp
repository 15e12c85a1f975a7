#include <benchmark/benchmark.h>

#include "vessel/fixtures.hpp"
#include "vessel/ops.hpp"
#include "vessel/realize.hpp"

namespace {

using namespace vessel;

void BM_SplineBuild(benchmark::State& state) {
  const TimeGrid g(0.0, 1.0, 129);
  std::vector<CMat> samples;
  samples.reserve(g.points);
  for (int i = 0; i < g.points; ++i) {
    CMat m(4, 4);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        m(r, c) = cd(std::sin(g.node(i) + r), std::cos(g.node(i) * (c + 1)));
      }
    }
    samples.push_back(m);
  }
  for (auto _ : state) {
    MatFn f(g, samples);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_SplineBuild);

void BM_TransferEval(benchmark::State& state) {
  const DiffVessel v = fixtures::vc2();
  const cd lam(2.3, 0.7);
  double t = 0.0;
  for (auto _ : state) {
    t = t < 0.9 ? t + 0.01 : 0.0;
    benchmark::DoNotOptimize(transfer(v, lam, t));
  }
}
BENCHMARK(BM_TransferEval);

void BM_VerifyVessel(benchmark::State& state) {
  const DiffVessel v = fixtures::vc2();
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_vessel(v, 1e-6));
  }
}
BENCHMARK(BM_VerifyVessel);

void BM_FundamentalMatrix(benchmark::State& state) {
  const Signature sig = fixtures::vg(1.0).sig;
  const cd lam(1.5, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fundamental_output(sig, lam, 0.0));
  }
}
BENCHMARK(BM_FundamentalMatrix);

void BM_EvolutionSemigroup(benchmark::State& state) {
  const TimeGrid g(0.0, 1.0, 129);
  CMat A(3, 3);
  A << cd(0.2, 0.1), cd(-0.1, 0.2), cd(0.05), cd(0.3, -0.2), cd(0.1, 0.1),
      cd(0, 0.2), cd(-0.2), cd(0.15), cd(0.1, -0.1);
  const MatFn A2 = MatFn::constant(g, A);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolution_semigroup(A2, 0.0, 1.0));
  }
}
BENCHMARK(BM_EvolutionSemigroup);

void BM_CascadeConnect(benchmark::State& state) {
  const DiffVessel v0 = fixtures::v0();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cascade(v0, v0));
  }
}
BENCHMARK(BM_CascadeConnect);

}  // namespace

BENCHMARK_MAIN();
