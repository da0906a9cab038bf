// Microbenchmarks for the per-sample hot paths (projection, mirror steps,
// score evaluation) and the grid-evaluation kernels behind plots and KL
// quadrature.

#include <vector>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "mixest/baselines.hpp"
#include "mixest/dictionary.hpp"
#include "mixest/estimators.hpp"
#include "mixest/rng.hpp"
#include "mixest/simplex.hpp"
#include "mixest/targets.hpp"

namespace {

using namespace mixest;

// Three-layer configuration from the four-mode benchmark, M = 1189.
Dictionary reference_dictionary() {
  return Dictionary::multiscale_gaussian(DomainBox{},
                                         {{8, 1.5}, {15, 0.5}, {30, 0.15}});
}

Eigen::VectorXd random_vector(Eigen::Index m, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

void BM_ProjectSimplex(benchmark::State& state) {
  const Eigen::VectorXd v = random_vector(state.range(0), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_simplex(v));
  }
}
BENCHMARK(BM_ProjectSimplex)->Arg(64)->Arg(1189);

void BM_SgdStep(benchmark::State& state) {
  const Dictionary dict = reference_dictionary();
  const WeightVector m = WeightVector::uniform(dict.size());
  const Eigen::VectorXd g =
      dict.stochastic_gradient(m, SamplePoint::continuous(1.0, -2.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sgd_step(m, g, 0.05));
  }
}
BENCHMARK(BM_SgdStep);

void BM_ExpSmdStep(benchmark::State& state) {
  const Dictionary dict = reference_dictionary();
  const WeightVector m = WeightVector::uniform(dict.size());
  const Eigen::VectorXd g =
      dict.stochastic_gradient(m, SamplePoint::continuous(1.0, -2.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exp_smd_step(m, g, 0.05));
  }
}
BENCHMARK(BM_ExpSmdStep);

void BM_StochasticGradient(benchmark::State& state) {
  const Dictionary dict = reference_dictionary();
  const WeightVector m = WeightVector::uniform(dict.size());
  const SamplePoint zeta = SamplePoint::continuous(0.3, 2.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dict.stochastic_gradient(m, zeta));
  }
}
BENCHMARK(BM_StochasticGradient);

void BM_FullSmdStep(benchmark::State& state) {
  const Dictionary dict = reference_dictionary();
  Rng rng(11);
  const std::vector<SamplePoint> stream = Target::four_mode().sample(rng, 4096);
  EstimatorState est = EstimatorState::init(
      MirrorKind::NegativeEntropy, StepSchedule::power_decay(0.1, 0.35),
      WeightVector::uniform(dict.size()));
  std::size_t i = 0;
  for (auto _ : state) {
    est = smd_step(std::move(est), dict, stream[i++ % stream.size()]);
    benchmark::DoNotOptimize(est.current);
  }
}
BENCHMARK(BM_FullSmdStep);

void BM_MixtureGrid(benchmark::State& state) {
  const Dictionary dict = reference_dictionary();
  const WeightVector m = WeightVector::uniform(dict.size());
  const auto side = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dict.mixture_grid(m, side));
  }
}
BENCHMARK(BM_MixtureGrid)->Arg(100)->Arg(400);

void BM_KdeDensityGrid(benchmark::State& state) {
  Rng rng(23);
  const std::vector<SamplePoint> pts = Target::four_mode().sample(rng, 2000);
  KdeModel model;
  model.samples.resize(2000, 2);
  for (int i = 0; i < 2000; ++i) {
    model.samples(i, 0) = pts[static_cast<std::size_t>(i)].x;
    model.samples(i, 1) = pts[static_cast<std::size_t>(i)].y;
  }
  model.bandwidth = 0.2;
  const auto side = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.density_grid(DomainBox{}, side));
  }
}
BENCHMARK(BM_KdeDensityGrid)->Arg(100)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
