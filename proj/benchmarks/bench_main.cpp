#include <benchmark/benchmark.h>

#include <stackbandit/agents.hpp>
#include <stackbandit/confidence.hpp>
#include <stackbandit/envs.hpp>
#include <stackbandit/geometry.hpp>

#include <vector>

using namespace stackbandit;

namespace {

// Arguments: dimension, eps in hundredths.
void BM_SphereNet(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const double eps = state.range(1) / 100.0;
  std::size_t size = 0;
  for (auto _ : state) {
    RandomSource rng(1);
    size = build_net_sphere(d, eps, rng).size();
    benchmark::DoNotOptimize(size);
  }
  state.counters["points"] = static_cast<double>(size);
}
BENCHMARK(BM_SphereNet)->Args({3, 10})->Args({5, 30})->Args({6, 45})->Unit(benchmark::kMillisecond);

// Arguments: dimension, zeta in hundredths, eps in hundredths.
void BM_CapNet(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const double zeta = state.range(1) / 100.0;
  const double eps = state.range(2) / 100.0;
  std::size_t size = 0;
  for (auto _ : state) {
    RandomSource rng(2);
    size = build_net_cap(unit_vector(d, 0), zeta, eps, rng).size();
    benchmark::DoNotOptimize(size);
  }
  state.counters["points"] = static_cast<double>(size);
}
BENCHMARK(BM_CapNet)->Args({5, 95, 10})->Args({6, 30, 45})->Unit(benchmark::kMillisecond);

void BM_NetNearest(benchmark::State& state) {
  RandomSource rng(3);
  const Net net = build_net_sphere(5, 0.3, rng);
  std::vector<RealVector> queries;
  for (int i = 0; i < 256; ++i) queries.push_back(sample_uniform_sphere(rng, 5));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(net.nearest(queries[i++ % queries.size()]));
}
BENCHMARK(BM_NetNearest);

// One act/observe round of LinUCB over a candidate list of the given size.
void BM_LinUcbRound(benchmark::State& state) {
  RandomSource rng(4);
  std::vector<RealVector> cands;
  for (int i = 0; i < state.range(0); ++i) cands.push_back(sample_uniform_sphere(rng, 5));
  LinUcbOptions o;
  o.sigma_r = 0.2;
  LinUcbAgent agent(cands, 100000, o);
  const RealVector theta = sample_uniform_sphere(rng, 5);
  std::size_t t = 1;
  for (auto _ : state) {
    const RealVector a = agent.act(t++);
    agent.observe(a, a, theta.dot(a) + 0.2 * rng.normal());
  }
}
BENCHMARK(BM_LinUcbRound)->Arg(100)->Arg(1000)->Arg(10000);

void BM_LinUcbSphereRound(benchmark::State& state) {
  RandomSource rng(5);
  LinUcbOptions o;
  o.sigma_r = 0.2;
  LinUcbAgent agent = LinUcbAgent::over_sphere(static_cast<Eigen::Index>(state.range(0)), 100000, o);
  const RealVector theta = sample_uniform_sphere(rng, state.range(0));
  std::size_t t = 1;
  for (auto _ : state) {
    const RealVector a = agent.act(t++);
    agent.observe(a, a, theta.dot(a) + 0.2 * rng.normal());
  }
}
BENCHMARK(BM_LinUcbSphereRound)->Arg(5)->Arg(9);

void BM_EnvStep(benchmark::State& state) {
  const GameSpec specs[] = {GameSpec::relu_curse(10, 0.5), GameSpec::imitation(5), GameSpec::expert_guided(5, 0.5, 0.95),
                            GameSpec::polynomial(4, 2), GameSpec::optimism_trap(10, 0.5)};
  const GameSpec& spec = specs[state.range(0)];
  RandomSource rng(6);
  const Theta th = random_theta(spec, rng);
  const RealVector a = optimal_action(spec, th);
  const NoiseSpec noise{0.1, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(step(spec, th, noise, a, rng));
  state.SetLabel(std::string(to_string(spec.variant)));
}
BENCHMARK(BM_EnvStep)->DenseRange(0, 4);

void BM_ConfidenceIntersection(benchmark::State& state) {
  RandomSource rng(7);
  const RealVector theta = sample_uniform_sphere(rng, 3);
  RidgeRegression ridge(3, 1.0);
  for (int i = 0; i < 200; ++i) {
    const RealVector a = sample_uniform_sphere(rng, 3);
    ridge.add(a, theta.dot(a) + 0.2 * rng.normal());
  }
  const BallConfidence ball{theta, 0.3};
  const EllipsoidConfidence ell = ridge.confidence(1.5);
  RandomSource net_rng(8);
  const auto cands = build_net_sphere(3, 0.3, net_rng).points();
  for (auto _ : state) benchmark::DoNotOptimize(confidence_intersection(ball, ell, cands, rng));
  state.counters["candidates"] = static_cast<double>(cands.size());
}
BENCHMARK(BM_ConfidenceIntersection)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
