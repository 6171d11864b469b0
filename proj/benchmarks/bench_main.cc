#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "mpbandit/analysis.h"
#include "mpbandit/engine.h"
#include "mpbandit/env.h"
#include "mpbandit/experiment.h"
#include "mpbandit/random.h"

namespace {

using namespace mpbandit;

void BM_PhiloxUniform(benchmark::State& state) {
  RandomStream rng(42, 7);
  double sum = 0.0;
  for (auto _ : state) sum += rng.UniformDouble();
  benchmark::DoNotOptimize(sum);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxUniform);

void BM_StandardNormal(benchmark::State& state) {
  RandomStream rng(42, 7);
  double sum = 0.0;
  for (auto _ : state) sum += rng.StandardNormal();
  benchmark::DoNotOptimize(sum);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StandardNormal);

EnvironmentConfig BenchConfig(int arms, int players, std::int64_t horizon,
                              RewardDistribution kind) {
  EnvironmentConfig config;
  config.num_players = players;
  config.horizon = horizon;
  config.master_seed = 11;
  for (int i = 0; i < arms; ++i) {
    ArmSpec arm;
    arm.mean = 0.9 - 0.8 * i / arms;
    arm.distribution = kind;
    arm.sigma = 0.3;
    config.arms.push_back(arm);
  }
  return config;
}

void BM_SampleRound(benchmark::State& state) {
  const auto kind = static_cast<RewardDistribution>(state.range(1));
  Environment env(BenchConfig(static_cast<int>(state.range(0)), 2, 1 << 20, kind));
  std::vector<double> out(env.num_arms());
  std::int64_t t = 1;
  for (auto _ : state) {
    env.SampleRoundRewards(t++, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleRound)
    ->Args({8, static_cast<int>(RewardDistribution::kBernoulli)})
    ->Args({8, static_cast<int>(RewardDistribution::kBeta)})
    ->Args({8, static_cast<int>(RewardDistribution::kTruncatedGaussian)});

// Rounds per second for a full game with checkpoint-only tracing.
void BM_Game(benchmark::State& state, const char* algorithm) {
  const std::int64_t horizon = state.range(0);
  ExperimentSpec spec;
  spec.environment = BenchConfig(6, 3, horizon, RewardDistribution::kBernoulli);
  ParseAlgorithmName(algorithm, spec.algorithm);
  spec.algorithm.c_scale = 0.01;
  spec.algorithm.mu_lower = 0.1;
  Environment env(spec.environment);
  GameOptions options;
  options.fidelity = TraceFidelity::kCheckpoints;
  for (auto _ : state) {
    GameTrace trace = RunGame(env, MakePlayerFactory(spec), options);
    benchmark::DoNotOptimize(trace.final_regret);
  }
  state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK_CAPTURE(BM_Game, alg1, "alg1")->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Game, alg2, "alg2")->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Game, random, "random")->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_Lemma4Cell(benchmark::State& state) {
  double a = 0.11;
  int total = 0;
  for (auto _ : state) {
    total += CountScaledIntersections(a, 0.37, 0.59, 0.83, 1.5);
    a = a < 0.3 ? a + 1e-6 : 0.11;
  }
  benchmark::DoNotOptimize(total);
}
BENCHMARK(BM_Lemma4Cell);

}  // namespace

BENCHMARK_MAIN();
