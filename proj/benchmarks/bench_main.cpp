#include <benchmark/benchmark.h>

#include <nlohmann/json.hpp>

#include "manie/error.hpp"
#include "manie/experiment.hpp"
#include "manie/manie.hpp"
#include "manie/random.hpp"
#include "manie/solvers.hpp"

using namespace manie;

namespace {

DesignProblem random_problem(Eigen::Index m, Eigen::Index p) {
  Rng rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  DesignProblem prob;
  prob.phi.resize(m, p);
  prob.y.resize(m);
  prob.w.resize(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    for (Eigen::Index c = 0; c < p; ++c) prob.phi(t, c) = g(rng);
    prob.y(t) = g(rng);
    prob.w(t) = u(rng);
  }
  return prob;
}

ExperimentConfig karate(const std::string& dynamics, const std::string& method, const std::string& scenario) {
  return experiment_from_json(nlohmann::json{
      {"network", {{"generator", "fixture"}, {"path", std::string(MANIE_FIXTURE_DIR) + "/zachary.edges"}}},
      {"dynamics", nlohmann::json::parse(dynamics)},
      {"scenario", scenario},
      {"method", {{"name", method}}}});
}

}  // namespace

static void BM_WeightedRidge(benchmark::State& state) {
  const auto prob = random_problem(state.range(0), 66);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_ridge(prob, 1e-3, {true}));
}
BENCHMARK(BM_WeightedRidge)->Arg(60)->Arg(1000);

static void BM_WeightedLasso(benchmark::State& state) {
  const auto prob = random_problem(state.range(0), 33);
  LassoOptions opts;
  opts.scaling.standardize = true;
  for (auto _ : state) benchmark::DoNotOptimize(weighted_lasso(prob, 1e-2, opts));
}
BENCHMARK(BM_WeightedLasso)->Arg(60)->Arg(1000);

static void BM_Stridge(benchmark::State& state) {
  const auto prob = random_problem(state.range(0), 33);
  for (auto _ : state) benchmark::DoNotOptimize(stridge(prob, 1e-8, 0.1, {10, {true}}));
}
BENCHMARK(BM_Stridge)->Arg(60)->Arg(1000);

static void BM_ArniFit(benchmark::State& state) {
  const auto cfg = karate(R"({"model": "kuramoto1", "segments": 200})", "arni", "_2");
  const auto run = prepare_run(cfg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run.method->fit());
}
BENCHMARK(BM_ArniFit)->Unit(benchmark::kMillisecond);

static void BM_ManieEgStridge(benchmark::State& state) {
  auto cfg = karate(R"({"model": "eg"})", "eg_stridge", "_1");
  cfg.manie.lambda_quantile = 0.2;
  const auto run = prepare_run(cfg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_manie(*run.method, cfg.manie));
}
BENCHMARK(BM_ManieEgStridge)->Unit(benchmark::kMillisecond);

static void BM_ManieSis(benchmark::State& state) {
  const auto cfg = karate(R"({"model": "sis", "segments": 10})", "cs", "_2");
  const auto run = prepare_run(cfg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(run_manie(*run.method, cfg.manie));
}
BENCHMARK(BM_ManieSis)->Unit(benchmark::kMillisecond);

// LASSO non-convergence warnings would drown the table.
int main(int argc, char** argv) {
  set_warning_handler([](std::string_view) {});
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
