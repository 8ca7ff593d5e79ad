#include <benchmark/benchmark.h>

#include <vector>

#include "automl/clock.hpp"
#include "automl/constraints.hpp"
#include "automl/forest.hpp"
#include "automl/metafeatures.hpp"
#include "automl/metalearning.hpp"
#include "automl/optimizer.hpp"
#include "automl/rng.hpp"
#include "automl/search_space.hpp"
#include "automl/synthetic.hpp"

namespace {

using namespace automl;

struct ForestFixture {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  RandomForestModel model;

  ForestFixture() {
    Rng rng(7001);
    const size_t rows = 256, cols = 32;
    X.resize(rows, std::vector<double>(cols));
    y.resize(rows);
    for (size_t i = 0; i < rows; ++i) {
      for (size_t j = 0; j < cols; ++j) X[i][j] = rng.uniform(0.0, 1.0);
      y[i] = X[i][0] + 0.5 * X[i][1] + rng.uniform(-0.05, 0.05);
    }
    ForestParams params;
    params.n_trees = 50;
    params.seed = 7002;
    model = forest_fit(X, y, params);
  }
};

const ForestFixture& forest_fixture() {
  static const ForestFixture f;
  return f;
}

void BM_ForestFit(benchmark::State& state) {
  const auto& f = forest_fixture();
  ForestParams params;
  params.n_trees = static_cast<int>(state.range(0));
  params.seed = 7002;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forest_fit(f.X, f.y, params));
  }
}
BENCHMARK(BM_ForestFit)->Arg(10)->Arg(50);

void BM_ForestPredict(benchmark::State& state) {
  const auto& f = forest_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(forest_predict(f.model, f.X[0]));
  }
}
BENCHMARK(BM_ForestPredict);

void BM_ForestPredictStd(benchmark::State& state) {
  const auto& f = forest_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(forest_predict_std(f.model, f.X[0]));
  }
}
BENCHMARK(BM_ForestPredictStd);

void BM_NormalizeMask(benchmark::State& state) {
  SearchSpaceTree tree = build_default_space();
  Rng rng(7003);
  std::vector<ActivationMask> raw;
  for (int i = 0; i < 64; ++i) {
    ActivationMask m;
    m.bits.resize(tree.size());
    for (size_t b = 0; b < tree.size(); ++b) m.bits[b] = rng.next_u64() & 1;
    raw.push_back(m);
  }
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize_mask(tree, raw[i++ % raw.size()]));
  }
}
BENCHMARK(BM_NormalizeMask);

void BM_SampleCandidate(benchmark::State& state) {
  SearchSpaceTree tree = build_default_space();
  ActivationMask mask = all_active_mask(tree);
  Rng rng(7004);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_candidate(tree, mask, rng));
  }
}
BENCHMARK(BM_SampleCandidate);

void BM_EncodeQuery(benchmark::State& state) {
  SearchSpaceTree tree = build_default_space();
  Dataset d = synth::blobs("bench", 7005, 240, 8, 3, 3.0);
  ConstraintSet c;
  c.search_time_s = 10.0;
  c.training_time_s = 0.05;
  AutoMLConfiguration omega = default_configuration(tree);
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode(tree, d, c, omega));
  }
}
BENCHMARK(BM_EncodeQuery);

void BM_RankPool(benchmark::State& state) {
  SearchSpaceTree tree = build_default_space();
  Dataset d = synth::blobs("bench", 7005, 240, 8, 3, 3.0);
  ConstraintSet c;
  c.search_time_s = 10.0;
  c.training_time_s = 0.05;

  MetaModels models;
  models.tree_version = tree.version;
  AutoMLConfiguration probe = default_configuration(tree);
  models.feature_count = encode(tree, d, c, probe).size();
  {
    Rng rng(7006);
    const size_t rows = 128;
    std::vector<std::vector<double>> X(rows,
                                       std::vector<double>(models.feature_count));
    std::vector<double> y(rows);
    for (size_t i = 0; i < rows; ++i) {
      for (size_t j = 0; j < models.feature_count; ++j)
        X[i][j] = rng.uniform(0.0, 1.0);
      y[i] = (X[i][0] > 0.5) ? 1.0 : 0.0;
    }
    ForestParams params;
    params.mode = ForestMode::Classification;
    params.n_trees = 50;
    params.seed = 7007;
    models.classification = forest_fit(X, y, params);
    params.mode = ForestMode::Regression;
    models.regression = forest_fit(X, y, params);
  }

  ConfigPool pool;
  ConfigurationSpace omega_space;
  Rng rng(7008);
  for (int64_t i = 0; i < state.range(0); ++i) {
    MinedConfiguration entry;
    entry.omega = omega_space.draw(tree, rng);
    entry.dataset = "bench";
    pool.push_back(entry);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_pool(models, pool, tree, d, c));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RankPool)->Arg(64)->Arg(1024)->Arg(8192);

void BM_BudgetedSearch(benchmark::State& state) {
  SearchSpaceTree tree = build_default_space();
  Dataset d = synth::blobs("bench", 7009, 160, 4, 2, 3.0);
  ConstraintSet c;
  c.search_time_s = 0.25;
  AutoMLConfiguration omega = default_configuration(tree);
  uint64_t seed = 7010;
  for (auto _ : state) {
    SimulatedClock clock;
    benchmark::DoNotOptimize(run_search(tree, d, omega, c, seed++, clock));
  }
}
BENCHMARK(BM_BudgetedSearch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
