#include "automl/metalearning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "automl/errors.hpp"
#include "automl/metrics.hpp"

namespace automl {

MetaDataset::MetaDataset()
    : data_(std::make_shared<const std::vector<MetaInstance>>()) {}

void MetaDataset::append(MetaInstance instance) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto next = std::make_shared<std::vector<MetaInstance>>(*data_);
  instance.timestamp = next_timestamp_++;
  next->push_back(std::move(instance));
  data_ = std::move(next);
}

std::shared_ptr<const std::vector<MetaInstance>> MetaDataset::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return data_;
}

size_t MetaDataset::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return data_->size();
}

std::string MetaDataset::to_jsonl() const {
  auto data = snapshot();
  std::ostringstream os;
  for (const auto& inst : *data) {
    nlohmann::json j{{"features", inst.features},
                     {"label", inst.label},
                     {"group", inst.group},
                     {"timestamp", inst.timestamp}};
    os << j.dump() << "\n";
  }
  return os.str();
}

void MetaDataset::load_jsonl(const std::string& text) {
  auto next = std::make_shared<std::vector<MetaInstance>>();
  uint64_t last = 0;
  std::istringstream is(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      MetaInstance inst;
      inst.features = j.at("features").get<std::vector<double>>();
      inst.label = j.at("label").get<double>();
      inst.group = j.at("group").get<std::string>();
      inst.timestamp = j.at("timestamp").get<uint64_t>();
      if (!next->empty() && inst.timestamp <= last)
        throw DataFormatError("meta dataset timestamps must increase (line " +
                              std::to_string(line_no) + ")");
      last = inst.timestamp;
      next->push_back(std::move(inst));
    } catch (const nlohmann::json::exception& e) {
      throw DataFormatError("bad meta instance at line " +
                            std::to_string(line_no) + ": " + e.what());
    }
  }
  std::lock_guard<std::mutex> lock(mutex_);
  next_timestamp_ = next->empty() ? 0 : last + 1;
  data_ = std::move(next);
}

AutoMLConfiguration ConfigurationSpace::draw(const SearchSpaceTree& tree,
                                             Rng& rng) const {
  AutoMLConfiguration omega;
  ActivationMask raw;
  raw.bits.resize(tree.size());
  for (auto& bit : raw.bits) bit = rng.bernoulli(0.5) ? 1 : 0;
  omega.mask = normalize_mask(tree, raw);
  omega.holdout_fraction = rng.uniform(holdout_lo, holdout_hi);
  omega.use_ensemble = rng.bernoulli(0.5);
  omega.use_incremental = rng.bernoulli(0.5);
  omega.reshuffle_validation = rng.bernoulli(0.5);
  return omega;
}

ConstraintSet ConstraintSpace::draw(Rng& rng) const {
  if (search_times.empty())
    throw InvalidInputError("constraint space has no search-time grid");
  ConstraintSet c;
  c.search_time_s = search_times[rng.uniform_index(search_times.size())];

  auto maybe = [&](const char* key) -> std::optional<double> {
    auto it = grid.thresholds.find(key);
    if (it == grid.thresholds.end() || it->second.empty()) return std::nullopt;
    bool include = rng.bernoulli(include_probability);
    size_t column = rng.uniform_index(it->second.size());
    if (!include) return std::nullopt;
    return it->second[column];
  };
  c.training_time_s = maybe("training_time_s");
  c.inference_time_s = maybe("inference_time_s");
  c.pipeline_size_bytes = maybe("pipeline_size_bytes");
  c.equal_opportunity_min = maybe("equal_opportunity_min");
  for (const auto& [key, row] : grid.thresholds) {
    if (key == "training_time_s" || key == "inference_time_s" ||
        key == "pipeline_size_bytes" || key == "equal_opportunity_min" ||
        key == "search_time_s")
      continue;
    if (auto t = maybe(key.c_str())) c.customs[key] = *t;
  }
  return c;
}

SearchRunner make_simulated_runner(const SearchSpaceTree& tree,
                                   Clock* budget_clock, SearchOptions options) {
  return [&tree, budget_clock, options](const Dataset& d,
                                        const AutoMLConfiguration& omega,
                                        const ConstraintSet& c, uint64_t seed) {
    SimulatedClock clock;
    SearchResult result = run_search(tree, d, omega, c, seed, clock, options);
    if (budget_clock) budget_clock->charge(result.search_duration_s);
    return result;
  };
}

AutoMLConfiguration default_configuration(const SearchSpaceTree& tree) {
  AutoMLConfiguration omega;
  omega.mask = all_active_mask(tree);
  omega.holdout_fraction = 0.33;
  omega.use_ensemble = true;
  omega.use_incremental = true;
  omega.reshuffle_validation = false;
  return omega;
}

double label_run(const SearchRunner& runner, const Dataset& d,
                 const ConstraintSet& c, const AutoMLConfiguration& omega,
                 const AutoMLConfiguration& default_omega, int n_runs,
                 uint64_t seed) {
  if (n_runs < 1) throw InvalidInputError("label_run: n_runs < 1");

  std::vector<SearchResult> omega_runs;
  omega_runs.reserve(n_runs);
  bool any_satisfied = false;
  for (int i = 0; i < n_runs; ++i) {
    omega_runs.push_back(
        runner(d, omega, c, substream(seed, "label-run", static_cast<uint64_t>(i))));
    any_satisfied = any_satisfied || omega_runs.back().satisfied;
  }
  // A configuration that never yields a pipeline loses outright; the
  // default is not even executed.
  if (!any_satisfied) return 0.0;

  int wins = 0;
  for (int i = 0; i < n_runs; ++i) {
    if (!omega_runs[i].satisfied) continue;
    SearchResult def = runner(d, default_omega, c,
                              substream(seed, "label-run", static_cast<uint64_t>(i)));
    if (!def.satisfied ||
        omega_runs[i].best_metrics.balanced_accuracy >
            def.best_metrics.balanced_accuracy)
      ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(n_runs);
}

namespace {

MetaTask draw_task(const SearchSpaceTree& tree, const MetaSpaces& spaces,
                   Rng& rng) {
  MetaTask task;
  task.dataset_index = rng.uniform_index(spaces.repository.size());
  task.constraints = spaces.constraints.draw(rng);
  task.omega = spaces.configurations.draw(tree, rng);
  return task;
}

MetaInstance label_task(const SearchSpaceTree& tree, const MetaSpaces& spaces,
                        const LabelingOptions& labeling, const MetaTask& task,
                        uint64_t seed) {
  const Dataset& d = spaces.repository[task.dataset_index];
  MetaInstance inst;
  inst.features =
      encode(tree, d, task.constraints, task.omega, spaces.custom_names);
  inst.label = label_run(labeling.runner, d, task.constraints, task.omega,
                         labeling.default_omega, labeling.n_runs, seed);
  inst.group = d.name;
  return inst;
}

}  // namespace

void cold_start(MetaDataset& meta, const SearchSpaceTree& tree,
                const MetaSpaces& spaces, const LabelingOptions& labeling,
                int k, uint64_t seed) {
  if (k < 1) throw InvalidInputError("cold_start: k < 1");
  if (spaces.repository.empty())
    throw InvalidInputError("cold_start: empty dataset repository");
  for (int i = 0; i < k; ++i) {
    Rng rng(substream(seed, "cold-start", static_cast<uint64_t>(i)));
    MetaTask task = draw_task(tree, spaces, rng);
    meta.append(label_task(tree, spaces, labeling, task,
                           substream(seed, "cold-label",
                                     static_cast<uint64_t>(i))));
  }
}

namespace {

RandomForestModel fit_acquisition_forest(const std::vector<MetaInstance>& meta,
                                         int forest_trees, uint64_t seed) {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  X.reserve(meta.size());
  for (const auto& inst : meta) {
    if (!X.empty() && inst.features.size() != X.front().size())
      throw InvalidInputError("meta instances disagree on feature width");
    X.push_back(inst.features);
    y.push_back(inst.label);
  }
  ForestParams params;
  params.mode = ForestMode::Regression;
  params.n_trees = forest_trees;
  params.seed = seed;
  return forest_fit(X, y, params);
}

MetaTask acquire_from_forest(const RandomForestModel& forest,
                             const SearchSpaceTree& tree,
                             const MetaSpaces& spaces, Rng& rng,
                             int pool_size) {
  if (pool_size < 1) throw InvalidInputError("acquire_uncertain: empty pool");
  MetaTask best;
  double best_std = -1.0;
  for (int i = 0; i < pool_size; ++i) {
    MetaTask task = draw_task(tree, spaces, rng);
    auto features = encode(tree, spaces.repository[task.dataset_index],
                           task.constraints, task.omega, spaces.custom_names);
    double spread = forest_predict_std(forest, features);
    if (spread > best_std) {
      best_std = spread;
      best = std::move(task);
    }
  }
  return best;
}

}  // namespace

MetaTask acquire_uncertain(const std::vector<MetaInstance>& meta,
                           const SearchSpaceTree& tree,
                           const MetaSpaces& spaces, Rng& rng, int pool_size,
                           int forest_trees) {
  if (meta.empty()) throw InvalidInputError("acquire_uncertain: empty meta data");
  RandomForestModel forest =
      fit_acquisition_forest(meta, forest_trees, rng.next_u64());
  return acquire_from_forest(forest, tree, spaces, rng, pool_size);
}

SamplingStats alternating_sample(MetaDataset& meta, const SearchSpaceTree& tree,
                                 const MetaSpaces& spaces,
                                 const LabelingOptions& labeling,
                                 double budget_s, size_t max_iterations,
                                 int workers, uint64_t seed,
                                 Clock& budget_clock, int acquire_pool_size,
                                 int acquire_forest_trees) {
  if (meta.size() == 0)
    throw InvalidInputError("alternating_sample requires a cold start");
  if (workers < 1) throw InvalidInputError("alternating_sample: workers < 1");

  const double start = budget_clock.now();
  std::atomic<size_t> claimed{0};
  std::atomic<size_t> uncertainty{0};
  std::atomic<size_t> random_draws{0};
  std::atomic<size_t> appended{0};

  auto worker_loop = [&](int w) {
    Rng rng(substream(seed, "sample-worker", static_cast<uint64_t>(w)));
    const uint64_t label_root =
        substream(seed, "sample-label", static_cast<uint64_t>(w));
    // Each worker keeps its acquisition forest until the meta data has
    // doubled, so total fitting work stays linear in the instance count.
    RandomForestModel forest;
    size_t fitted_on = 0;
    for (uint64_t local = 0;; ++local) {
      if (budget_clock.now() - start >= budget_s) break;
      if (claimed.fetch_add(1) >= max_iterations) break;

      MetaTask task;
      if (rng.bernoulli(0.5)) {
        auto snap = meta.snapshot();
        if (fitted_on == 0 || snap->size() >= 2 * fitted_on) {
          forest = fit_acquisition_forest(*snap, acquire_forest_trees,
                                          rng.next_u64());
          fitted_on = snap->size();
        }
        task = acquire_from_forest(forest, tree, spaces, rng,
                                   acquire_pool_size);
        uncertainty.fetch_add(1);
      } else {
        task = draw_task(tree, spaces, rng);
        random_draws.fetch_add(1);
      }
      meta.append(label_task(tree, spaces, labeling, task,
                             substream(label_root, "iteration", local)));
      appended.fetch_add(1);
    }
  };

  if (workers == 1) {
    worker_loop(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker_loop, w);
    for (auto& t : threads) t.join();
  }

  SamplingStats stats;
  stats.appended = appended.load();
  stats.uncertainty_draws = uncertainty.load();
  stats.random_draws = random_draws.load();
  return stats;
}

std::vector<size_t> time_fold_bounds(size_t n) {
  constexpr size_t kFolds = 10;
  std::vector<size_t> bounds(kFolds + 1);
  for (size_t i = 0; i <= kFolds; ++i) bounds[i] = (i + 1) * n / (kFolds + 1);
  return bounds;
}

namespace {

struct TunedForest {
  RandomForestModel model;
  double cv_score = 0.0;
};

double r_squared(const std::vector<double>& truth,
                 const std::vector<double>& pred) {
  double mean = 0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double ss_tot = 0, ss_res = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
  }
  if (ss_tot == 0.0) return 0.0;
  return 1.0 - ss_res / ss_tot;
}

double f1_score(const std::vector<double>& truth,
                const std::vector<double>& prob) {
  double tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    bool pos = truth[i] > 0.5;
    bool hat = prob[i] >= 0.5;
    if (hat && pos) ++tp;
    if (hat && !pos) ++fp;
    if (!hat && pos) ++fn;
  }
  double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  return precision + recall > 0 ? 2 * precision * recall / (precision + recall)
                                : 0.0;
}

// Train on everything before each fold boundary, score on the fold itself.
TunedForest tune_forest(const std::vector<std::vector<double>>& X,
                        const std::vector<double>& y, ForestMode mode,
                        uint64_t seed) {
  const size_t n = X.size();
  const size_t f = X.front().size();
  constexpr int kFolds = 10;

  std::vector<size_t> bounds = time_fold_bounds(n);

  struct Combo {
    int trees;
    int depth;
    int features;
  };
  std::vector<Combo> combos;
  const int sqrt_f = std::max(1, static_cast<int>(std::llround(std::sqrt(
                                     static_cast<double>(f)))));
  const int third_f = std::max(1, static_cast<int>(f / 3));
  for (int trees : {50, 100})
    for (int depth : {8, 0})
      for (int features : {sqrt_f, third_f})
        combos.push_back({trees, depth, features});

  int best_combo = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (size_t ci = 0; ci < combos.size(); ++ci) {
    double total = 0;
    int folds_used = 0;
    for (int k = 0; k < kFolds; ++k) {
      size_t train_end = bounds[k];
      size_t val_end = bounds[k + 1];
      if (train_end == 0 || val_end <= train_end) continue;
      std::vector<std::vector<double>> train_x(X.begin(),
                                               X.begin() + train_end);
      std::vector<double> train_y(y.begin(), y.begin() + train_end);
      ForestParams params;
      params.mode = mode;
      params.n_trees = combos[ci].trees;
      params.max_depth = combos[ci].depth;
      params.max_features = combos[ci].features;
      params.seed = substream(seed, "cv-fold", ci * kFolds + k);
      RandomForestModel model = forest_fit(train_x, train_y, params);

      std::vector<double> truth(y.begin() + train_end, y.begin() + val_end);
      std::vector<double> pred;
      pred.reserve(truth.size());
      for (size_t i = train_end; i < val_end; ++i)
        pred.push_back(forest_predict(model, X[i]));
      total += mode == ForestMode::Regression ? r_squared(truth, pred)
                                              : f1_score(truth, pred);
      ++folds_used;
    }
    double mean = folds_used > 0 ? total / folds_used : 0.0;
    if (mean > best_score) {
      best_score = mean;
      best_combo = static_cast<int>(ci);
    }
  }

  ForestParams params;
  params.mode = mode;
  params.n_trees = combos[best_combo].trees;
  params.max_depth = combos[best_combo].depth;
  params.max_features = combos[best_combo].features;
  params.seed = substream(seed, "final-fit");
  return {forest_fit(X, y, params), best_score};
}

std::vector<double> omega_features(const SearchSpaceTree& tree,
                                   const AutoMLConfiguration& omega) {
  std::vector<double> out{omega.holdout_fraction,
                          omega.use_ensemble ? 1.0 : 0.0,
                          omega.use_incremental ? 1.0 : 0.0,
                          omega.reshuffle_validation ? 1.0 : 0.0};
  for (double b : mask_to_features(tree, omega.mask)) out.push_back(b);
  return out;
}

}  // namespace

MetaModels train_meta_models(const MetaDataset& meta,
                             const SearchSpaceTree& tree,
                             const std::vector<std::string>& custom_names,
                             uint64_t seed) {
  auto data = meta.snapshot();
  if (data->size() < 20)
    throw InsufficientDataError("need at least 20 meta instances, have " +
                                std::to_string(data->size()));

  std::vector<std::vector<double>> X;
  std::vector<double> y_reg, y_cls;
  X.reserve(data->size());
  for (const auto& inst : *data) {
    if (!X.empty() && inst.features.size() != X.front().size())
      throw InvalidInputError("meta instances disagree on feature width");
    X.push_back(inst.features);
    y_reg.push_back(inst.label);
    y_cls.push_back(inst.label > 0.0 ? 1.0 : 0.0);
  }

  MetaModels models;
  models.tree_version = tree.version;
  models.feature_count = X.front().size();
  models.custom_names = custom_names;
  models.regression =
      tune_forest(X, y_reg, ForestMode::Regression, substream(seed, "reg")).model;
  models.classification =
      tune_forest(X, y_cls, ForestMode::Classification, substream(seed, "cls"))
          .model;
  return models;
}

nlohmann::json MetaModels::to_json() const {
  return {{"tree_version", tree_version},
          {"feature_count", feature_count},
          {"custom_names", custom_names},
          {"regression", forest_to_json(regression)},
          {"classification", forest_to_json(classification)}};
}

MetaModels MetaModels::from_json(const nlohmann::json& j) {
  MetaModels models;
  try {
    models.tree_version = j.at("tree_version").get<std::string>();
    models.feature_count = j.at("feature_count").get<size_t>();
    models.custom_names =
        j.at("custom_names").get<std::vector<std::string>>();
    models.regression = forest_from_json(j.at("regression"));
    models.classification = forest_from_json(j.at("classification"));
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("bad meta-models JSON: ") + e.what());
  }
  return models;
}

nlohmann::json pool_to_json(const ConfigPool& pool) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& mined : pool) {
    entries.push_back({{"omega", mined.omega.to_json()},
                       {"dataset", mined.dataset},
                       {"constraints", mined.constraints},
                       {"predicted_score", mined.predicted_score}});
  }
  return {{"pool", entries}};
}

ConfigPool pool_from_json(const nlohmann::json& j) {
  ConfigPool pool;
  try {
    for (const auto& entry : j.at("pool")) {
      MinedConfiguration mined;
      mined.omega = AutoMLConfiguration::from_json(entry.at("omega"));
      mined.dataset = entry.at("dataset").get<std::string>();
      mined.constraints = entry.at("constraints");
      mined.predicted_score = entry.at("predicted_score").get<double>();
      pool.push_back(std::move(mined));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("bad configuration pool JSON: ") +
                          e.what());
  }
  return pool;
}

ConfigPool mine_pool(const MetaModels& models, const SearchSpaceTree& tree,
                     const MetaSpaces& spaces, int n_tasks, int bo_iterations,
                     uint64_t seed) {
  if (n_tasks < 1) throw InvalidInputError("mine_pool: n_tasks < 1");
  if (bo_iterations < 1) throw InvalidInputError("mine_pool: bo_iterations < 1");
  if (spaces.repository.empty())
    throw InvalidInputError("mine_pool: empty dataset repository");

  constexpr int kRandomInit = 8;
  constexpr int kProposalPool = 32;

  ConfigPool pool;
  pool.reserve(n_tasks);
  for (int task = 0; task < n_tasks; ++task) {
    Rng rng(substream(seed, "mine-task", static_cast<uint64_t>(task)));
    const Dataset& d = spaces.repository[rng.uniform_index(spaces.repository.size())];
    ConstraintSet c = spaces.constraints.draw(rng);

    // Dataset and constraint blocks stay frozen; only omega varies.
    std::vector<double> prefix = dataset_features(d);
    for (double v : constraint_features(c, spaces.custom_names))
      prefix.push_back(v);
    auto query = [&](const AutoMLConfiguration& omega) {
      std::vector<double> features = prefix;
      for (double v : omega_features(tree, omega)) features.push_back(v);
      return forest_predict(models.regression, features);
    };

    std::vector<std::vector<double>> history_x;
    std::vector<double> history_y;
    AutoMLConfiguration incumbent;
    double incumbent_value = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < bo_iterations; ++it) {
      AutoMLConfiguration omega;
      if (static_cast<int>(history_x.size()) < kRandomInit) {
        omega = spaces.configurations.draw(tree, rng);
      } else {
        ForestParams params;
        params.mode = ForestMode::Regression;
        params.n_trees = 25;
        params.seed = rng.next_u64();
        RandomForestModel surrogate =
            forest_fit(history_x, history_y, params);
        double best_acq = -std::numeric_limits<double>::infinity();
        for (int p = 0; p < kProposalPool; ++p) {
          AutoMLConfiguration candidate = spaces.configurations.draw(tree, rng);
          auto features = omega_features(tree, candidate);
          double acq = forest_predict(surrogate, features) +
                       forest_predict_std(surrogate, features);
          if (acq > best_acq) {
            best_acq = acq;
            omega = std::move(candidate);
          }
        }
      }
      double value = query(omega);
      history_x.push_back(omega_features(tree, omega));
      history_y.push_back(value);
      if (value > incumbent_value) {
        incumbent_value = value;
        incumbent = std::move(omega);
      }
    }

    pool.push_back({std::move(incumbent), d.name, c.to_json(), incumbent_value});
  }
  return pool;
}

const MinedConfiguration& rank_pool(const MetaModels& models,
                                    const ConfigPool& pool,
                                    const SearchSpaceTree& tree,
                                    const Dataset& d, const ConstraintSet& c) {
  if (pool.empty()) throw InvalidInputError("rank_pool: empty pool");

  std::vector<double> prefix = dataset_features(d);
  for (double v : constraint_features(c, models.custom_names))
    prefix.push_back(v);

  size_t best = 0;
  double best_prob = -1.0;
  for (size_t i = 0; i < pool.size(); ++i) {
    std::vector<double> features = prefix;
    for (double v : omega_features(tree, pool[i].omega)) features.push_back(v);
    double prob = forest_predict(models.classification, features);
    if (prob > best_prob) {
      best_prob = prob;
      best = i;
    }
  }
  return pool[best];
}

AutoMLConfiguration dynamic_configure(const MetaModels& models,
                                      const ConfigPool& pool,
                                      const SearchSpaceTree& tree,
                                      const Dataset& d, const ConstraintSet& c) {
  return rank_pool(models, pool, tree, d, c).omega;
}

std::map<std::string, std::vector<double>> collect_metric_samples(
    const SearchSpaceTree& tree, const std::vector<Dataset>& datasets,
    int n_samples, uint64_t seed) {
  if (datasets.empty())
    throw InvalidInputError("collect_metric_samples: no datasets");
  if (n_samples < 1)
    throw InvalidInputError("collect_metric_samples: n_samples < 1");

  const ActivationMask mask = all_active_mask(tree);
  std::map<std::string, std::vector<double>> samples;
  for (int i = 0; i < n_samples; ++i) {
    Rng rng(substream(seed, "metric-sample", static_cast<uint64_t>(i)));
    const Dataset& d = datasets[static_cast<size_t>(i) % datasets.size()];
    SplitIndices split = stratified_split(d, 0.33, rng.next_u64(), 0, false);
    Dataset train = take_rows(d, split.train);
    Dataset validation = take_rows(d, split.validation);

    PipelineCandidate candidate = sample_candidate(tree, mask, rng);
    SimulatedClock clock;
    auto tp = fit(tree, candidate, train, rng.next_u64(), clock);
    double per_instance = 0.0;
    auto preds = predict(*tp, validation, clock, &per_instance);

    samples["training_time_s"].push_back(tp->training_time_s);
    samples["inference_time_s"].push_back(per_instance);
    samples["pipeline_size_bytes"].push_back(tp->size_bytes);
    if (d.has_sensitive())
      samples["equal_opportunity_min"].push_back(
          equal_opportunity(validation.labels, preds, validation.sensitive));
  }
  return samples;
}

}  // namespace automl
