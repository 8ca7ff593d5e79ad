#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "automl/constraints.hpp"
#include "automl/dataset.hpp"
#include "automl/forest.hpp"
#include "automl/metafeatures.hpp"
#include "automl/optimizer.hpp"
#include "automl/rng.hpp"

namespace automl {

struct MetaInstance {
  std::vector<double> features;
  double label = 0.0;     // win fraction against the default configuration
  std::string group;      // source dataset
  uint64_t timestamp = 0; // append order, assigned by MetaDataset
};

// Append-only store shared by sampling workers. Appends take a short
// exclusive lock; readers get an immutable snapshot.
class MetaDataset {
 public:
  MetaDataset();

  void append(MetaInstance instance);
  std::shared_ptr<const std::vector<MetaInstance>> snapshot() const;
  size_t size() const;

  std::string to_jsonl() const;

  // Replaces the content; appends afterwards continue the timestamp
  // sequence, which is what lets an interrupted run resume.
  void load_jsonl(const std::string& text);

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const std::vector<MetaInstance>> data_;
  uint64_t next_timestamp_ = 0;
};

// Random AutoML configurations: coin-flipped raw mask (then normalized),
// holdout uniform in [lo, hi], fair coins for the three flags.
struct ConfigurationSpace {
  double holdout_lo = 0.1;
  double holdout_hi = 0.5;

  AutoMLConfiguration draw(const SearchSpaceTree& tree, Rng& rng) const;
};

// Random constraint sets over a percentile grid. Search time always comes
// from `search_times`; every other grid row is included with probability
// `include_probability` at a uniformly drawn grid column.
struct ConstraintSpace {
  ThresholdGrid grid;
  std::vector<double> search_times;
  double include_probability = 0.5;

  ConstraintSet draw(Rng& rng) const;
};

struct MetaSpaces {
  std::vector<Dataset> repository;
  ConstraintSpace constraints;
  ConfigurationSpace configurations;
  std::vector<std::string> custom_names;
};

// One (d, c, omega) triple to be labeled.
struct MetaTask {
  size_t dataset_index = 0;
  ConstraintSet constraints;
  AutoMLConfiguration omega;
};

// Injectable search execution so tests can count or mock runs.
using SearchRunner = std::function<SearchResult(
    const Dataset& d, const AutoMLConfiguration& omega, const ConstraintSet& c,
    uint64_t seed)>;

// Runs each search on its own simulated clock and charges the elapsed
// simulated seconds to `budget_clock` (pass null to skip charging). This is
// what keeps whole meta-training runs deterministic.
SearchRunner make_simulated_runner(const SearchSpaceTree& tree,
                                   Clock* budget_clock,
                                   SearchOptions options = {});

// All-active mask, 33% holdout, ensembling and incremental training on,
// no reshuffling: the anchor configuration that labels are measured against.
AutoMLConfiguration default_configuration(const SearchSpaceTree& tree);

// Fraction of paired runs where omega's best BA strictly beats the
// default's (unsatisfied default counts as a loss for the default; ties are
// losses for omega). When no omega run satisfies the constraints the label
// is 0 and the default is never executed.
double label_run(const SearchRunner& runner, const Dataset& d,
                 const ConstraintSet& c, const AutoMLConfiguration& omega,
                 const AutoMLConfiguration& default_omega, int n_runs,
                 uint64_t seed);

struct LabelingOptions {
  SearchRunner runner;
  AutoMLConfiguration default_omega;
  int n_runs = 3;
};

// K independently drawn and labeled triples.
void cold_start(MetaDataset& meta, const SearchSpaceTree& tree,
                const MetaSpaces& spaces, const LabelingOptions& labeling,
                int k, uint64_t seed);

// Argmax of regression-forest prediction std over a random pool of triples;
// ties keep the earliest draw.
MetaTask acquire_uncertain(const std::vector<MetaInstance>& meta,
                           const SearchSpaceTree& tree,
                           const MetaSpaces& spaces, Rng& rng, int pool_size,
                           int forest_trees = 25);

struct SamplingStats {
  size_t appended = 0;
  size_t uncertainty_draws = 0;
  size_t random_draws = 0;
};

// Fair coin between a random triple and an uncertainty pick, label, append;
// workers run the loop concurrently on disjoint seed streams until the
// budget clock or the iteration cap stops them.
SamplingStats alternating_sample(MetaDataset& meta, const SearchSpaceTree& tree,
                                 const MetaSpaces& spaces,
                                 const LabelingOptions& labeling,
                                 double budget_s, size_t max_iterations,
                                 int workers, uint64_t seed,
                                 Clock& budget_clock,
                                 int acquire_pool_size = 32,
                                 int acquire_forest_trees = 25);

struct MetaModels {
  std::string tree_version;
  size_t feature_count = 0;
  std::vector<std::string> custom_names;
  RandomForestModel regression;      // win fraction, drives mining
  RandomForestModel classification;  // P(wins at least once), drives ranking

  nlohmann::json to_json() const;
  static MetaModels from_json(const nlohmann::json& j);
};

// Fold boundaries for time-ordered cross-validation over n instances:
// eleven cut points (i+1)*n/11; fold k trains on [0, bounds[k]) and
// validates on [bounds[k], bounds[k+1]).
std::vector<size_t> time_fold_bounds(size_t n);

// Tunes (trees in {50,100}) x (depth in {8, unbounded}) x (feature
// subsample in {sqrt(F), F/3}) by 10-fold time-ordered cross-validation
// (R^2 for regression, F1 for classification), then refits on everything.
// InsufficientDataError below 20 instances.
MetaModels train_meta_models(const MetaDataset& meta,
                             const SearchSpaceTree& tree,
                             const std::vector<std::string>& custom_names,
                             uint64_t seed);

struct MinedConfiguration {
  AutoMLConfiguration omega;
  std::string dataset;         // provenance: the task it was mined for
  nlohmann::json constraints;  // provenance
  double predicted_score = 0.0;
};

using ConfigPool = std::vector<MinedConfiguration>;

nlohmann::json pool_to_json(const ConfigPool& pool);
ConfigPool pool_from_json(const nlohmann::json& j);

// Per task: draw (d, c), freeze their feature blocks, and run a small
// surrogate-guided search over omega alone that maximizes the regression
// model's predicted win fraction.
ConfigPool mine_pool(const MetaModels& models, const SearchSpaceTree& tree,
                     const MetaSpaces& spaces, int n_tasks, int bo_iterations,
                     uint64_t seed);

// Pool entry with the highest classification probability for (d, c);
// ties resolve to the lowest index. InvalidInputError on an empty pool.
const MinedConfiguration& rank_pool(const MetaModels& models,
                                    const ConfigPool& pool,
                                    const SearchSpaceTree& tree,
                                    const Dataset& d, const ConstraintSet& c);

AutoMLConfiguration dynamic_configure(const MetaModels& models,
                                      const ConfigPool& pool,
                                      const SearchSpaceTree& tree,
                                      const Dataset& d, const ConstraintSet& c);

// Metric distributions from random pipelines on simulated clocks, keyed like
// ConstraintSet JSON; feeds derive_thresholds. Equal-opportunity samples come
// only from datasets carrying a sensitive attribute.
std::map<std::string, std::vector<double>> collect_metric_samples(
    const SearchSpaceTree& tree, const std::vector<Dataset>& datasets,
    int n_samples, uint64_t seed);

}  // namespace automl
