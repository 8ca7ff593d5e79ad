#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "automl/constraints.hpp"
#include "automl/learners.hpp"
#include "automl/rng.hpp"
#include "automl/search_space.hpp"

namespace automl {

// One point in configuration space: which part of the pipeline space a
// search may touch and how the search itself behaves.
struct AutoMLConfiguration {
  ActivationMask mask;
  double holdout_fraction = 0.33;
  bool use_ensemble = true;
  bool use_incremental = true;
  bool reshuffle_validation = false;

  nlohmann::json to_json() const;
  static AutoMLConfiguration from_json(const nlohmann::json& j);
};

struct EvaluationRecord {
  PipelineCandidate candidate;
  size_t fidelity = 0;  // training rows actually used
  PipelineMetrics metrics;
  ConstraintEvaluation evaluation;
  double score = 0.0;
  double wall_time_s = 0.0;  // offset from search start when recorded

  int rungs_completed = 0;
  bool pruned = false;     // lost against the history median
  bool timed_out = false;  // per-candidate evaluation limit hit
  std::shared_ptr<const TrainedPipeline> pipeline;
};

// score = -sum(deltas) + [sum == 0] * ba: any violator ranks strictly below
// any satisfier, and satisfiers compete on balanced accuracy.
double constrained_objective(const ConstraintEvaluation& ev, double ba);

// Stratified holdout split. Validation takes floor(fraction * n_c) rows of
// every class, but always leaves at least one training row per class; a
// one-row class therefore never reaches validation. `round` only enters the
// shuffle seed when `reshuffle` is set.
struct SplitIndices {
  std::vector<int> train;
  std::vector<int> validation;
};
SplitIndices stratified_split(const Dataset& d, double validation_fraction,
                              uint64_t seed, int round, bool reshuffle);

struct ProposalOptions {
  int n_random_init = 10;
  int pool_size = 64;
  double kappa = 1.0;
  int surrogate_trees = 16;
  // Only the most recent records train the surrogate, so a single proposal
  // costs the same no matter how long the search has been running.
  int surrogate_window = 128;
};

// Random until `n_random_init` records exist, then the argmax of
// surrogate mean + kappa * std over a fresh random pool.
PipelineCandidate propose_next(const std::vector<EvaluationRecord>& history,
                               const SearchSpaceTree& tree,
                               const ActivationMask& mask, Rng& rng,
                               const ProposalOptions& options);

// A trained model's behaviour on the shared ensemble validation split.
struct EnsembleCandidate {
  std::vector<int32_t> validation_predictions;
  PipelineMetrics metrics;
  bool satisfied = true;  // eligibility gate
};

struct EnsembleSelection {
  std::vector<size_t> picks;  // member indices, repetition = vote weight
  std::vector<int32_t> votes;
  PipelineMetrics metrics;  // distinct members counted once for size/time
  ConstraintEvaluation evaluation;
  double validation_ba = 0.0;
};

// Caruana forward selection with replacement over satisfying members.
// Aggregate size/time sums distinct members once; equal opportunity and
// balanced accuracy are recomputed on the majority vote (ties to the lowest
// class index). Additions must strictly improve BA and keep the aggregate
// satisfied. Returns nothing when no member qualifies.
std::optional<EnsembleSelection> greedy_ensemble(
    const std::vector<EnsembleCandidate>& members,
    const std::vector<int32_t>& validation_labels,
    const std::vector<int8_t>& validation_sensitive, int n_classes,
    const ConstraintSet& constraints, int max_members);

struct SearchOptions {
  ProposalOptions proposal;
  int max_ensemble_members = 10;
  const ConstraintRegistry* registry = nullptr;
  nlohmann::json custom_extras = nlohmann::json::object();
};

enum class BestKind { None, Single, Ensemble };

struct SearchResult {
  bool satisfied = false;
  BestKind best_kind = BestKind::None;

  std::shared_ptr<const TrainedPipeline> best_pipeline;  // single winner
  std::optional<PipelineCandidate> best_candidate;

  // Ensemble winner: distinct trained members plus pick multiplicity.
  std::vector<std::shared_ptr<const TrainedPipeline>> ensemble_members;
  std::vector<size_t> ensemble_picks;  // indices into ensemble_members

  PipelineMetrics best_metrics;
  ConstraintEvaluation best_evaluation;

  std::vector<EvaluationRecord> history;
  double search_duration_s = 0.0;

  nlohmann::json report(const SearchSpaceTree& tree,
                        const ConstraintSet& constraints) const;
};

// Sequential model-based search under the ConstraintSet's time budget.
// Deterministic given (dataset, omega, constraints, seed) and a simulated
// clock. Zero completed evaluations yield best_kind = None, satisfied =
// false.
SearchResult run_search(const SearchSpaceTree& tree, const Dataset& dataset,
                        const AutoMLConfiguration& omega,
                        const ConstraintSet& constraints, uint64_t seed,
                        Clock& clock, const SearchOptions& options = {});

// Fidelity ladder used by incremental evaluation: 10C, 20C, 40C, ...
// capped at n_train (the cap replaces the first rung that would exceed it).
std::vector<size_t> fidelity_ladder(size_t n_train, int n_classes);

}  // namespace automl
