#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "automl/clock.hpp"
#include "automl/dataset.hpp"
#include "automl/learners.hpp"

namespace automl {

// Search constraints (search/evaluation time) limit the optimization process
// and are enforced by the search loop. ML application constraints
// (training/inference time, size, equal opportunity, customs) describe the
// final pipeline and are scored through distance().
enum class ConstraintKind {
  SearchTime,
  EvaluationTime,
  TrainingTime,
  InferenceTime,
  PipelineSize,
  EqualOpportunity,
  Custom,
};

enum class BoundDirection { UpperBound, LowerBound };

// EqualOpportunity is a floor; every time/size constraint is a ceiling.
BoundDirection direction_of(ConstraintKind kind);

// Threshold names double as JSON keys. Absent keys mean unconstrained;
// search_time_s is mandatory.
struct ConstraintSet {
  double search_time_s = 0.0;
  std::optional<double> evaluation_time_s;
  std::optional<double> training_time_s;
  std::optional<double> inference_time_s;
  std::optional<double> pipeline_size_bytes;
  std::optional<double> equal_opportunity_min;
  std::map<std::string, double> customs;

  // InvalidInputError on non-positive time/size thresholds, search time
  // missing, or equal_opportunity_min outside [0, 1].
  void validate() const;

  nlohmann::json to_json() const;
  static ConstraintSet from_json(const nlohmann::json& j);
};

// Per-constraint distance to satisfaction, keyed by threshold name.
struct ConstraintEvaluation {
  std::map<std::string, double> delta;
  double total = 0.0;
  bool satisfied = true;
};

// distance() never sees search/evaluation time; those live in SearchBudget.
// Upper bounds: delta = max(0, (measured - t) / t).
// Lower bounds: delta = max(0, (t - measured) / t), or a unit penalty when
// t = 0 and the measurement still falls short.
// Custom constraints contribute 0/1; missing results count as violations.
ConstraintEvaluation distance(const PipelineMetrics& metrics,
                              const ConstraintSet& set);

struct SearchBudget {
  double start = 0.0;
  double search_time_limit_s = 0.0;
  double evaluation_time_limit_s = std::numeric_limits<double>::infinity();
};

SearchBudget budget_init(const ConstraintSet& set, Clock& clock);

// Boundary inclusive: exactly exhausting the budget counts as exceeded.
bool budget_exceeded(const SearchBudget& b, double now);
bool evaluation_budget_exceeded(const SearchBudget& b, double eval_start,
                                double now);

// User-defined pass/fail check over a fitted pipeline.
using CustomPredicate = std::function<bool(
    const TrainedPipeline& pipeline, double training_time_s,
    const Dataset& train, const Dataset& validation, double threshold,
    const nlohmann::json& extras)>;

class ConstraintRegistry {
 public:
  // RegistrationError if the name is already taken.
  void register_custom(const std::string& name, CustomPredicate predicate);

  bool contains(const std::string& name) const;
  const CustomPredicate& at(const std::string& name) const;

  // Sorted, so meta-feature layouts derived from it are stable.
  std::vector<std::string> names() const;
  size_t size() const { return customs_.size(); }

 private:
  std::map<std::string, CustomPredicate> customs_;
};

// Empirical threshold grid from random-run metric samples. Keys match
// ConstraintSet JSON keys; equal_opportunity_min percentiles are computed on
// (1 - EO) and mapped back, so the 2nd percentile is the tightest.
struct ThresholdGrid {
  std::vector<double> percentiles;
  std::map<std::string, std::vector<double>> thresholds;

  nlohmann::json to_json() const;
  static ThresholdGrid from_json(const nlohmann::json& j);
};

// Linear-interpolation percentiles per metric; InvalidInputError when a
// metric has no samples or percentiles are outside [0, 100].
ThresholdGrid derive_thresholds(
    const std::map<std::string, std::vector<double>>& samples,
    const std::vector<double>& percentiles);

// Plain linear-interpolation percentile over unsorted values.
double percentile(std::vector<double> values, double p);

}  // namespace automl
