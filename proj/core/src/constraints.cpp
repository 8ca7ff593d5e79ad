#include "automl/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "automl/errors.hpp"

namespace automl {

BoundDirection direction_of(ConstraintKind kind) {
  return kind == ConstraintKind::EqualOpportunity ? BoundDirection::LowerBound
                                                  : BoundDirection::UpperBound;
}

namespace {

void require_positive(const std::optional<double>& v, const char* key) {
  if (v && !(*v > 0.0))
    throw InvalidInputError(std::string("constraint '") + key +
                            "' must be positive");
}

double hinge_upper(double measured, double t) {
  if (t > 0.0) return std::max(0.0, (measured - t) / t);
  return measured > t ? 1.0 : 0.0;
}

double hinge_lower(double measured, double t) {
  if (t > 0.0) return std::max(0.0, (t - measured) / t);
  return measured < t ? 1.0 : 0.0;
}

}  // namespace

void ConstraintSet::validate() const {
  if (!(search_time_s > 0.0))
    throw InvalidInputError("search_time_s is mandatory and must be positive");
  require_positive(evaluation_time_s, "evaluation_time_s");
  require_positive(training_time_s, "training_time_s");
  require_positive(inference_time_s, "inference_time_s");
  require_positive(pipeline_size_bytes, "pipeline_size_bytes");
  if (equal_opportunity_min &&
      (*equal_opportunity_min < 0.0 || *equal_opportunity_min > 1.0))
    throw InvalidInputError("equal_opportunity_min must lie in [0, 1]");
  for (const auto& [name, t] : customs)
    if (!std::isfinite(t))
      throw InvalidInputError("custom constraint '" + name +
                              "' has a non-finite threshold");
}

nlohmann::json ConstraintSet::to_json() const {
  nlohmann::json j;
  j["search_time_s"] = search_time_s;
  if (evaluation_time_s) j["evaluation_time_s"] = *evaluation_time_s;
  if (training_time_s) j["training_time_s"] = *training_time_s;
  if (inference_time_s) j["inference_time_s"] = *inference_time_s;
  if (pipeline_size_bytes) j["pipeline_size_bytes"] = *pipeline_size_bytes;
  if (equal_opportunity_min) j["equal_opportunity_min"] = *equal_opportunity_min;
  for (const auto& [name, t] : customs) j[name] = t;
  return j;
}

ConstraintSet ConstraintSet::from_json(const nlohmann::json& j) {
  ConstraintSet s;
  try {
    if (!j.is_object()) throw DataFormatError("constraints must be an object");
    for (const auto& [key, value] : j.items()) {
      if (!value.is_number())
        throw DataFormatError("constraint '" + key + "' must be numeric");
      double v = value.get<double>();
      if (key == "search_time_s")
        s.search_time_s = v;
      else if (key == "evaluation_time_s")
        s.evaluation_time_s = v;
      else if (key == "training_time_s")
        s.training_time_s = v;
      else if (key == "inference_time_s")
        s.inference_time_s = v;
      else if (key == "pipeline_size_bytes")
        s.pipeline_size_bytes = v;
      else if (key == "equal_opportunity_min")
        s.equal_opportunity_min = v;
      else
        s.customs[key] = v;
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("bad constraint JSON: ") + e.what());
  }
  return s;
}

ConstraintEvaluation distance(const PipelineMetrics& metrics,
                              const ConstraintSet& set) {
  ConstraintEvaluation ev;
  auto add = [&](const std::string& key, double delta) {
    ev.delta[key] = delta;
    ev.total += delta;
  };
  if (set.training_time_s)
    add("training_time_s", hinge_upper(metrics.training_time_s,
                                       *set.training_time_s));
  if (set.inference_time_s)
    add("inference_time_s", hinge_upper(metrics.inference_time_per_instance_s,
                                        *set.inference_time_s));
  if (set.pipeline_size_bytes)
    add("pipeline_size_bytes",
        hinge_upper(metrics.size_bytes, *set.pipeline_size_bytes));
  if (set.equal_opportunity_min)
    add("equal_opportunity_min",
        hinge_lower(metrics.equal_opportunity, *set.equal_opportunity_min));
  for (const auto& [name, threshold] : set.customs) {
    (void)threshold;
    auto it = metrics.custom_results.find(name);
    add(name, it != metrics.custom_results.end() && it->second ? 0.0 : 1.0);
  }
  ev.satisfied = ev.total == 0.0;
  return ev;
}

SearchBudget budget_init(const ConstraintSet& set, Clock& clock) {
  SearchBudget b;
  b.start = clock.now();
  b.search_time_limit_s = set.search_time_s;
  if (set.evaluation_time_s) b.evaluation_time_limit_s = *set.evaluation_time_s;
  return b;
}

bool budget_exceeded(const SearchBudget& b, double now) {
  return now - b.start >= b.search_time_limit_s;
}

bool evaluation_budget_exceeded(const SearchBudget& b, double eval_start,
                                double now) {
  return now - eval_start >= b.evaluation_time_limit_s;
}

void ConstraintRegistry::register_custom(const std::string& name,
                                         CustomPredicate predicate) {
  if (customs_.count(name))
    throw RegistrationError("constraint '" + name + "' is already registered");
  if (!predicate)
    throw RegistrationError("constraint '" + name + "' has no predicate");
  customs_[name] = std::move(predicate);
}

bool ConstraintRegistry::contains(const std::string& name) const {
  return customs_.count(name) > 0;
}

const CustomPredicate& ConstraintRegistry::at(const std::string& name) const {
  auto it = customs_.find(name);
  if (it == customs_.end())
    throw InvalidInputError("unknown custom constraint '" + name + "'");
  return it->second;
}

std::vector<std::string> ConstraintRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(customs_.size());
  for (const auto& [name, fn] : customs_) out.push_back(name);
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidInputError("percentile of empty sample");
  if (p < 0.0 || p > 100.0)
    throw InvalidInputError("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double rank = (static_cast<double>(values.size()) - 1.0) * p / 100.0;
  const size_t lo = static_cast<size_t>(rank);
  const double frac = rank - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

ThresholdGrid derive_thresholds(
    const std::map<std::string, std::vector<double>>& samples,
    const std::vector<double>& percentiles) {
  ThresholdGrid grid;
  grid.percentiles = percentiles;
  for (const auto& [key, values] : samples) {
    if (values.empty())
      throw InvalidInputError("no samples for metric '" + key + "'");
    std::vector<double> row;
    row.reserve(percentiles.size());
    const bool is_eo = key == "equal_opportunity_min";
    std::vector<double> basis = values;
    if (is_eo)
      for (auto& v : basis) v = 1.0 - v;
    for (double p : percentiles) {
      double t = percentile(basis, p);
      row.push_back(is_eo ? 1.0 - t : t);
    }
    grid.thresholds[key] = std::move(row);
  }
  return grid;
}

nlohmann::json ThresholdGrid::to_json() const {
  nlohmann::json j;
  j["percentiles"] = percentiles;
  j["thresholds"] = nlohmann::json::object();
  for (const auto& [key, row] : thresholds) j["thresholds"][key] = row;
  return j;
}

ThresholdGrid ThresholdGrid::from_json(const nlohmann::json& j) {
  ThresholdGrid grid;
  try {
    grid.percentiles = j.at("percentiles").get<std::vector<double>>();
    for (const auto& [key, row] : j.at("thresholds").items()) {
      grid.thresholds[key] = row.get<std::vector<double>>();
      if (grid.thresholds[key].size() != grid.percentiles.size())
        throw DataFormatError("threshold row '" + key +
                              "' does not match the percentile list");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("bad threshold grid JSON: ") + e.what());
  }
  return grid;
}

}  // namespace automl
