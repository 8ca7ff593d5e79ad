#pragma once

#include <string>
#include <vector>

#include "automl/constraints.hpp"
#include "automl/dataset.hpp"
#include "automl/optimizer.hpp"
#include "automl/search_space.hpp"

namespace automl {

// Absent constraints enter the meta-feature vector as "no demand" values:
// effectively-infinite ceilings, a zero fairness floor.
constexpr double kUnconstrainedUpperSentinel = 1e12;
constexpr double kUnconstrainedLowerSentinel = 0.0;

// [n_instances, log n_instances, n_features, log n_features, n_classes,
//  class entropy (nats), class-prob min, max, mean, std,
//  n_features / n_instances, nominal-to-numerical ratio]
std::vector<double> dataset_features(const Dataset& d);

// [search_time, training_time, inference_time, pipeline_size,
//  equal_opportunity] followed by one slot per name in `custom_names`
// (callers pass a registry's sorted names so layouts agree across runs).
std::vector<double> constraint_features(
    const ConstraintSet& c, const std::vector<std::string>& custom_names = {});

// Full vector: dataset block ++ constraint block ++
// [holdout_fraction, use_ensemble, use_incremental, reshuffle] ++ mask bits.
// Length is fixed at 12 + 5 + |customs| + 4 + tree.size().
std::vector<double> encode(const SearchSpaceTree& tree, const Dataset& d,
                           const ConstraintSet& c,
                           const AutoMLConfiguration& omega,
                           const std::vector<std::string>& custom_names = {});

// Best-so-far validation BA as a function of elapsed search time. BA is 0
// until the first constraint-satisfying evaluation lands.
struct CalibrationCurve {
  std::vector<double> time_s;  // strictly increasing
  std::vector<double> ba;      // non-decreasing

  double value_at(double t) const;  // step interpolation, 0 before the start

  std::string to_csv() const;  // header "time_s,balanced_accuracy"
  static CalibrationCurve from_csv(const std::string& text);
};

// Runs `repetitions` static searches per dataset with a `max_time_s` budget
// on fresh simulated clocks, averages the best-so-far traces on the merged
// time grid, and takes the monotone envelope.
CalibrationCurve build_curve(const SearchSpaceTree& tree,
                             const std::vector<Dataset>& datasets,
                             const AutoMLConfiguration& omega,
                             double max_time_s, int repetitions, uint64_t seed);

// Hardware mapping: how much time does the source machine need to match
// what the target machine reaches by t_target? Smallest source time whose
// BA meets the target's level, clamped to the source's last point.
double calibrate(const CalibrationCurve& source, const CalibrationCurve& target,
                 double t_target);

}  // namespace automl
