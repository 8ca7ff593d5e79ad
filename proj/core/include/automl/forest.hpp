#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace automl {

enum class ForestMode { Regression, Classification };

struct ForestParams {
  ForestMode mode = ForestMode::Regression;
  int n_trees = 50;
  int max_depth = 0;     // 0 = unbounded
  int min_samples_leaf = 1;
  int max_features = 0;  // features sampled per node; 0 = all
  bool bootstrap = true;
  uint64_t seed = 0;
};

// feature == -1 marks a leaf; `value` is the mean target, which for binary
// classification targets doubles as the positive-class fraction.
struct ForestNode {
  int32_t feature = -1;
  double threshold = 0.0;
  int32_t left = -1;
  int32_t right = -1;
  double value = 0.0;
};

struct RandomForestModel {
  ForestParams params;
  size_t n_features = 0;
  std::vector<std::vector<ForestNode>> trees;

  double tree_predict(size_t tree, const std::vector<double>& x) const;
};

// Bagged CART trees with per-node feature subsampling. Binary classification
// is regression on 0/1 targets: the variance criterion picks the same splits
// as Gini for two classes, and leaves carry the positive fraction.
RandomForestModel forest_fit(const std::vector<std::vector<double>>& X,
                             const std::vector<double>& y,
                             const ForestParams& params);

// Mean of per-tree predictions (probability in classification mode).
double forest_predict(const RandomForestModel& model,
                      const std::vector<double>& x);

// Population standard deviation of per-tree predictions.
double forest_predict_std(const RandomForestModel& model,
                          const std::vector<double>& x);

nlohmann::json forest_to_json(const RandomForestModel& model);
RandomForestModel forest_from_json(const nlohmann::json& j);

}  // namespace automl
