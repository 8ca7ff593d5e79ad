#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "automl/clock.hpp"
#include "automl/dataset.hpp"
#include "automl/search_space.hpp"

namespace automl {

struct Matrix {
  std::vector<double> data;
  size_t rows = 0;
  size_t cols = 0;

  Matrix() = default;
  Matrix(size_t r, size_t c) : data(r * c, 0.0), rows(r), cols(c) {}
  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
};

// Resolved, human-readable view of a PipelineCandidate. Only the chosen
// classifier family's hyperparameters are meaningful.
struct PipelineSpec {
  std::string encoding;
  int one_hot_max_categories = 16;
  std::string imputation;
  std::string scaling;
  std::string sampling;
  double oversample_ratio = 1.0;
  std::string class_weighting;
  std::string classifier;

  int knn_k = 5;
  std::string knn_weights = "uniform";
  int knn_p = 2;

  double nb_var_smoothing = 1e-9;
  bool nb_uniform_priors = false;

  std::string dt_criterion = "gini";
  int dt_max_depth = 16;
  int dt_min_split = 2;
  int dt_min_leaf = 1;

  int rf_trees = 32;
  int rf_max_depth = 16;
  double rf_feature_frac = 0.5;
  int rf_min_leaf = 1;
  bool rf_bootstrap = true;

  double sgd_alpha = 1e-4;
  double sgd_eta0 = 0.01;
  int sgd_epochs = 10;
  std::string sgd_schedule = "invscaling";
};

PipelineSpec resolve_spec(const SearchSpaceTree& tree,
                          const PipelineCandidate& candidate);

// Everything a constraint can be checked against. Custom constraint results
// are filled in by whoever evaluates the registered predicates (the
// optimizer); a constraint present in the set but absent here fails closed.
struct PipelineMetrics {
  double balanced_accuracy = 0.0;
  double training_time_s = 0.0;
  double inference_time_per_instance_s = 0.0;
  double size_bytes = 0.0;
  double equal_opportunity = 1.0;  // 1.0 when no sensitive attribute
  std::map<std::string, bool> custom_results;
};

class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;
  virtual std::vector<int32_t> predict(const Matrix& X) const = 0;

  // Analytic size model inputs: 8 bytes per parameter plus 8 bytes per
  // stored training cell (instance-based models only).
  virtual double parameter_count() const = 0;
  virtual double stored_cells() const { return 0; }

  // Modeled seconds charged to a simulated clock.
  virtual double predict_cost(size_t query_rows) const = 0;

  virtual nlohmann::json info() const { return nlohmann::json::object(); }
};

// Column schema captured at fit time; predict rejects rows that disagree.
struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  size_t n_categories = 0;
};

struct OneHotColumn {
  std::vector<int32_t> kept;  // codes with their own slot; everything else -> other
};

struct TrainedPipeline {
  PipelineSpec spec;
  PipelineCandidate candidate;
  std::vector<ColumnSchema> schema;
  int n_classes = 0;

  // Fitted preprocessing state.
  std::vector<double> imputer_fill;          // per numeric column
  std::vector<OneHotColumn> one_hot;         // per nominal column
  std::vector<std::vector<double>> code_frequency;  // per nominal column, [code+1]
  std::vector<double> scale_center, scale_extent;   // per encoded column

  std::unique_ptr<ClassifierModel> classifier;

  size_t encoded_width = 0;
  size_t train_rows = 0;
  double training_time_s = 0;
  double size_bytes = 0;

  // Applies the fitted transforms to rows sharing the training schema.
  Matrix encode_rows(const Dataset& rows) const;
};

// Fits the whole pipeline on `train`. Training time is measured around the
// entire fit on the supplied clock (simulated clocks are charged the modeled
// cost). Deterministic given (candidate, train, seed).
std::shared_ptr<const TrainedPipeline> fit(const SearchSpaceTree& tree,
                                           const PipelineCandidate& candidate,
                                           const Dataset& train, uint64_t seed,
                                           Clock& clock);

// One label per row; reports total time / row count through
// `inference_time_per_instance` when non-null (0 for zero rows).
std::vector<int32_t> predict(const TrainedPipeline& tp, const Dataset& rows,
                             Clock& clock,
                             double* inference_time_per_instance = nullptr);

// 64-byte header per persisted component (encoder, imputer, scaler,
// classifier) + 8 bytes per classifier parameter + 8 per stored cell.
double measure_pipeline_size(const TrainedPipeline& tp);

}  // namespace automl
