#include "automl/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "automl/errors.hpp"
#include "automl/metrics.hpp"
#include "automl/rng.hpp"

namespace automl {

namespace {

// Modeled per-operation costs in seconds, charged to simulated clocks so
// timing metrics and budget decisions are reproducible. The preprocessing
// base acts as a floor that bounds how many evaluations a budgeted search
// can perform per simulated second; family bases and per-cell terms are
// spread out so timing percentiles over random pipelines stay informative
// at desk-scale row counts.
constexpr double kPreprocFitBase = 5e-3;
constexpr double kPreprocFitPerCell = 2e-7;
constexpr double kPreprocApplyPerCell = 2e-8;
constexpr double kKnnFitBase = 4e-3;
constexpr double kKnnFitPerCell = 2e-6;
constexpr double kKnnPredictPerCell = 6e-8;
constexpr double kNbFitBase = 1e-3;
constexpr double kNbFitPerCell = 8e-7;
constexpr double kNbPredictPerCell = 4e-8;
constexpr double kTreeFitBase = 8e-3;
constexpr double kTreeFitPerUnit = 2.5e-6;  // unit = row * log2(rows) * feature
constexpr double kTreePredictPerRow = 1e-6;
constexpr double kForestFitBase = 2e-2;
constexpr double kForestPredictPerRowTree = 3e-7;
constexpr double kSgdFitBase = 5e-3;
constexpr double kSgdFitPerCell = 3e-6;  // cell = row * feature, per epoch
constexpr double kSgdPredictPerCell = 4e-8;

double tree_units(size_t rows, double features) {
  return static_cast<double>(rows) * std::log2(static_cast<double>(rows) + 2.0) *
         std::max(1.0, features);
}

int value_as_int(double v) { return static_cast<int>(std::llround(v)); }

}  // namespace

PipelineSpec resolve_spec(const SearchSpaceTree& tree,
                          const PipelineCandidate& cand) {
  if (cand.values.size() != tree.size())
    throw InvalidInputError("resolve_spec: candidate/tree size mismatch");
  auto choice = [&](const char* name) {
    const auto& n = tree.at(name);
    return n.choices[static_cast<size_t>(cand.values[n.id])];
  };
  auto num = [&](const char* name) { return cand.values[tree.at(name).id]; };

  PipelineSpec s;
  s.encoding = choice("encoding");
  s.one_hot_max_categories = value_as_int(num("one_hot.max_categories"));
  s.imputation = choice("imputation");
  s.scaling = choice("scaling");
  s.sampling = choice("sampling");
  s.oversample_ratio = num("random_oversample.target_ratio");
  s.class_weighting = choice("class_weighting");
  s.classifier = choice("classifier");

  s.knn_k = value_as_int(num("knn.n_neighbors"));
  s.knn_weights = choice("knn.weights");
  s.knn_p = value_as_int(num("knn.p"));

  s.nb_var_smoothing = num("gaussian_nb.var_smoothing");
  s.nb_uniform_priors = num("gaussian_nb.uniform_priors") != 0.0;

  s.dt_criterion = choice("decision_tree.criterion");
  s.dt_max_depth = value_as_int(num("decision_tree.max_depth"));
  s.dt_min_split = value_as_int(num("decision_tree.min_samples_split"));
  s.dt_min_leaf = value_as_int(num("decision_tree.min_samples_leaf"));

  s.rf_trees = value_as_int(num("random_forest.n_trees"));
  s.rf_max_depth = value_as_int(num("random_forest.max_depth"));
  s.rf_feature_frac = num("random_forest.max_features_frac");
  s.rf_min_leaf = value_as_int(num("random_forest.min_samples_leaf"));
  s.rf_bootstrap = num("random_forest.bootstrap") != 0.0;

  const char* sgd = s.classifier == "sgd_hinge" ? "sgd_hinge" : "sgd_logistic";
  s.sgd_alpha = num((std::string(sgd) + ".alpha").c_str());
  s.sgd_eta0 = num((std::string(sgd) + ".eta0").c_str());
  s.sgd_epochs = value_as_int(num((std::string(sgd) + ".epochs").c_str()));
  s.sgd_schedule = choice((std::string(sgd) + ".schedule").c_str());
  return s;
}

// ---------------------------------------------------------------------------
// Weighted multiclass CART shared by the decision-tree and random-forest
// classifiers.

namespace {

struct ZooTreeParams {
  bool entropy = false;
  int max_depth = 0;  // 0 = unbounded
  int min_split = 2;
  int min_leaf = 1;
  int max_features = 0;  // per-node subsample; 0 = all
};

struct ZooNode {
  int32_t feature = -1;
  double threshold = 0.0;
  int32_t left = -1;
  int32_t right = -1;
  int32_t leaf_class = 0;
};

double impurity(const std::vector<double>& counts, double total, bool entropy) {
  if (total <= 0) return 0.0;
  double v = entropy ? 0.0 : 1.0;
  for (double c : counts) {
    if (c <= 0) continue;
    double p = c / total;
    if (entropy)
      v -= p * std::log(p);
    else
      v -= p * p;
  }
  return v;
}

int32_t majority_class(const std::vector<double>& counts) {
  int32_t best = 0;
  for (size_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[best]) best = static_cast<int32_t>(c);
  return best;  // ties stay at the lowest index
}

struct ZooFrame {
  std::vector<int> rows;
  int depth;
  int node_index;
};

std::vector<ZooNode> build_zoo_tree(const Matrix& X,
                                    const std::vector<int32_t>& y,
                                    const std::vector<double>& w, int n_classes,
                                    const std::vector<int>& root_rows,
                                    const ZooTreeParams& params, Rng& rng) {
  std::vector<ZooNode> nodes;
  std::vector<ZooFrame> stack;
  nodes.emplace_back();
  stack.push_back({root_rows, 0, 0});

  const size_t n_features = X.cols;
  std::vector<int> feature_pool(n_features);
  for (size_t f = 0; f < n_features; ++f) feature_pool[f] = static_cast<int>(f);

  std::vector<double> counts(n_classes), left_counts(n_classes);
  while (!stack.empty()) {
    ZooFrame frame = std::move(stack.back());
    stack.pop_back();
    const auto& rows = frame.rows;

    std::fill(counts.begin(), counts.end(), 0.0);
    double total = 0;
    for (int r : rows) {
      counts[y[r]] += w[r];
      total += w[r];
    }
    ZooNode& node = nodes[frame.node_index];
    node.leaf_class = majority_class(counts);

    const double node_impurity = impurity(counts, total, params.entropy);
    const bool depth_capped =
        params.max_depth > 0 && frame.depth >= params.max_depth;
    if (rows.size() < static_cast<size_t>(params.min_split) ||
        rows.size() < static_cast<size_t>(2 * params.min_leaf) ||
        node_impurity <= 1e-12 || depth_capped)
      continue;

    size_t k = params.max_features > 0
                   ? std::min<size_t>(params.max_features, n_features)
                   : n_features;
    std::vector<int> feats = feature_pool;
    if (k < n_features) {
      for (size_t i = 0; i < k; ++i) {
        size_t j = i + rng.uniform_index(feats.size() - i);
        std::swap(feats[i], feats[j]);
      }
      feats.resize(k);
      std::sort(feats.begin(), feats.end());
    }

    int best_feature = -1;
    double best_threshold = 0;
    double best_score = node_impurity - 1e-12;
    std::vector<std::pair<double, int>> order;  // (value, row)
    for (int f : feats) {
      order.clear();
      for (int r : rows) order.emplace_back(X.at(r, f), r);
      std::sort(order.begin(), order.end());
      if (order.front().first == order.back().first) continue;

      std::fill(left_counts.begin(), left_counts.end(), 0.0);
      double left_total = 0;
      for (size_t i = 0; i + 1 < order.size(); ++i) {
        int r = order[i].second;
        left_counts[y[r]] += w[r];
        left_total += w[r];
        if (order[i].first == order[i + 1].first) continue;
        size_t nl = i + 1, nr = order.size() - nl;
        if (nl < static_cast<size_t>(params.min_leaf) ||
            nr < static_cast<size_t>(params.min_leaf))
          continue;
        double right_total = total - left_total;
        // Right counts derived from parent - left.
        double imp_l = params.entropy ? 0.0 : 1.0;
        double imp_r = params.entropy ? 0.0 : 1.0;
        for (int c = 0; c < n_classes; ++c) {
          double cl = left_counts[c];
          double cr = counts[c] - cl;
          if (cl > 0) {
            double p = cl / left_total;
            imp_l -= params.entropy ? p * std::log(p) : p * p;
          }
          if (cr > 0) {
            double p = cr / right_total;
            imp_r -= params.entropy ? p * std::log(p) : p * p;
          }
        }
        double weighted =
            (left_total * imp_l + right_total * imp_r) / std::max(total, 1e-12);
        if (weighted < best_score) {
          best_score = weighted;
          best_feature = f;
          best_threshold = (order[i].first + order[i + 1].first) / 2.0;
        }
      }
    }
    if (best_feature < 0) continue;

    std::vector<int> left_rows, right_rows;
    for (int r : rows)
      (X.at(r, best_feature) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    if (left_rows.empty() || right_rows.empty()) continue;

    int left_index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    int right_index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    ZooNode& parent = nodes[frame.node_index];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left_index;
    parent.right = right_index;
    stack.push_back({std::move(right_rows), frame.depth + 1, right_index});
    stack.push_back({std::move(left_rows), frame.depth + 1, left_index});
  }
  return nodes;
}

int32_t zoo_tree_predict(const std::vector<ZooNode>& nodes,
                         const Matrix& X, size_t row) {
  int i = 0;
  while (nodes[i].feature >= 0)
    i = X.at(row, nodes[i].feature) <= nodes[i].threshold ? nodes[i].left
                                                          : nodes[i].right;
  return nodes[i].leaf_class;
}

// ---------------------------------------------------------------------------
// Classifier implementations.

class KnnModel final : public ClassifierModel {
 public:
  KnnModel(Matrix X, std::vector<int32_t> y, std::vector<double> class_weight,
           int k, int p, bool distance_weighted)
      : X_(std::move(X)),
        y_(std::move(y)),
        class_weight_(std::move(class_weight)),
        k_(k),
        p_(p),
        distance_weighted_(distance_weighted) {}

  std::vector<int32_t> predict(const Matrix& Q) const override {
    std::vector<int32_t> out(Q.rows);
    std::vector<std::pair<double, int>> dist(X_.rows);
    const size_t k = std::min<size_t>(k_, X_.rows);
    std::vector<double> votes(class_weight_.size());
    for (size_t q = 0; q < Q.rows; ++q) {
      for (size_t r = 0; r < X_.rows; ++r) {
        double d = 0;
        for (size_t c = 0; c < X_.cols; ++c) {
          double diff = std::abs(Q.at(q, c) - X_.at(r, c));
          d += p_ == 1 ? diff : diff * diff;
        }
        dist[r] = {p_ == 1 ? d : std::sqrt(d), static_cast<int>(r)};
      }
      std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
      std::fill(votes.begin(), votes.end(), 0.0);
      for (size_t i = 0; i < k; ++i) {
        double v = distance_weighted_ ? 1.0 / (dist[i].first + 1e-9) : 1.0;
        int32_t cls = y_[dist[i].second];
        votes[cls] += v * class_weight_[cls];
      }
      out[q] = majority_class(votes);
    }
    return out;
  }

  double parameter_count() const override { return 0; }
  double stored_cells() const override {
    return static_cast<double>(X_.rows) * static_cast<double>(X_.cols);
  }
  double predict_cost(size_t q) const override {
    return static_cast<double>(q) * static_cast<double>(X_.rows) *
           static_cast<double>(X_.cols) * kKnnPredictPerCell;
  }
  nlohmann::json info() const override {
    return {{"stored_rows", X_.rows}, {"k", k_}};
  }

 private:
  Matrix X_;
  std::vector<int32_t> y_;
  std::vector<double> class_weight_;
  int k_;
  int p_;
  bool distance_weighted_;
};

class GaussianNbModel final : public ClassifierModel {
 public:
  GaussianNbModel(const Matrix& X, const std::vector<int32_t>& y,
                  const std::vector<double>& w, int n_classes,
                  double var_smoothing, bool uniform_priors)
      : n_classes_(n_classes), n_features_(X.cols) {
    mean_.assign(n_classes * X.cols, 0.0);
    var_.assign(n_classes * X.cols, 0.0);
    log_prior_.assign(n_classes, 0.0);
    std::vector<double> class_total(n_classes, 0.0);
    for (size_t r = 0; r < X.rows; ++r) class_total[y[r]] += w[r];
    for (size_t r = 0; r < X.rows; ++r)
      for (size_t c = 0; c < X.cols; ++c)
        mean_[y[r] * X.cols + c] += w[r] * X.at(r, c);
    for (int cls = 0; cls < n_classes; ++cls)
      if (class_total[cls] > 0)
        for (size_t c = 0; c < X.cols; ++c)
          mean_[cls * X.cols + c] /= class_total[cls];
    for (size_t r = 0; r < X.rows; ++r)
      for (size_t c = 0; c < X.cols; ++c) {
        double d = X.at(r, c) - mean_[y[r] * X.cols + c];
        var_[y[r] * X.cols + c] += w[r] * d * d;
      }
    double max_var = 0;
    for (int cls = 0; cls < n_classes; ++cls)
      if (class_total[cls] > 0)
        for (size_t c = 0; c < X.cols; ++c) {
          var_[cls * X.cols + c] /= class_total[cls];
          max_var = std::max(max_var, var_[cls * X.cols + c]);
        }
    const double eps = var_smoothing * std::max(max_var, 1.0) + 1e-12;
    for (auto& v : var_) v += eps;

    double total = std::accumulate(class_total.begin(), class_total.end(), 0.0);
    for (int cls = 0; cls < n_classes; ++cls) {
      if (class_total[cls] <= 0) {
        log_prior_[cls] = -1e300;  // class absent from training rows
        for (size_t c = 0; c < X.cols; ++c) var_[cls * X.cols + c] = 1.0;
      } else {
        log_prior_[cls] = uniform_priors
                              ? -std::log(static_cast<double>(n_classes))
                              : std::log(class_total[cls] / total);
      }
    }
  }

  std::vector<int32_t> predict(const Matrix& Q) const override {
    std::vector<int32_t> out(Q.rows);
    for (size_t q = 0; q < Q.rows; ++q) {
      int best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int cls = 0; cls < n_classes_; ++cls) {
        double s = log_prior_[cls];
        for (size_t c = 0; c < n_features_; ++c) {
          double v = var_[cls * n_features_ + c];
          double d = Q.at(q, c) - mean_[cls * n_features_ + c];
          s += -0.5 * (std::log(2.0 * M_PI * v) + d * d / v);
        }
        if (s > best_score) {
          best_score = s;
          best = cls;
        }
      }
      out[q] = best;
    }
    return out;
  }

  // Means + variances per class/feature, plus one prior per class.
  double parameter_count() const override {
    return 2.0 * n_classes_ * static_cast<double>(n_features_) + n_classes_;
  }
  double predict_cost(size_t q) const override {
    return static_cast<double>(q) * n_classes_ *
           static_cast<double>(n_features_) * kNbPredictPerCell;
  }

 private:
  int n_classes_;
  size_t n_features_;
  std::vector<double> mean_, var_, log_prior_;
};

class DecisionTreeModel final : public ClassifierModel {
 public:
  DecisionTreeModel(const Matrix& X, const std::vector<int32_t>& y,
                    const std::vector<double>& w, int n_classes,
                    const ZooTreeParams& params, Rng& rng) {
    std::vector<int> rows(X.rows);
    std::iota(rows.begin(), rows.end(), 0);
    nodes_ = build_zoo_tree(X, y, w, n_classes, rows, params, rng);
  }

  std::vector<int32_t> predict(const Matrix& Q) const override {
    std::vector<int32_t> out(Q.rows);
    for (size_t q = 0; q < Q.rows; ++q) out[q] = zoo_tree_predict(nodes_, Q, q);
    return out;
  }

  double parameter_count() const override {
    return 4.0 * static_cast<double>(nodes_.size());
  }
  double predict_cost(size_t q) const override {
    return static_cast<double>(q) * kTreePredictPerRow;
  }
  nlohmann::json info() const override { return {{"nodes", nodes_.size()}}; }

 private:
  std::vector<ZooNode> nodes_;
};

class RandomForestZooModel final : public ClassifierModel {
 public:
  RandomForestZooModel(const Matrix& X, const std::vector<int32_t>& y,
                       const std::vector<double>& w, int n_classes,
                       const PipelineSpec& spec, uint64_t seed)
      : n_classes_(n_classes) {
    ZooTreeParams params;
    params.max_depth = spec.rf_max_depth;
    params.min_leaf = spec.rf_min_leaf;
    params.max_features = std::max(
        1, static_cast<int>(std::round(spec.rf_feature_frac *
                                       static_cast<double>(X.cols))));
    trees_.reserve(spec.rf_trees);
    for (int t = 0; t < spec.rf_trees; ++t) {
      Rng rng(substream(seed, "zoo-rf-tree", static_cast<uint64_t>(t)));
      std::vector<int> rows(X.rows);
      if (spec.rf_bootstrap && X.rows > 1) {
        for (size_t i = 0; i < X.rows; ++i)
          rows[i] = static_cast<int>(rng.uniform_index(X.rows));
      } else {
        std::iota(rows.begin(), rows.end(), 0);
      }
      trees_.push_back(build_zoo_tree(X, y, w, n_classes, rows, params, rng));
    }
  }

  std::vector<int32_t> predict(const Matrix& Q) const override {
    std::vector<int32_t> out(Q.rows);
    std::vector<double> votes(n_classes_);
    for (size_t q = 0; q < Q.rows; ++q) {
      std::fill(votes.begin(), votes.end(), 0.0);
      for (const auto& tree : trees_) votes[zoo_tree_predict(tree, Q, q)] += 1.0;
      out[q] = majority_class(votes);
    }
    return out;
  }

  double parameter_count() const override {
    double nodes = 0;
    for (const auto& t : trees_) nodes += static_cast<double>(t.size());
    return 4.0 * nodes;
  }
  double predict_cost(size_t q) const override {
    return static_cast<double>(q) * static_cast<double>(trees_.size()) *
           kForestPredictPerRowTree;
  }
  nlohmann::json info() const override {
    size_t nodes = 0;
    for (const auto& t : trees_) nodes += t.size();
    return {{"trees", trees_.size()}, {"nodes", nodes}};
  }

 private:
  int n_classes_;
  std::vector<std::vector<ZooNode>> trees_;
};

class SgdLinearModel final : public ClassifierModel {
 public:
  SgdLinearModel(const Matrix& X, const std::vector<int32_t>& y,
                 const std::vector<double>& w, int n_classes, bool hinge,
                 const PipelineSpec& spec, uint64_t seed)
      : n_classes_(n_classes), n_features_(X.cols) {
    // One-vs-rest linear models; weights layout [class][feature..., bias].
    weights_.assign(n_classes * (X.cols + 1), 0.0);
    const bool constant_lr = spec.sgd_schedule == "constant";
    for (int cls = 0; cls < n_classes; ++cls) {
      Rng rng(substream(seed, "sgd-class", static_cast<uint64_t>(cls)));
      double* wv = &weights_[cls * (X.cols + 1)];
      double* bias = wv + X.cols;
      std::vector<int> order(X.rows);
      std::iota(order.begin(), order.end(), 0);
      double t = 1;
      for (int epoch = 0; epoch < spec.sgd_epochs; ++epoch) {
        rng.shuffle(order);
        for (int r : order) {
          const double eta =
              constant_lr ? spec.sgd_eta0 : spec.sgd_eta0 / std::sqrt(t);
          t += 1;
          const double target = y[r] == cls ? 1.0 : -1.0;
          double z = *bias;
          for (size_t c = 0; c < X.cols; ++c) z += wv[c] * X.at(r, c);
          const double margin = target * z;
          const double decay = 1.0 - eta * spec.sgd_alpha;
          for (size_t c = 0; c < X.cols; ++c) wv[c] *= decay;
          if (hinge) {
            if (margin < 1.0) {
              const double step = eta * target * w[r];
              for (size_t c = 0; c < X.cols; ++c) wv[c] += step * X.at(r, c);
              *bias += step;
            }
          } else {
            // Logistic loss gradient: -y * sigmoid(-y z).
            const double g = target / (1.0 + std::exp(margin));
            const double step = eta * g * w[r];
            for (size_t c = 0; c < X.cols; ++c) wv[c] += step * X.at(r, c);
            *bias += step;
          }
        }
      }
    }
  }

  std::vector<int32_t> predict(const Matrix& Q) const override {
    std::vector<int32_t> out(Q.rows);
    for (size_t q = 0; q < Q.rows; ++q) {
      int best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int cls = 0; cls < n_classes_; ++cls) {
        const double* wv = &weights_[cls * (n_features_ + 1)];
        double z = wv[n_features_];
        for (size_t c = 0; c < n_features_; ++c) z += wv[c] * Q.at(q, c);
        if (z > best_score) {
          best_score = z;
          best = cls;
        }
      }
      out[q] = best;
    }
    return out;
  }

  double parameter_count() const override {
    return static_cast<double>(weights_.size());
  }
  double predict_cost(size_t q) const override {
    return static_cast<double>(q) * n_classes_ *
           static_cast<double>(n_features_) * kSgdPredictPerCell;
  }

 private:
  int n_classes_;
  size_t n_features_;
  std::vector<double> weights_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Preprocessing.

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

Matrix TrainedPipeline::encode_rows(const Dataset& rows) const {
  if (rows.columns.size() != schema.size())
    throw DataFormatError("predict: column count differs from training schema");
  for (size_t i = 0; i < schema.size(); ++i) {
    if (rows.columns[i].name != schema[i].name ||
        rows.columns[i].kind != schema[i].kind)
      throw DataFormatError("predict: column '" + rows.columns[i].name +
                            "' differs from training schema");
  }

  Matrix out(rows.n_rows(), encoded_width);
  size_t col_out = 0;
  size_t numeric_index = 0;
  size_t nominal_index = 0;
  for (size_t i = 0; i < rows.columns.size(); ++i) {
    const auto& col = rows.columns[i];
    if (col.kind == ColumnKind::Numeric) {
      double fill = imputer_fill[numeric_index++];
      for (size_t r = 0; r < rows.n_rows(); ++r) {
        double v = col.numeric[r];
        out.at(r, col_out) = std::isnan(v) ? fill : v;
      }
      ++col_out;
      continue;
    }
    if (spec.encoding == "one_hot") {
      const auto& kept = one_hot[nominal_index].kept;
      for (size_t r = 0; r < rows.n_rows(); ++r) {
        int32_t code = col.codes[r];
        auto it = std::lower_bound(kept.begin(), kept.end(), code);
        if (it != kept.end() && *it == code)
          out.at(r, col_out + (it - kept.begin())) = 1.0;
        else
          out.at(r, col_out + kept.size()) = 1.0;  // rare/missing bucket
      }
      col_out += kept.size() + 1;
    } else if (spec.encoding == "frequency") {
      const auto& freq = code_frequency[nominal_index];
      for (size_t r = 0; r < rows.n_rows(); ++r) {
        int32_t code = col.codes[r];
        size_t idx = static_cast<size_t>(code + 1);
        out.at(r, col_out) = idx < freq.size() ? freq[idx] : 0.0;
      }
      ++col_out;
    } else {  // ordinal: lexicographic category code, missing -> 0
      for (size_t r = 0; r < rows.n_rows(); ++r)
        out.at(r, col_out) = static_cast<double>(col.codes[r] + 1);
      ++col_out;
    }
    ++nominal_index;
  }

  for (size_t c = 0; c < out.cols; ++c) {
    double center = scale_center[c];
    double extent = scale_extent[c];
    for (size_t r = 0; r < out.rows; ++r) {
      if (spec.scaling == "none") break;
      double v = out.at(r, c);
      out.at(r, c) = extent == 0.0 ? (spec.scaling == "min_max" ? 0.5 : 0.0)
                                   : (v - center) / extent;
    }
  }
  return out;
}

std::shared_ptr<const TrainedPipeline> fit(const SearchSpaceTree& tree,
                                           const PipelineCandidate& candidate,
                                           const Dataset& train, uint64_t seed,
                                           Clock& clock) {
  if (train.n_rows() == 0) throw InvalidInputError("fit: empty training data");
  const double t0 = clock.now();

  auto tp = std::make_shared<TrainedPipeline>();
  tp->spec = resolve_spec(tree, candidate);
  tp->candidate = candidate;
  tp->n_classes = train.n_classes();
  for (const auto& col : train.columns)
    tp->schema.push_back({col.name, col.kind, col.categories.size()});

  // Oversampling happens on row indices before any state is fitted.
  std::vector<int> rows(train.n_rows());
  std::iota(rows.begin(), rows.end(), 0);
  if (tp->spec.sampling == "random_oversample") {
    Rng rng(substream(seed, "oversample"));
    std::vector<std::vector<int>> by_class(train.n_classes());
    for (size_t r = 0; r < train.n_rows(); ++r)
      by_class[train.labels[r]].push_back(static_cast<int>(r));
    size_t max_count = 0;
    for (const auto& v : by_class) max_count = std::max(max_count, v.size());
    const size_t target = static_cast<size_t>(
        std::ceil(tp->spec.oversample_ratio * static_cast<double>(max_count)));
    for (const auto& members : by_class) {
      if (members.empty()) continue;
      for (size_t have = members.size(); have < target; ++have)
        rows.push_back(members[rng.uniform_index(members.size())]);
    }
  }
  Dataset resampled;
  const bool oversampled = rows.size() != train.n_rows();
  if (oversampled) resampled = take_rows(train, rows);
  const Dataset& data = oversampled ? resampled : train;

  // Imputer fills (numeric columns, in column order).
  for (const auto& col : data.columns) {
    if (col.kind != ColumnKind::Numeric) continue;
    std::vector<double> present;
    for (double v : col.numeric)
      if (!std::isnan(v)) present.push_back(v);
    double fill = 0.0;
    if (!present.empty()) {
      if (tp->spec.imputation == "median") {
        fill = median_of(present);
      } else {
        fill = std::accumulate(present.begin(), present.end(), 0.0) /
               static_cast<double>(present.size());
      }
    }
    tp->imputer_fill.push_back(fill);
  }

  // Encoder state (nominal columns, in column order).
  size_t width = 0;
  for (const auto& col : data.columns) {
    if (col.kind == ColumnKind::Numeric) {
      ++width;
      continue;
    }
    if (tp->spec.encoding == "one_hot") {
      // Most frequent codes keep their own slot; missing (-1) competes too.
      std::map<int32_t, size_t> count;
      for (int32_t code : col.codes) ++count[code];
      std::vector<std::pair<size_t, int32_t>> ranked;  // (count, code)
      for (const auto& [code, c] : count) ranked.emplace_back(c, code);
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      OneHotColumn oh;
      const size_t keep = std::min<size_t>(
          ranked.size(), static_cast<size_t>(tp->spec.one_hot_max_categories));
      for (size_t i = 0; i < keep; ++i) oh.kept.push_back(ranked[i].second);
      std::sort(oh.kept.begin(), oh.kept.end());
      width += oh.kept.size() + 1;
      tp->one_hot.push_back(std::move(oh));
      tp->code_frequency.emplace_back();
    } else if (tp->spec.encoding == "frequency") {
      std::vector<double> freq(col.categories.size() + 1, 0.0);
      for (int32_t code : col.codes) freq[static_cast<size_t>(code + 1)] += 1.0;
      for (auto& f : freq) f /= static_cast<double>(col.codes.size());
      tp->code_frequency.push_back(std::move(freq));
      tp->one_hot.emplace_back();
      ++width;
    } else {
      tp->one_hot.emplace_back();
      tp->code_frequency.emplace_back();
      ++width;
    }
  }
  tp->encoded_width = width;

  // Scaler state from the raw encoded matrix.
  tp->scale_center.assign(width, 0.0);
  tp->scale_extent.assign(width, 1.0);
  {
    // Encode once without scaling to measure column statistics.
    auto saved_scaling = tp->spec.scaling;
    tp->spec.scaling = "none";
    Matrix raw = tp->encode_rows(data);
    tp->spec.scaling = saved_scaling;
    if (tp->spec.scaling == "standard") {
      for (size_t c = 0; c < raw.cols; ++c) {
        double sum = 0, sumsq = 0;
        for (size_t r = 0; r < raw.rows; ++r) {
          sum += raw.at(r, c);
          sumsq += raw.at(r, c) * raw.at(r, c);
        }
        double mean = sum / static_cast<double>(raw.rows);
        double var = sumsq / static_cast<double>(raw.rows) - mean * mean;
        tp->scale_center[c] = mean;
        tp->scale_extent[c] = var > 1e-24 ? std::sqrt(var) : 0.0;
      }
    } else if (tp->spec.scaling == "min_max") {
      for (size_t c = 0; c < raw.cols; ++c) {
        double lo = raw.at(0, c), hi = raw.at(0, c);
        for (size_t r = 1; r < raw.rows; ++r) {
          lo = std::min(lo, raw.at(r, c));
          hi = std::max(hi, raw.at(r, c));
        }
        tp->scale_center[c] = lo;
        tp->scale_extent[c] = hi - lo;
      }
    }
  }

  Matrix X = tp->encode_rows(data);

  // Class weights on the (possibly resampled) training labels.
  std::vector<double> class_weight(train.n_classes(), 1.0);
  if (tp->spec.class_weighting == "balanced") {
    std::vector<double> counts(train.n_classes(), 0.0);
    for (int32_t y : data.labels) counts[y] += 1.0;
    for (int c = 0; c < train.n_classes(); ++c)
      class_weight[c] = counts[c] > 0
                            ? static_cast<double>(data.labels.size()) /
                                  (static_cast<double>(train.n_classes()) *
                                   counts[c])
                            : 1.0;
  }
  std::vector<double> sample_weight(data.labels.size());
  for (size_t r = 0; r < data.labels.size(); ++r)
    sample_weight[r] = class_weight[data.labels[r]];

  const size_t n = X.rows;
  const size_t f = X.cols;
  double cost = kPreprocFitBase +
                static_cast<double>(n) * static_cast<double>(f) *
                    (kPreprocFitPerCell + kPreprocApplyPerCell);

  const uint64_t clf_seed = substream(seed, "classifier");
  const auto& spec = tp->spec;
  if (spec.classifier == "knn") {
    tp->classifier = std::make_unique<KnnModel>(
        std::move(X), data.labels, class_weight, spec.knn_k, spec.knn_p,
        spec.knn_weights == "distance");
    cost += kKnnFitBase + static_cast<double>(n * f) * kKnnFitPerCell;
  } else if (spec.classifier == "gaussian_nb") {
    tp->classifier = std::make_unique<GaussianNbModel>(
        X, data.labels, sample_weight, train.n_classes(), spec.nb_var_smoothing,
        spec.nb_uniform_priors);
    cost += kNbFitBase + static_cast<double>(n * f) * kNbFitPerCell;
  } else if (spec.classifier == "decision_tree") {
    ZooTreeParams params;
    params.entropy = spec.dt_criterion == "entropy";
    params.max_depth = spec.dt_max_depth;
    params.min_split = spec.dt_min_split;
    params.min_leaf = spec.dt_min_leaf;
    Rng rng(substream(clf_seed, "zoo-dt"));
    tp->classifier = std::make_unique<DecisionTreeModel>(
        X, data.labels, sample_weight, train.n_classes(), params, rng);
    cost += kTreeFitBase + tree_units(n, static_cast<double>(f)) * kTreeFitPerUnit;
  } else if (spec.classifier == "random_forest") {
    tp->classifier = std::make_unique<RandomForestZooModel>(
        X, data.labels, sample_weight, train.n_classes(), spec, clf_seed);
    cost += kForestFitBase +
            static_cast<double>(spec.rf_trees) *
                tree_units(n, spec.rf_feature_frac * static_cast<double>(f)) *
                kTreeFitPerUnit;
  } else {
    tp->classifier = std::make_unique<SgdLinearModel>(
        X, data.labels, sample_weight, train.n_classes(),
        spec.classifier == "sgd_hinge", spec, clf_seed);
    cost += kSgdFitBase + static_cast<double>(spec.sgd_epochs) *
                              static_cast<double>(n * f) * kSgdFitPerCell;
  }

  tp->train_rows = n;
  clock.charge(cost);
  tp->training_time_s = clock.now() - t0;
  tp->size_bytes = measure_pipeline_size(*tp);
  return tp;
}

std::vector<int32_t> predict(const TrainedPipeline& tp, const Dataset& rows,
                             Clock& clock, double* inference_time_per_instance) {
  if (rows.n_rows() == 0) {
    if (inference_time_per_instance) *inference_time_per_instance = 0.0;
    return {};
  }
  const double t0 = clock.now();
  Matrix Q = tp.encode_rows(rows);
  auto labels = tp.classifier->predict(Q);
  clock.charge(static_cast<double>(Q.rows * Q.cols) * kPreprocApplyPerCell +
               tp.classifier->predict_cost(Q.rows));
  if (inference_time_per_instance)
    *inference_time_per_instance =
        (clock.now() - t0) / static_cast<double>(rows.n_rows());
  return labels;
}

double measure_pipeline_size(const TrainedPipeline& tp) {
  // Four persisted components: encoder, imputer, scaler, classifier.
  // Sampling and class weighting act at fit time only.
  constexpr double kHeader = 64.0;
  return 4.0 * kHeader + 8.0 * tp.classifier->parameter_count() +
         8.0 * tp.classifier->stored_cells();
}

}  // namespace automl
