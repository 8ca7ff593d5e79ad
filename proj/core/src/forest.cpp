#include "automl/forest.hpp"

#include <algorithm>
#include <cmath>

#include "automl/errors.hpp"
#include "automl/rng.hpp"

namespace automl {

namespace {

struct BuildFrame {
  std::vector<int> rows;
  int depth;
  int node_index;
};

// Grows one tree. Split selection minimizes weighted child variance; ties go
// to the lowest (feature, threshold) pair scanned, which keeps builds
// reproducible across platforms.
std::vector<ForestNode> build_tree(const std::vector<std::vector<double>>& X,
                                   const std::vector<double>& y,
                                   const std::vector<int>& root_rows,
                                   const ForestParams& params, Rng& rng) {
  const size_t n_features = X[0].size();
  std::vector<ForestNode> nodes;
  std::vector<BuildFrame> stack;

  nodes.emplace_back();
  stack.push_back({root_rows, 0, 0});

  std::vector<int> feature_pool(n_features);
  for (size_t f = 0; f < n_features; ++f) feature_pool[f] = static_cast<int>(f);

  while (!stack.empty()) {
    BuildFrame frame = std::move(stack.back());
    stack.pop_back();
    const auto& rows = frame.rows;
    const size_t n = rows.size();

    double sum = 0, sumsq = 0;
    for (int r : rows) {
      sum += y[r];
      sumsq += y[r] * y[r];
    }
    const double mean = sum / static_cast<double>(n);
    const double impurity = sumsq - sum * sum / static_cast<double>(n);

    ForestNode& node = nodes[frame.node_index];
    node.value = mean;

    const bool depth_capped =
        params.max_depth > 0 && frame.depth >= params.max_depth;
    if (n < 2 || impurity <= 1e-12 || depth_capped ||
        n < static_cast<size_t>(2 * params.min_samples_leaf)) {
      continue;
    }

    // Per-node feature subsample (without replacement).
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
    double best_score = impurity - 1e-12;
    std::vector<std::pair<double, double>> vals;  // (x, y)
    for (int f : feats) {
      vals.clear();
      for (int r : rows) vals.emplace_back(X[r][f], y[r]);
      std::sort(vals.begin(), vals.end());
      if (vals.front().first == vals.back().first) continue;

      double left_sum = 0, left_sumsq = 0;
      for (size_t i = 0; i + 1 < n; ++i) {
        left_sum += vals[i].second;
        left_sumsq += vals[i].second * vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;
        const size_t nl = i + 1, nr = n - nl;
        if (nl < static_cast<size_t>(params.min_samples_leaf) ||
            nr < static_cast<size_t>(params.min_samples_leaf))
          continue;
        const double right_sum = sum - left_sum;
        const double right_sumsq = sumsq - left_sumsq;
        const double child_impurity =
            (left_sumsq - left_sum * left_sum / static_cast<double>(nl)) +
            (right_sumsq - right_sum * right_sum / static_cast<double>(nr));
        if (child_impurity < best_score) {
          best_score = child_impurity;
          best_feature = f;
          best_threshold = (vals[i].first + vals[i + 1].first) / 2.0;
        }
      }
    }
    if (best_feature < 0) continue;

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
      (X[r][best_feature] <= best_threshold ? left_rows : right_rows).push_back(r);
    }
    if (left_rows.empty() || right_rows.empty()) continue;

    const int left_index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const int right_index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    ForestNode& parent = nodes[frame.node_index];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left_index;
    parent.right = right_index;
    // Right pushed first so the left child is grown next (LIFO), keeping node
    // numbering depth-first left-to-right.
    stack.push_back({std::move(right_rows), frame.depth + 1, right_index});
    stack.push_back({std::move(left_rows), frame.depth + 1, left_index});
  }
  return nodes;
}

}  // namespace

double RandomForestModel::tree_predict(size_t tree,
                                       const std::vector<double>& x) const {
  const auto& nodes = trees[tree];
  int i = 0;
  while (nodes[i].feature >= 0) {
    i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left
                                                  : nodes[i].right;
  }
  return nodes[i].value;
}

RandomForestModel forest_fit(const std::vector<std::vector<double>>& X,
                             const std::vector<double>& y,
                             const ForestParams& params) {
  if (X.empty()) throw InvalidInputError("forest_fit: empty training data");
  if (X.size() != y.size())
    throw InvalidInputError("forest_fit: feature/target length mismatch");
  if (params.n_trees < 1) throw InvalidInputError("forest_fit: n_trees < 1");

  RandomForestModel model;
  model.params = params;
  model.n_features = X[0].size();
  model.trees.reserve(params.n_trees);

  const size_t n = X.size();
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(substream(params.seed, "forest-tree", static_cast<uint64_t>(t)));
    std::vector<int> rows(n);
    if (params.bootstrap && n > 1) {
      for (size_t i = 0; i < n; ++i)
        rows[i] = static_cast<int>(rng.uniform_index(n));
    } else {
      for (size_t i = 0; i < n; ++i) rows[i] = static_cast<int>(i);
    }
    model.trees.push_back(build_tree(X, y, rows, params, rng));
  }
  return model;
}

double forest_predict(const RandomForestModel& model,
                      const std::vector<double>& x) {
  double sum = 0;
  for (size_t t = 0; t < model.trees.size(); ++t) sum += model.tree_predict(t, x);
  return sum / static_cast<double>(model.trees.size());
}

double forest_predict_std(const RandomForestModel& model,
                          const std::vector<double>& x) {
  double sum = 0, sumsq = 0;
  const size_t T = model.trees.size();
  for (size_t t = 0; t < T; ++t) {
    double p = model.tree_predict(t, x);
    sum += p;
    sumsq += p * p;
  }
  double mean = sum / static_cast<double>(T);
  double var = sumsq / static_cast<double>(T) - mean * mean;
  return std::sqrt(std::max(0.0, var));
}

nlohmann::json forest_to_json(const RandomForestModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree) {
      nodes.push_back({{"f", n.feature},
                       {"t", n.threshold},
                       {"l", n.left},
                       {"r", n.right},
                       {"v", n.value}});
    }
    trees.push_back(std::move(nodes));
  }
  return {
      {"mode", model.params.mode == ForestMode::Regression ? "regression"
                                                           : "classification"},
      {"n_features", model.n_features},
      {"n_trees", model.params.n_trees},
      {"max_depth", model.params.max_depth},
      {"min_samples_leaf", model.params.min_samples_leaf},
      {"max_features", model.params.max_features},
      {"bootstrap", model.params.bootstrap},
      {"seed", model.params.seed},
      {"trees", std::move(trees)},
  };
}

RandomForestModel forest_from_json(const nlohmann::json& j) {
  RandomForestModel model;
  try {
    model.params.mode = j.at("mode").get<std::string>() == "regression"
                            ? ForestMode::Regression
                            : ForestMode::Classification;
    model.n_features = j.at("n_features").get<size_t>();
    model.params.n_trees = j.at("n_trees").get<int>();
    model.params.max_depth = j.at("max_depth").get<int>();
    model.params.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    model.params.max_features = j.at("max_features").get<int>();
    model.params.bootstrap = j.at("bootstrap").get<bool>();
    model.params.seed = j.at("seed").get<uint64_t>();
    for (const auto& tj : j.at("trees")) {
      std::vector<ForestNode> tree;
      tree.reserve(tj.size());
      for (const auto& nj : tj) {
        ForestNode n;
        n.feature = nj.at("f").get<int32_t>();
        n.threshold = nj.at("t").get<double>();
        n.left = nj.at("l").get<int32_t>();
        n.right = nj.at("r").get<int32_t>();
        n.value = nj.at("v").get<double>();
        tree.push_back(n);
      }
      if (tree.empty()) throw DataFormatError("forest json: empty tree");
      model.trees.push_back(std::move(tree));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("forest json: ") + e.what());
  }
  if (model.trees.empty()) throw DataFormatError("forest json: no trees");
  return model;
}

}  // namespace automl
