#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "automl/dataset.hpp"
#include "automl/rng.hpp"
#include "automl/search_space.hpp"

namespace testsupport {

inline automl::PipelineCandidate defaults_candidate(
    const automl::SearchSpaceTree& tree) {
  automl::Rng rng(0);
  return automl::sample_candidate(tree, automl::all_inactive_mask(tree), rng);
}

inline void set_num(const automl::SearchSpaceTree& tree,
                    automl::PipelineCandidate& c, const std::string& name,
                    double v) {
  c.values[tree.at(name).id] = v;
}

inline void set_choice(const automl::SearchSpaceTree& tree,
                       automl::PipelineCandidate& c, const std::string& name,
                       const std::string& choice) {
  const auto& n = tree.at(name);
  auto it = std::find(n.choices.begin(), n.choices.end(), choice);
  c.values[n.id] = static_cast<double>(it - n.choices.begin());
  for (int child : n.children) {
    const auto& s = tree.nodes[child];
    if (s.strategy)
      c.values[s.id] = s.name == n.name + "." + choice ? 1.0 : 0.0;
  }
}

// Exhaustive best accuracy of a depth-limited axis-aligned decision tree.
// Serves as an independent separability oracle: if this returns 1.0, the
// labels are perfectly recoverable from the features by a small tree.
struct FlatData {
  std::vector<std::vector<double>> x;
  std::vector<int32_t> y;
};

inline FlatData flatten(const automl::Dataset& d) {
  FlatData out;
  out.y = d.labels;
  out.x.assign(d.n_rows(), {});
  for (const auto& col : d.columns)
    for (size_t r = 0; r < d.n_rows(); ++r)
      out.x[r].push_back(col.numeric[r]);
  return out;
}

inline int majority_hits(const FlatData& d, const std::vector<int>& rows) {
  std::vector<int> counts;
  for (int r : rows) {
    if (d.y[r] >= static_cast<int32_t>(counts.size()))
      counts.resize(d.y[r] + 1, 0);
    ++counts[d.y[r]];
  }
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

inline int best_tree_hits(const FlatData& d, const std::vector<int>& rows,
                          int depth) {
  int best = majority_hits(d, rows);
  if (depth == 0 || rows.size() < 2) return best;
  const size_t n_features = d.x.front().size();
  for (size_t f = 0; f < n_features; ++f) {
    std::vector<double> vals;
    for (int r : rows) vals.push_back(d.x[r][f]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (size_t i = 0; i + 1 < vals.size(); ++i) {
      double cut = (vals[i] + vals[i + 1]) / 2.0;
      std::vector<int> left, right;
      for (int r : rows) (d.x[r][f] <= cut ? left : right).push_back(r);
      if (left.empty() || right.empty()) continue;
      best = std::max(best, best_tree_hits(d, left, depth - 1) +
                                best_tree_hits(d, right, depth - 1));
    }
  }
  return best;
}

inline double depth2_oracle_accuracy(const automl::Dataset& d) {
  FlatData flat = flatten(d);
  std::vector<int> rows(d.n_rows());
  for (size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  return static_cast<double>(best_tree_hits(flat, rows, 2)) /
         static_cast<double>(d.n_rows());
}

}  // namespace testsupport
