#include "automl/search_space.hpp"

#include <algorithm>
#include <cmath>

#include "automl/errors.hpp"
#include "automl/rng.hpp"

namespace automl {

int SearchSpaceTree::index_of(const std::string& name) const {
  for (const auto& n : nodes)
    if (n.name == name) return n.id;
  return -1;
}

const HyperparameterNode& SearchSpaceTree::at(const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw InvalidInputError("search space: unknown node '" + name + "'");
  return nodes[i];
}

void SearchSpaceTree::validate() const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.id != static_cast<int>(i))
      throw DataFormatError("search space: node ids must be dense and ordered");
    if (n.parent >= n.id)
      throw DataFormatError("search space: parent must precede child: " + n.name);
    if (n.parent < -1 || n.parent >= static_cast<int>(nodes.size()))
      throw DataFormatError("search space: parent out of range: " + n.name);
    switch (n.kind) {
      case NodeKind::Categorical:
        if (n.choices.empty())
          throw DataFormatError("search space: categorical without choices: " +
                                n.name);
        if (n.default_value < 0 ||
            n.default_value >= static_cast<double>(n.choices.size()))
          throw DataFormatError("search space: default choice out of range: " +
                                n.name);
        break;
      case NodeKind::Numeric:
        if (!(n.lo < n.hi))
          throw DataFormatError("search space: empty numeric range: " + n.name);
        if (n.log_scale && n.lo <= 0)
          throw DataFormatError("search space: log range needs lo > 0: " + n.name);
        if (n.default_value < n.lo || n.default_value > n.hi)
          throw DataFormatError("search space: default out of range: " + n.name);
        break;
      case NodeKind::Boolean:
        if (n.default_value != 0.0 && n.default_value != 1.0)
          throw DataFormatError("search space: boolean default must be 0/1: " +
                                n.name);
        break;
    }
    if (n.strategy) {
      if (n.parent < 0 || nodes[n.parent].kind != NodeKind::Categorical)
        throw DataFormatError(
            "search space: strategy node needs a categorical parent: " + n.name);
      if (n.kind != NodeKind::Boolean)
        throw DataFormatError("search space: strategy node must be boolean: " +
                              n.name);
    }
  }
  // Strategy children of a selector must map 1:1 onto its choices, in order.
  for (const auto& n : nodes) {
    std::vector<int> strategies;
    for (int c : n.children)
      if (nodes[c].strategy) strategies.push_back(c);
    if (strategies.empty()) continue;
    if (n.kind != NodeKind::Categorical ||
        strategies.size() != n.choices.size())
      throw DataFormatError(
          "search space: strategy children must match selector choices: " +
          n.name);
  }
}

namespace {

void rebuild_children(SearchSpaceTree& tree) {
  for (auto& n : tree.nodes) n.children.clear();
  for (const auto& n : tree.nodes)
    if (n.parent >= 0) tree.nodes[n.parent].children.push_back(n.id);
}

// Construction helpers for the default space.
struct TreeBuilder {
  SearchSpaceTree tree;

  int add(HyperparameterNode n) {
    n.id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(std::move(n));
    return tree.nodes.back().id;
  }

  int selector(const std::string& name, std::vector<std::string> choices,
               int default_choice) {
    HyperparameterNode n;
    n.name = name;
    n.kind = NodeKind::Categorical;
    n.choices = std::move(choices);
    n.default_value = default_choice;
    return add(n);
  }

  int strategy(int parent, const std::string& name, bool is_default) {
    HyperparameterNode n;
    n.name = name;
    n.kind = NodeKind::Boolean;
    n.parent = parent;
    n.strategy = true;
    n.default_value = is_default ? 1.0 : 0.0;
    return add(n);
  }

  int numeric(int parent, const std::string& name, double lo, double hi,
              double def, bool log_scale = false, bool integer = false) {
    HyperparameterNode n;
    n.name = name;
    n.kind = NodeKind::Numeric;
    n.parent = parent;
    n.lo = lo;
    n.hi = hi;
    n.default_value = def;
    n.log_scale = log_scale;
    n.integer = integer;
    return add(n);
  }

  int categorical(int parent, const std::string& name,
                  std::vector<std::string> choices, int default_choice) {
    HyperparameterNode n;
    n.name = name;
    n.kind = NodeKind::Categorical;
    n.parent = parent;
    n.choices = std::move(choices);
    n.default_value = default_choice;
    return add(n);
  }

  int boolean(int parent, const std::string& name, bool def) {
    HyperparameterNode n;
    n.name = name;
    n.kind = NodeKind::Boolean;
    n.parent = parent;
    n.default_value = def ? 1.0 : 0.0;
    return add(n);
  }
};

}  // namespace

SearchSpaceTree build_default_space() {
  TreeBuilder b;

  int enc = b.selector("encoding", {"one_hot", "frequency", "ordinal"}, 0);
  int enc_oh = b.strategy(enc, "encoding.one_hot", true);
  b.numeric(enc_oh, "one_hot.max_categories", 4, 64, 16, false, true);
  b.strategy(enc, "encoding.frequency", false);
  b.strategy(enc, "encoding.ordinal", false);

  int imp = b.selector("imputation", {"mean", "median"}, 0);
  b.strategy(imp, "imputation.mean", true);
  b.strategy(imp, "imputation.median", false);

  int sca = b.selector("scaling", {"standard", "min_max", "none"}, 0);
  b.strategy(sca, "scaling.standard", true);
  b.strategy(sca, "scaling.min_max", false);
  b.strategy(sca, "scaling.none", false);

  int smp = b.selector("sampling", {"none", "random_oversample"}, 0);
  b.strategy(smp, "sampling.none", true);
  int smp_ros = b.strategy(smp, "sampling.random_oversample", false);
  b.numeric(smp_ros, "random_oversample.target_ratio", 0.5, 1.0, 1.0);

  int cw = b.selector("class_weighting", {"none", "balanced"}, 0);
  b.strategy(cw, "class_weighting.none", true);
  b.strategy(cw, "class_weighting.balanced", false);

  int clf = b.selector("classifier",
                       {"knn", "gaussian_nb", "decision_tree", "random_forest",
                        "sgd_logistic", "sgd_hinge"},
                       3);

  int knn = b.strategy(clf, "classifier.knn", false);
  b.numeric(knn, "knn.n_neighbors", 1, 50, 5, true, true);
  b.categorical(knn, "knn.weights", {"uniform", "distance"}, 0);
  b.numeric(knn, "knn.p", 1, 2, 2, false, true);

  int gnb = b.strategy(clf, "classifier.gaussian_nb", false);
  b.numeric(gnb, "gaussian_nb.var_smoothing", 1e-12, 1e-3, 1e-9, true);
  b.boolean(gnb, "gaussian_nb.uniform_priors", false);

  int dt = b.strategy(clf, "classifier.decision_tree", false);
  b.categorical(dt, "decision_tree.criterion", {"gini", "entropy"}, 0);
  b.numeric(dt, "decision_tree.max_depth", 1, 32, 16, false, true);
  b.numeric(dt, "decision_tree.min_samples_split", 2, 20, 2, false, true);
  b.numeric(dt, "decision_tree.min_samples_leaf", 1, 20, 1, false, true);

  int rf = b.strategy(clf, "classifier.random_forest", true);
  b.numeric(rf, "random_forest.n_trees", 8, 128, 32, true, true);
  b.numeric(rf, "random_forest.max_depth", 2, 32, 16, false, true);
  b.numeric(rf, "random_forest.max_features_frac", 0.1, 1.0, 0.5);
  b.numeric(rf, "random_forest.min_samples_leaf", 1, 20, 1, false, true);
  b.boolean(rf, "random_forest.bootstrap", true);

  int sgdl = b.strategy(clf, "classifier.sgd_logistic", false);
  b.numeric(sgdl, "sgd_logistic.alpha", 1e-7, 1e-1, 1e-4, true);
  b.numeric(sgdl, "sgd_logistic.eta0", 1e-4, 1.0, 0.01, true);
  b.numeric(sgdl, "sgd_logistic.epochs", 5, 50, 10, false, true);
  b.categorical(sgdl, "sgd_logistic.schedule", {"constant", "invscaling"}, 1);

  int sgdh = b.strategy(clf, "classifier.sgd_hinge", false);
  b.numeric(sgdh, "sgd_hinge.alpha", 1e-7, 1e-1, 1e-4, true);
  b.numeric(sgdh, "sgd_hinge.eta0", 1e-4, 1.0, 0.01, true);
  b.numeric(sgdh, "sgd_hinge.epochs", 5, 50, 10, false, true);
  b.categorical(sgdh, "sgd_hinge.schedule", {"constant", "invscaling"}, 1);

  b.tree.version = "space-v1." + std::to_string(b.tree.nodes.size());
  rebuild_children(b.tree);
  b.tree.validate();
  return b.tree;
}

ActivationMask all_active_mask(const SearchSpaceTree& tree) {
  return ActivationMask{std::vector<uint8_t>(tree.size(), 1)};
}

ActivationMask all_inactive_mask(const SearchSpaceTree& tree) {
  return ActivationMask{std::vector<uint8_t>(tree.size(), 0)};
}

ActivationMask normalize_mask(const SearchSpaceTree& tree,
                              const ActivationMask& raw) {
  if (raw.size() != tree.size())
    throw InvalidMaskError("normalize_mask: mask length " +
                           std::to_string(raw.size()) + " != tree size " +
                           std::to_string(tree.size()));
  ActivationMask out = raw;
  // Parents precede children, so one forward pass closes the condition.
  for (const auto& n : tree.nodes) {
    if (n.parent >= 0 && !out.bits[n.parent]) out.bits[n.id] = 0;
  }
  return out;
}

bool mask_is_normalized(const SearchSpaceTree& tree, const ActivationMask& mask) {
  if (mask.size() != tree.size()) return false;
  for (const auto& n : tree.nodes)
    if (n.parent >= 0 && mask.bits[n.id] && !mask.bits[n.parent]) return false;
  return true;
}

namespace {

double draw_value(const HyperparameterNode& n, Rng& rng) {
  switch (n.kind) {
    case NodeKind::Categorical:
      return static_cast<double>(rng.uniform_index(n.choices.size()));
    case NodeKind::Boolean:
      return rng.bernoulli(0.5) ? 1.0 : 0.0;
    case NodeKind::Numeric: {
      double v = n.log_scale ? rng.log_uniform(n.lo, n.hi)
                             : rng.uniform(n.lo, n.hi);
      if (n.integer) v = std::clamp(std::round(v), n.lo, n.hi);
      return v;
    }
  }
  return 0.0;
}

// Nearest strategy ancestor, or -1 when the node is not inside any strategy
// subtree.
int strategy_ancestor(const SearchSpaceTree& tree, int id) {
  int p = tree.nodes[id].parent;
  while (p >= 0) {
    if (tree.nodes[p].strategy) return p;
    p = tree.nodes[p].parent;
  }
  return -1;
}

}  // namespace

PipelineCandidate sample_candidate(const SearchSpaceTree& tree,
                                   const ActivationMask& mask, Rng& rng) {
  if (mask.size() != tree.size())
    throw InvalidMaskError("sample_candidate: mask length mismatch");
  if (!mask_is_normalized(tree, mask))
    throw InvalidMaskError("sample_candidate: mask is not normalized");

  PipelineCandidate cand;
  cand.values.resize(tree.size());
  cand.sampled.assign(tree.size(), 0);

  for (const auto& n : tree.nodes) {
    // Strategy gates mirror the parent's selection; they are never drawn.
    if (n.strategy) {
      const auto& parent = tree.nodes[n.parent];
      int position = 0;
      for (int c : parent.children) {
        if (c == n.id) break;
        if (tree.nodes[c].strategy) ++position;
      }
      cand.values[n.id] =
          static_cast<int>(cand.values[n.parent]) == position ? 1.0 : 0.0;
      continue;
    }

    bool is_selector = false;
    for (int c : n.children)
      if (tree.nodes[c].strategy) is_selector = true;

    if (is_selector) {
      if (mask.bits[n.id]) {
        std::vector<int> active_choices;
        int position = 0;
        for (int c : n.children) {
          if (!tree.nodes[c].strategy) continue;
          if (mask.bits[c]) active_choices.push_back(position);
          ++position;
        }
        if (active_choices.empty()) {
          cand.values[n.id] = n.default_value;
        } else {
          cand.values[n.id] = static_cast<double>(
              active_choices[rng.uniform_index(active_choices.size())]);
          cand.sampled[n.id] = 1;
        }
      } else {
        cand.values[n.id] = n.default_value;
      }
      continue;
    }

    // Plain hyperparameter: tuned only when its bit is active and its
    // strategy subtree (if any) was selected.
    int gate = strategy_ancestor(tree, n.id);
    bool on_path = gate < 0 || cand.values[gate] == 1.0;
    if (mask.bits[n.id] && on_path) {
      cand.values[n.id] = draw_value(n, rng);
      cand.sampled[n.id] = 1;
    } else {
      cand.values[n.id] = n.default_value;
    }
  }
  return cand;
}

std::vector<double> mask_to_features(const SearchSpaceTree& tree,
                                     const ActivationMask& mask) {
  if (mask.size() != tree.size())
    throw InvalidMaskError("mask_to_features: mask length mismatch");
  std::vector<double> out(mask.size());
  for (size_t i = 0; i < mask.size(); ++i) out[i] = mask.bits[i] ? 1.0 : 0.0;
  return out;
}

double normalized_node_value(const HyperparameterNode& n, double value) {
  switch (n.kind) {
    case NodeKind::Categorical:
      return n.choices.size() > 1
                 ? value / static_cast<double>(n.choices.size() - 1)
                 : 0.0;
    case NodeKind::Boolean:
      return value;
    case NodeKind::Numeric:
      if (n.log_scale)
        return (std::log(value) - std::log(n.lo)) /
               (std::log(n.hi) - std::log(n.lo));
      return (value - n.lo) / (n.hi - n.lo);
  }
  return 0.0;
}

std::vector<double> candidate_features(const SearchSpaceTree& tree,
                                       const PipelineCandidate& cand) {
  std::vector<double> out;
  out.reserve(2 * tree.size());
  for (size_t i = 0; i < tree.size(); ++i)
    out.push_back(cand.sampled[i] ? 1.0 : 0.0);
  for (const auto& n : tree.nodes)
    out.push_back(normalized_node_value(n, cand.values[n.id]));
  return out;
}

nlohmann::json candidate_to_json(const SearchSpaceTree& tree,
                                 const PipelineCandidate& cand) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& n : tree.nodes) {
    double v = cand.values[n.id];
    switch (n.kind) {
      case NodeKind::Categorical:
        out[n.name] = n.choices[static_cast<size_t>(v)];
        break;
      case NodeKind::Boolean:
        out[n.name] = v != 0.0;
        break;
      case NodeKind::Numeric:
        if (n.integer)
          out[n.name] = static_cast<int64_t>(v);
        else
          out[n.name] = v;
        break;
    }
  }
  return out;
}

nlohmann::json tree_to_json(const SearchSpaceTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    nlohmann::json nj = {
        {"id", n.id},
        {"name", n.name},
        {"parent", n.parent},
        {"strategy", n.strategy},
        {"default", n.default_value},
    };
    switch (n.kind) {
      case NodeKind::Categorical:
        nj["kind"] = "categorical";
        nj["choices"] = n.choices;
        break;
      case NodeKind::Boolean:
        nj["kind"] = "boolean";
        break;
      case NodeKind::Numeric:
        nj["kind"] = "numeric";
        nj["lo"] = n.lo;
        nj["hi"] = n.hi;
        nj["log"] = n.log_scale;
        nj["integer"] = n.integer;
        break;
    }
    nodes.push_back(std::move(nj));
  }
  return {{"version", tree.version}, {"nodes", std::move(nodes)}};
}

SearchSpaceTree tree_from_json(const nlohmann::json& j) {
  SearchSpaceTree tree;
  try {
    tree.version = j.at("version").get<std::string>();
    for (const auto& nj : j.at("nodes")) {
      HyperparameterNode n;
      n.id = nj.at("id").get<int>();
      n.name = nj.at("name").get<std::string>();
      n.parent = nj.at("parent").get<int>();
      n.strategy = nj.at("strategy").get<bool>();
      n.default_value = nj.at("default").get<double>();
      std::string kind = nj.at("kind").get<std::string>();
      if (kind == "categorical") {
        n.kind = NodeKind::Categorical;
        n.choices = nj.at("choices").get<std::vector<std::string>>();
      } else if (kind == "boolean") {
        n.kind = NodeKind::Boolean;
      } else if (kind == "numeric") {
        n.kind = NodeKind::Numeric;
        n.lo = nj.at("lo").get<double>();
        n.hi = nj.at("hi").get<double>();
        n.log_scale = nj.at("log").get<bool>();
        n.integer = nj.at("integer").get<bool>();
      } else {
        throw DataFormatError("search space json: unknown kind '" + kind + "'");
      }
      tree.nodes.push_back(std::move(n));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("search space json: ") + e.what());
  }
  for (auto& n : tree.nodes) n.children.clear();
  for (const auto& n : tree.nodes)
    if (n.parent >= 0) tree.nodes[n.parent].children.push_back(n.id);
  tree.validate();
  return tree;
}

}  // namespace automl
