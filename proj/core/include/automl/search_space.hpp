#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace automl {

class Rng;

enum class NodeKind { Categorical, Numeric, Boolean };

// One node of the hyperparameter tree. Three flavors appear in practice:
//  - selector roots: categorical components (classifier, encoding, ...) whose
//    choices are gated by strategy child nodes;
//  - strategy nodes: boolean gates, one per selector choice, in choice order.
//    Their activation bit decides whether the choice is in the sampling pool;
//    their value always mirrors whether the parent selected them;
//  - hyperparameters: plain categorical / numeric / boolean knobs whose
//    activation bit decides "tune this" vs "hold at default".
struct HyperparameterNode {
  int id = -1;
  std::string name;
  NodeKind kind = NodeKind::Categorical;
  int parent = -1;  // -1 for roots; always < id
  bool strategy = false;

  std::vector<std::string> choices;  // categorical only
  double lo = 0.0, hi = 0.0;         // numeric only
  bool log_scale = false;
  bool integer = false;

  // Categorical: default choice index. Boolean: 0/1. Numeric: value in range.
  double default_value = 0.0;

  std::vector<int> children;  // derived on construction / deserialization
};

struct ActivationMask {
  std::vector<uint8_t> bits;

  size_t size() const { return bits.size(); }
  bool operator==(const ActivationMask&) const = default;
};

// Node values in id order. `values` holds choice indices for categoricals,
// 0/1 for booleans, raw values for numerics. `sampled[i]` records whether
// node i was actually drawn for this candidate (active and on the selected
// strategy path), as opposed to defaulted.
struct PipelineCandidate {
  std::vector<double> values;
  std::vector<uint8_t> sampled;

  bool operator==(const PipelineCandidate&) const = default;
};

struct SearchSpaceTree {
  std::string version;
  std::vector<HyperparameterNode> nodes;

  size_t size() const { return nodes.size(); }
  int index_of(const std::string& name) const;
  const HyperparameterNode& at(const std::string& name) const;

  // Checks structural invariants; throws DataFormatError on violation.
  void validate() const;
};

// The versioned default space: 6 component roots, 48 nodes, six classifier
// families with 2-5 tunable hyperparameters each.
SearchSpaceTree build_default_space();

ActivationMask all_active_mask(const SearchSpaceTree& tree);
ActivationMask all_inactive_mask(const SearchSpaceTree& tree);

// Forces every node with an inactive ancestor inactive. Idempotent; never
// activates a bit. Throws InvalidMaskError on length mismatch.
ActivationMask normalize_mask(const SearchSpaceTree& tree,
                              const ActivationMask& raw);

bool mask_is_normalized(const SearchSpaceTree& tree, const ActivationMask& mask);

// Draws one candidate. Inactive hyperparameters keep their defaults; selector
// roots draw uniformly from their active strategies (default choice when the
// root is inactive or no strategy is active). Throws InvalidMaskError when
// the mask is not normalized.
PipelineCandidate sample_candidate(const SearchSpaceTree& tree,
                                   const ActivationMask& mask, Rng& rng);

// Mask bits as 0/1 doubles in node-id order.
std::vector<double> mask_to_features(const SearchSpaceTree& tree,
                                     const ActivationMask& mask);

// Fixed-width candidate encoding for the surrogate: per-candidate sampled
// bits followed by min-max-normalized node values (log-scaled numerics are
// normalized in log space).
std::vector<double> candidate_features(const SearchSpaceTree& tree,
                                       const PipelineCandidate& candidate);

double normalized_node_value(const HyperparameterNode& node, double value);

// Readable {node name: value} rendering; categorical values by choice name.
nlohmann::json candidate_to_json(const SearchSpaceTree& tree,
                                 const PipelineCandidate& candidate);

nlohmann::json tree_to_json(const SearchSpaceTree& tree);
SearchSpaceTree tree_from_json(const nlohmann::json& j);

}  // namespace automl
