#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <set>

#include "automl/errors.hpp"
#include "automl/rng.hpp"
#include "automl/search_space.hpp"

using namespace automl;

namespace {

ActivationMask random_raw_mask(const SearchSpaceTree& tree, Rng& rng) {
  ActivationMask m;
  m.bits.resize(tree.size());
  for (auto& b : m.bits) b = rng.bernoulli(0.5) ? 1 : 0;
  return m;
}

bool violates_edge(const SearchSpaceTree& tree, const ActivationMask& m) {
  for (const auto& node : tree.nodes)
    if (node.parent >= 0 && m.bits[node.id] && !m.bits[node.parent])
      return true;
  return false;
}

}  // namespace

TEST_CASE("default space has the six component roots") {
  SearchSpaceTree tree = build_default_space();
  tree.validate();
  std::set<std::string> roots;
  for (const auto& node : tree.nodes)
    if (node.parent == -1) roots.insert(node.name);
  CHECK(roots == std::set<std::string>{"encoding", "imputation", "scaling",
                                       "sampling", "class_weighting",
                                       "classifier"});
}

TEST_CASE("knn neighbor count hangs under the knn strategy") {
  SearchSpaceTree tree = build_default_space();
  const auto& k = tree.at("knn.n_neighbors");
  CHECK(tree.nodes[k.parent].name == "classifier.knn");
}

TEST_CASE("node count is stable across constructions") {
  SearchSpaceTree a = build_default_space();
  SearchSpaceTree b = build_default_space();
  CHECK(a.size() == b.size());
  CHECK(a.version == b.version);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.nodes[i].name == b.nodes[i].name);
    CHECK(a.nodes[i].parent == b.nodes[i].parent);
  }
}

TEST_CASE("normalization forces children of inactive parents off") {
  SearchSpaceTree tree = build_default_space();
  ActivationMask raw = all_active_mask(tree);
  const auto& knn = tree.at("classifier.knn");
  const auto& k = tree.at("knn.n_neighbors");
  raw.bits[knn.id] = 0;
  raw.bits[k.id] = 1;
  ActivationMask fixed = normalize_mask(tree, raw);
  CHECK(fixed.bits[k.id] == 0);
}

TEST_CASE("closed masks pass through unchanged") {
  SearchSpaceTree tree = build_default_space();
  ActivationMask all = all_active_mask(tree);
  CHECK(normalize_mask(tree, all) == all);
  ActivationMask none = all_inactive_mask(tree);
  CHECK(normalize_mask(tree, none) == none);
}

TEST_CASE("a thousand random masks normalize closed and idempotent") {
  SearchSpaceTree tree = build_default_space();
  Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    ActivationMask raw = random_raw_mask(tree, rng);
    ActivationMask once = normalize_mask(tree, raw);
    CHECK(!violates_edge(tree, once));
    CHECK(mask_is_normalized(tree, once));
    CHECK(normalize_mask(tree, once) == once);
    // Normalization only clears bits.
    for (size_t b = 0; b < raw.bits.size(); ++b)
      CHECK(once.bits[b] <= raw.bits[b]);
  }
}

TEST_CASE("mask length mismatches are rejected") {
  SearchSpaceTree tree = build_default_space();
  ActivationMask wrong;
  wrong.bits.assign(tree.size() - 1, 1);
  CHECK_THROWS_AS(normalize_mask(tree, wrong), InvalidMaskError);
  Rng rng(1);
  CHECK_THROWS_AS(sample_candidate(tree, wrong, rng), InvalidMaskError);
}

TEST_CASE("the all-inactive mask samples the all-defaults candidate") {
  SearchSpaceTree tree = build_default_space();
  Rng rng(7);
  PipelineCandidate c = sample_candidate(tree, all_inactive_mask(tree), rng);
  for (const auto& node : tree.nodes) {
    if (node.strategy) continue;  // strategy bits mirror the parent choice
    CHECK(c.values[node.id] == doctest::Approx(node.default_value));
  }
}

TEST_CASE("sampling is deterministic per seed") {
  SearchSpaceTree tree = build_default_space();
  ActivationMask mask = all_active_mask(tree);
  Rng a(7), b(7);
  CHECK(sample_candidate(tree, mask, a) == sample_candidate(tree, mask, b));
  Rng c(8);
  CHECK(sample_candidate(tree, mask, a) != sample_candidate(tree, mask, c));
}

TEST_CASE("sampled candidates respect numeric ranges and choices") {
  SearchSpaceTree tree = build_default_space();
  ActivationMask mask = all_active_mask(tree);
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    PipelineCandidate c = sample_candidate(tree, mask, rng);
    for (const auto& node : tree.nodes) {
      double v = c.values[node.id];
      if (node.kind == NodeKind::Numeric) {
        CHECK(v >= node.lo);
        CHECK(v <= node.hi);
        if (node.integer) CHECK(v == doctest::Approx(std::round(v)));
      } else if (node.kind == NodeKind::Categorical) {
        CHECK(v >= 0);
        CHECK(v < static_cast<double>(node.choices.size()));
      } else {
        CHECK((v == 0.0 || v == 1.0));
      }
    }
  }
}

TEST_CASE("mask features are the bits as doubles") {
  SearchSpaceTree tree = build_default_space();
  auto zeros = mask_to_features(tree, all_inactive_mask(tree));
  CHECK(zeros.size() == tree.size());
  CHECK(std::accumulate(zeros.begin(), zeros.end(), 0.0) == 0.0);
  auto ones = mask_to_features(tree, all_active_mask(tree));
  CHECK(std::accumulate(ones.begin(), ones.end(), 0.0) ==
        doctest::Approx(static_cast<double>(tree.size())));

  ActivationMask mixed = all_active_mask(tree);
  mixed.bits[tree.at("classifier.knn").id] = 0;
  mixed = normalize_mask(tree, mixed);
  auto f = mask_to_features(tree, mixed);
  double active = 0;
  for (uint8_t b : mixed.bits) active += b;
  CHECK(std::accumulate(f.begin(), f.end(), 0.0) == doctest::Approx(active));
}

TEST_CASE("candidate features are fixed width in [0, 1]") {
  SearchSpaceTree tree = build_default_space();
  ActivationMask mask = all_active_mask(tree);
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    PipelineCandidate c = sample_candidate(tree, mask, rng);
    auto f = candidate_features(tree, c);
    REQUIRE(f.size() == 2 * tree.size());
    for (double v : f) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("tree json round trip preserves structure") {
  SearchSpaceTree tree = build_default_space();
  SearchSpaceTree restored = tree_from_json(tree_to_json(tree));
  restored.validate();
  CHECK(restored.version == tree.version);
  REQUIRE(restored.size() == tree.size());
  for (size_t i = 0; i < tree.size(); ++i) {
    CHECK(restored.nodes[i].name == tree.nodes[i].name);
    CHECK(restored.nodes[i].parent == tree.nodes[i].parent);
    CHECK(restored.nodes[i].kind == tree.nodes[i].kind);
    CHECK(restored.nodes[i].default_value ==
          doctest::Approx(tree.nodes[i].default_value));
    CHECK(restored.nodes[i].children == tree.nodes[i].children);
  }
}

TEST_CASE("candidate json names categorical values") {
  SearchSpaceTree tree = build_default_space();
  Rng rng(3);
  PipelineCandidate c = sample_candidate(tree, all_inactive_mask(tree), rng);
  auto j = candidate_to_json(tree, c);
  const auto& classifier = tree.at("classifier");
  std::string chosen =
      classifier.choices[static_cast<size_t>(c.values[classifier.id])];
  CHECK(j.at("classifier").get<std::string>() == chosen);
}
