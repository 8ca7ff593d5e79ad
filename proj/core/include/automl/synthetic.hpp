#pragma once

#include <vector>

#include "automl/dataset.hpp"

namespace automl::synth {

// Deterministic toy-data generators. The bundled repository is the default
// meta-training corpus; individual generators are exposed for tests.

Dataset blobs(const std::string& name, uint64_t seed, int n_rows,
              int n_features, int n_classes, double separation,
              const std::vector<double>& class_weights = {});

Dataset moons(const std::string& name, uint64_t seed, int n_rows, double noise);

Dataset nominal_rules(const std::string& name, uint64_t seed, int n_rows);

// Numeric + nominal columns with a few missing cells in each.
Dataset mixed(const std::string& name, uint64_t seed, int n_rows);

// Binary labels plus a binary sensitive attribute correlated with the label.
Dataset fair_blobs(const std::string& name, uint64_t seed, int n_rows);

Dataset wide(const std::string& name, uint64_t seed, int n_rows, int n_features);

// Eight fixed datasets (fixed seeds, fixed shapes) used for meta-training
// and the desk-scale end-to-end comparisons.
std::vector<Dataset> bundled_repository();

}  // namespace automl::synth
