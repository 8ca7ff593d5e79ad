#include "automl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "automl/errors.hpp"

namespace automl {

double balanced_accuracy(const std::vector<int32_t>& y_true,
                         const std::vector<int32_t>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw InvalidInputError("balanced_accuracy: length mismatch");
  if (y_true.empty())
    throw InvalidInputError("balanced_accuracy: empty labels");

  std::map<int32_t, std::pair<int, int>> per_class;  // class -> (hits, total)
  for (size_t i = 0; i < y_true.size(); ++i) {
    auto& [hits, total] = per_class[y_true[i]];
    ++total;
    if (y_pred[i] == y_true[i]) ++hits;
  }
  double sum = 0;
  for (const auto& [cls, counts] : per_class)
    sum += static_cast<double>(counts.first) / counts.second;
  return sum / static_cast<double>(per_class.size());
}

double equal_opportunity(const std::vector<int32_t>& y_true,
                         const std::vector<int32_t>& y_pred,
                         const std::vector<int8_t>& sensitive) {
  if (sensitive.empty()) return 1.0;
  if (y_true.size() != y_pred.size() || y_true.size() != sensitive.size())
    throw InvalidInputError("equal_opportunity: length mismatch");

  int positives[2] = {0, 0};
  int hits[2] = {0, 0};
  for (size_t i = 0; i < y_true.size(); ++i) {
    int8_t g = sensitive[i];
    if (g != 0 && g != 1)
      throw InvalidInputError("equal_opportunity: sensitive attribute not binary");
    if (y_true[i] == 1) {
      ++positives[g];
      if (y_pred[i] == 1) ++hits[g];
    }
  }
  if (positives[0] == 0 || positives[1] == 0) return 1.0;
  double tpr0 = static_cast<double>(hits[0]) / positives[0];
  double tpr1 = static_cast<double>(hits[1]) / positives[1];
  return 1.0 - std::abs(tpr0 - tpr1);
}

}  // namespace automl
