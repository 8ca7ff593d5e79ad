#pragma once

#include <cstdint>
#include <vector>

namespace automl {

// Mean per-class recall over the classes present in y_true.
double balanced_accuracy(const std::vector<int32_t>& y_true,
                         const std::vector<int32_t>& y_pred);

// 1 - |TPR(group 0) - TPR(group 1)| where TPR is the recall of class 1
// inside the group. Defined as 1.0 when `sensitive` is empty or when the
// positive class is missing from either group.
double equal_opportunity(const std::vector<int32_t>& y_true,
                         const std::vector<int32_t>& y_pred,
                         const std::vector<int8_t>& sensitive);

}  // namespace automl
