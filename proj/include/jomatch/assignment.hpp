#pragma once

#include <Eigen/Dense>

#include <vector>

namespace jomatch {

// Maximum-weight assignment on a rectangular weight matrix (Hungarian method,
// padded to square). Returns the column assigned to each row, or -1.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight);

}  // namespace jomatch
