#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hts {

struct PcaResult {
  Eigen::MatrixXd loadings;  // k x p, orthonormal rows
  Eigen::MatrixXd scores;    // n x k
  Eigen::VectorXd explained_variance_ratio;  // non-increasing, in [0,1]
  std::vector<int> kept_columns;             // indices into the input matrix
  std::vector<int> dropped_columns;          // zero-variance inputs
};

// Principal components of the column-standardized matrix (eigendecomposition
// of the correlation matrix). Zero-variance columns are dropped and recorded.
// Sign convention: the largest-magnitude loading of each component is
// positive.
PcaResult pca(const Eigen::MatrixXd &X);

}  // namespace hts
