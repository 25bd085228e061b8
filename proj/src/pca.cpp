#include "hts/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hts/errors.hpp"

namespace hts {

PcaResult pca(const Eigen::MatrixXd &X) {
  const Eigen::Index n = X.rows();
  if (n < 2 || X.cols() < 2) throw DataError("pca: need at least 2 rows and 2 columns");
  if (!X.allFinite()) throw DataError("pca: input contains non-finite entries");

  PcaResult res;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double mu = X.col(j).mean();
    double ss = (X.col(j).array() - mu).square().sum();
    if (ss > 1e-24) {
      keep.push_back(j);
      res.kept_columns.push_back(static_cast<int>(j));
    } else {
      res.dropped_columns.push_back(static_cast<int>(j));
    }
  }
  const Eigen::Index p = static_cast<Eigen::Index>(keep.size());
  if (p < 2) throw DataError("pca: fewer than 2 non-degenerate columns");

  Eigen::MatrixXd Z(n, p);
  for (Eigen::Index jj = 0; jj < p; ++jj) {
    Eigen::VectorXd c = X.col(keep[jj]);
    double mu = c.mean();
    c.array() -= mu;
    double sd = std::sqrt(c.squaredNorm() / static_cast<double>(n - 1));
    Z.col(jj) = c / sd;
  }

  Eigen::MatrixXd corr = Z.transpose() * Z / static_cast<double>(n - 1);
  corr = 0.5 * (corr + corr.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  if (eig.info() != Eigen::Success) throw NumericError("pca: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; flip to descending.
  Eigen::VectorXd evals = eig.eigenvalues().reverse();
  Eigen::MatrixXd evecs = eig.eigenvectors().rowwise().reverse();
  evals = evals.cwiseMax(0.0);

  res.loadings = Eigen::MatrixXd(p, p);
  for (Eigen::Index k = 0; k < p; ++k) {
    Eigen::VectorXd v = evecs.col(k);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    res.loadings.row(k) = v.transpose();
  }
  res.scores = Z * res.loadings.transpose();
  double total = evals.sum();
  res.explained_variance_ratio =
      total > 0 ? Eigen::VectorXd(evals / total) : Eigen::VectorXd::Zero(p);
  return res;
}

}  // namespace hts
