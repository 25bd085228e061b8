#pragma once

#include <Eigen/Dense>
#include <functional>

namespace hts::optim {

struct Result {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Nelder-Mead simplex minimizer. The objective may return +inf to mark
// infeasible points; the search backs away from them.
Result nelder_mead(const std::function<double(const Eigen::VectorXd &)> &f,
                   const Eigen::VectorXd &x0, double initial_step = 0.1,
                   int max_evals = 5000, double tol = 1e-10);

}  // namespace hts::optim
