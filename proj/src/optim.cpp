#include "hts/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace hts::optim {

Result nelder_mead(const std::function<double(const Eigen::VectorXd &)> &f,
                   const Eigen::VectorXd &x0, double initial_step, int max_evals,
                   double tol) {
  const int n = static_cast<int>(x0.size());
  Result res;
  res.x = x0;
  if (n == 0) {
    res.value = f(x0);
    res.evaluations = 1;
    res.converged = true;
    return res;
  }

  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd &p) {
    ++evals;
    double v = f(p);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  vals[0] = eval(pts[0]);
  for (int i = 0; i < n; ++i) {
    pts[i + 1](i) += (x0(i) != 0.0 ? initial_step * std::abs(x0(i)) : initial_step);
    vals[i + 1] = eval(pts[i + 1]);
  }

  std::vector<int> idx(n + 1);
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  while (evals < max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    int best = idx[0], worst = idx[n], second = idx[n - 1];

    if (std::isfinite(vals[best]) && std::isfinite(vals[worst]) &&
        std::abs(vals[worst] - vals[best]) <=
            tol * (std::abs(vals[best]) + std::abs(vals[worst]) + 1e-30)) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);

    Eigen::VectorXd refl = centroid + alpha * (centroid - pts[worst]);
    double frefl = eval(refl);

    if (frefl < vals[best]) {
      Eigen::VectorXd exp_pt = centroid + gamma * (refl - centroid);
      double fexp = eval(exp_pt);
      if (fexp < frefl) {
        pts[worst] = exp_pt;
        vals[worst] = fexp;
      } else {
        pts[worst] = refl;
        vals[worst] = frefl;
      }
    } else if (frefl < vals[second]) {
      pts[worst] = refl;
      vals[worst] = frefl;
    } else {
      Eigen::VectorXd contr = centroid + rho * (pts[worst] - centroid);
      double fcontr = eval(contr);
      if (fcontr < vals[worst]) {
        pts[worst] = contr;
        vals[worst] = fcontr;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + sigma * (pts[i] - pts[best]);
          vals[i] = eval(pts[i]);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (vals[i] < vals[best]) best = i;
  res.x = pts[best];
  res.value = vals[best];
  res.evaluations = evals;
  return res;
}

}  // namespace hts::optim
