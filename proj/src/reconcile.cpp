#include "hts/reconcile.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "hts/errors.hpp"

namespace hts {

std::string weight_kind_name(WeightKind kind) {
  switch (kind) {
    case WeightKind::Ols: return "ols";
    case WeightKind::WlsVar: return "wls_var";
    case WeightKind::Structural: return "structural";
    case WeightKind::SampleCov: return "sample_cov";
    case WeightKind::Shrinkage: return "shrinkage";
  }
  return "?";
}

WeightKind parse_weight_kind(const std::string &name) {
  if (name == "ols") return WeightKind::Ols;
  if (name == "wls_var" || name == "var") return WeightKind::WlsVar;
  if (name == "structural" || name == "stc") return WeightKind::Structural;
  if (name == "sample_cov" || name == "cov") return WeightKind::SampleCov;
  if (name == "shrinkage" || name == "mit") return WeightKind::Shrinkage;
  throw DataError("unknown weight kind '" + name + "'");
}

double shrinkage_lambda(const Eigen::MatrixXd &residuals) {
  const Eigen::Index n = residuals.rows();
  const Eigen::Index m = residuals.cols();
  if (n < 3) throw DataError("shrinkage_lambda: need at least 3 residual rows");

  // Center and standardize columns (sd with n-1 denominator).
  Eigen::MatrixXd xs = residuals;
  for (Eigen::Index j = 0; j < m; ++j) {
    double mu = xs.col(j).mean();
    xs.col(j).array() -= mu;
    double sd = std::sqrt(xs.col(j).squaredNorm() / static_cast<double>(n - 1));
    if (sd <= 0.0)
      throw NumericError("shrinkage_lambda: zero-variance residual column " +
                         std::to_string(j));
    xs.col(j) /= sd;
  }

  // w_tij are products of standardized residuals; r_ij = n/(n-1) * mean_t(w).
  // Var(r_ij) uses the unbiased n/((n-1)^3) * sum (w - wbar)^2 form.
  double num = 0.0, den = 0.0;
  const double nn = static_cast<double>(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      for (Eigen::Index t = 0; t < n; ++t) w(t) = xs(t, i) * xs(t, j);
      double wbar = w.sum() / nn;
      double ss = 0.0;
      // A constant product sequence has zero variance; skipping the loop keeps
      // the perfectly-correlated case exact instead of ulp-sized.
      if (w.maxCoeff() > w.minCoeff()) {
        for (Eigen::Index t = 0; t < n; ++t) {
          double dv = w(t) - wbar;
          ss += dv * dv;
        }
      }
      double var_r = nn / ((nn - 1.0) * (nn - 1.0) * (nn - 1.0)) * ss;
      double r = nn / (nn - 1.0) * wbar;
      num += var_r;
      den += r * r;
    }
  }
  // Off-diagonal sums count both (i,j) and (j,i); the factor 2 cancels.
  if (den <= 0.0) return 1.0;
  double lambda = num / den;
  return std::min(1.0, std::max(0.0, lambda));
}

namespace {

// (1/n) sum_t e_t e_t', accumulated per entry and mirrored so the result is
// symmetric bit for bit.
Eigen::MatrixXd uncentered_moment(const Eigen::MatrixXd &residuals) {
  const Eigen::Index n = residuals.rows();
  const Eigen::Index m = residuals.cols();
  Eigen::MatrixXd w1(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      double s = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) s += residuals(t, i) * residuals(t, j);
      w1(i, j) = s / static_cast<double>(n);
      w1(j, i) = w1(i, j);
    }
  }
  return w1;
}

// Cholesky with up to three rounds of diagonal jitter.
Eigen::LLT<Eigen::MatrixXd> chol_with_jitter(Eigen::MatrixXd &W, const char *what) {
  Eigen::LLT<Eigen::MatrixXd> llt(W);
  int tries = 0;
  while (llt.info() != Eigen::Success && tries < 3) {
    double jitter = 1e-8 * W.diagonal().mean();
    if (!(jitter > 0.0)) jitter = 1e-12;
    W.diagonal().array() += jitter;
    llt.compute(W);
    ++tries;
  }
  if (llt.info() != Eigen::Success)
    throw NumericError(std::string(what) + ": weight matrix is not positive definite");
  return llt;
}

}  // namespace

WeightSpec estimate_W(const Eigen::MatrixXd &residuals, const SummingMatrix &S,
                      WeightKind kind) {
  const Eigen::Index m = S.rows();
  const Eigen::Index n = residuals.rows();
  if (kind != WeightKind::Structural) {
    if (residuals.cols() != m)
      throw DataError("estimate_W: residual columns must match node count");
    if (n < 2) throw DataError("estimate_W: need at least 2 residual rows");
    if (!residuals.allFinite())
      throw DataError("estimate_W: residuals contain non-finite entries");
  }

  WeightSpec spec;
  spec.kind = kind;
  switch (kind) {
    case WeightKind::Ols:
      spec.matrix = Eigen::MatrixXd::Identity(m, m);
      break;
    case WeightKind::Structural: {
      Eigen::VectorXd row_sums = S.entries.rowwise().sum();
      spec.matrix = row_sums.asDiagonal();
      break;
    }
    case WeightKind::WlsVar: {
      Eigen::MatrixXd w1 = uncentered_moment(residuals);
      for (Eigen::Index j = 0; j < m; ++j)
        if (w1(j, j) <= 0.0)
          throw NumericError("estimate_W: zero-variance series under wls_var (column " +
                             std::to_string(j) + ")");
      spec.matrix = w1.diagonal().asDiagonal();
      break;
    }
    case WeightKind::SampleCov: {
      if (n <= m)
        throw NumericError("estimate_W: sample_cov needs more residual rows than nodes");
      spec.matrix = uncentered_moment(residuals);
      break;
    }
    case WeightKind::Shrinkage: {
      spec.lambda = shrinkage_lambda(residuals);
      Eigen::MatrixXd w1 = uncentered_moment(residuals);
      Eigen::MatrixXd diag = w1.diagonal().asDiagonal();
      spec.matrix = spec.lambda * diag + (1.0 - spec.lambda) * w1;
      break;
    }
  }

  // Construction is symmetric; make sure Cholesky succeeds (jitter only
  // touches the diagonal, so it keeps the off-diagonal identities intact).
  Eigen::MatrixXd probe = spec.matrix;
  chol_with_jitter(probe, "estimate_W");
  spec.matrix = probe;
  return spec;
}

ReconciledBundle mint_reconcile(const SummingMatrix &S, const WeightSpec &W,
                                const Eigen::MatrixXd &base) {
  const Eigen::Index m = S.rows();
  const Eigen::Index mk = S.cols();
  if (base.cols() != m) throw DataError("mint_reconcile: base columns must equal node count");
  if (W.matrix.rows() != m || W.matrix.cols() != m)
    throw DataError("mint_reconcile: W shape mismatch");
  if ((W.matrix - W.matrix.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + W.matrix.cwiseAbs().maxCoeff()))
    throw DataError("mint_reconcile: W must be symmetric");

  Eigen::MatrixXd Wm = W.matrix;
  auto llt = chol_with_jitter(Wm, "mint_reconcile");

  // P = (S' W^-1 S)^-1 S' W^-1 via two solves; no explicit inverses.
  Eigen::MatrixXd WinvS = llt.solve(S.entries);            // m x mk
  Eigen::MatrixXd gram = S.entries.transpose() * WinvS;    // mk x mk, SPD
  gram = 0.5 * (gram + gram.transpose()).eval();
  auto gram_llt = chol_with_jitter(gram, "mint_reconcile gram");

  ReconciledBundle out;
  out.method = "mint(" + weight_kind_name(W.kind) + ")";
  out.p_matrix = gram_llt.solve(WinvS.transpose());        // mk x m
  Eigen::MatrixXd bottom = base * out.p_matrix.transpose();  // h x mk
  out.point = bottom * S.entries.transpose();                // h x m
  return out;
}

ReconciledBundle bottom_up(const SummingMatrix &S, const Eigen::MatrixXd &base) {
  const Eigen::Index m = S.rows();
  const Eigen::Index mk = S.cols();
  if (base.cols() != m) throw DataError("bottom_up: base columns must equal node count");
  ReconciledBundle out;
  out.method = "bottom_up";
  out.p_matrix = Eigen::MatrixXd::Zero(mk, m);
  out.p_matrix.rightCols(mk) = Eigen::MatrixXd::Identity(mk, mk);
  Eigen::MatrixXd bottom = base.rightCols(mk);
  out.point = bottom * S.entries.transpose();
  // The bottom block of the output must be the input, bit for bit.
  out.point.rightCols(mk) = bottom;
  return out;
}

ReconciledBundle top_down(const SummingMatrix &S, const Eigen::VectorXd &total_forecast,
                          const Eigen::VectorXd &proportions) {
  const Eigen::Index mk = S.cols();
  if (proportions.size() != mk) throw DataError("top_down: proportion length mismatch");
  if (proportions.minCoeff() < 0.0) throw DataError("top_down: negative proportion");
  if (std::abs(proportions.sum() - 1.0) > 1e-9)
    throw DataError("top_down: proportions must sum to 1");

  ReconciledBundle out;
  out.method = "top_down";
  Eigen::MatrixXd bottom = total_forecast * proportions.transpose();  // h x mk
  out.point = bottom * S.entries.transpose();
  out.p_matrix = Eigen::MatrixXd::Zero(mk, S.rows());
  out.p_matrix.col(0) = proportions;  // root row is first in the summing order
  return out;
}

Eigen::VectorXd compute_proportions(const SeriesFrame &train, const SummingMatrix &S,
                                    ProportionMethod method) {
  const Eigen::Index mk = S.cols();
  if (train.values().cols() != mk)
    throw DataError("compute_proportions: train frame must hold the bottom series");
  const Eigen::MatrixXd &bottom = train.values();
  Eigen::VectorXd totals = bottom.rowwise().sum();

  Eigen::VectorXd p(mk);
  if (method == ProportionMethod::AverageHistorical) {
    for (Eigen::Index t = 0; t < totals.size(); ++t)
      if (totals(t) <= 0.0)
        throw NumericError("compute_proportions: zero total at row " + std::to_string(t));
    p.setZero();
    for (Eigen::Index t = 0; t < bottom.rows(); ++t)
      p += bottom.row(t).transpose() / totals(t);
    p /= static_cast<double>(bottom.rows());
  } else {
    double tot_mean = totals.mean();
    if (tot_mean <= 0.0) throw NumericError("compute_proportions: zero mean total");
    p = bottom.colwise().mean().transpose() / tot_mean;
  }
  return p;
}

}  // namespace hts
