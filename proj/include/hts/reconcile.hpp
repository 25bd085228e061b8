#pragma once

#include <Eigen/Dense>
#include <string>

#include "hts/frame.hpp"
#include "hts/hierarchy.hpp"

namespace hts {

enum class WeightKind { Ols, WlsVar, Structural, SampleCov, Shrinkage };

std::string weight_kind_name(WeightKind kind);
WeightKind parse_weight_kind(const std::string &name);

// A materialized symmetric positive-definite W for the MinT projection.
struct WeightSpec {
  WeightKind kind = WeightKind::Ols;
  Eigen::MatrixXd matrix;
  double lambda = 0.0;  // shrinkage intensity, only for kind == Shrinkage
};

// Schafer-Strimmer shrinkage intensity from one-step residuals, clamped to
// [0, 1]. Rows are time, columns are nodes.
double shrinkage_lambda(const Eigen::MatrixXd &residuals);

// Builds W from aligned residual rows. The one-step moment matrix W1 uses
// uncentered products (1/n) sum e_t e_t'; the shrinkage correlations are
// centered, which is a deliberate asymmetry of the construction.
WeightSpec estimate_W(const Eigen::MatrixXd &residuals, const SummingMatrix &S,
                      WeightKind kind);

struct ReconciledBundle {
  std::string method;
  Eigen::MatrixXd point;     // h x m, coherent
  Eigen::MatrixXd p_matrix;  // m_k x m mapping actually used
};

// MinT projection y~ = S (S' W^-1 S)^-1 S' W^-1 y^, computed with Cholesky
// solves. W gets up to three rounds of diagonal jitter before failing.
ReconciledBundle mint_reconcile(const SummingMatrix &S, const WeightSpec &W,
                                const Eigen::MatrixXd &base);

// P = [0 | I]: keep the bottom base forecasts, sum everything else.
ReconciledBundle bottom_up(const SummingMatrix &S, const Eigen::MatrixXd &base);

// Disaggregates the total-series forecast by fixed proportions.
ReconciledBundle top_down(const SummingMatrix &S, const Eigen::VectorXd &total_forecast,
                          const Eigen::VectorXd &proportions);

enum class ProportionMethod { AverageHistorical, ProportionOfAverages };

// Bottom-share vector from training history: mean of per-time shares, or the
// share of the means. `train` holds the bottom-level series.
Eigen::VectorXd compute_proportions(const SeriesFrame &train, const SummingMatrix &S,
                                    ProportionMethod method);

}  // namespace hts
