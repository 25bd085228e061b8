#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hts/stats.hpp"

namespace hts::features {

using stats::Decomposition;

// Classical additive decomposition (see stats::classical_decompose); exposed
// here because the strength features are defined in terms of it.
Decomposition decompose(const Eigen::VectorXd &series, int m);

// Named per-series diagnostics. Entries are NaN when a feature is undefined
// for the series (too short, constant, non-seasonal).
struct FeatureVector {
  double trend_strength, seasonal_strength, spikiness, linearity, curvature;
  double e_acf1, e_acf10, x_acf1, x_acf10;
  double diff1_acf1, diff1_acf10, diff2_acf1, diff2_acf10, season_acf1;
  double x_pacf5, diff1_pacf5, diff2_pacf5, season_pacf;
  double entropy;
  double box_pierce_stat, box_pierce_pval, ljung_box_stat, ljung_box_pval;
  double kpss_stat, kpss_pval;
  double ndiffs, nsdiffs;
  double stability, lumpiness;
  double max_level_shift, time_level_shift, max_var_shift, time_var_shift;
  double crossing_points, flat_spots;
  double seasonal_peak, seasonal_trough;
  double zero_start_prop, zero_end_prop, nonzero_interval_mean, nonzero_cv2;

  static const std::vector<std::string> &names();
  std::vector<double> values() const;
  double at(const std::string &name) const;
};

FeatureVector compute_features(const Eigen::VectorXd &series, int m);

// Individual features used directly elsewhere.
double stability(const Eigen::VectorXd &series, int tile_width);
double lumpiness(const Eigen::VectorXd &series, int tile_width);
int crossing_points(const Eigen::VectorXd &series);
int flat_spots(const Eigen::VectorXd &series);

}  // namespace hts::features
