#pragma once

#include <Eigen/Dense>
#include <string>

namespace hts {

// Point forecasts with the in-sample one-step fit that produced them.
// fitted/residuals are aligned with the training series; entries that the
// method cannot produce (warm-up) are NaN. residual = observed - fitted.
struct ForecastBundle {
  std::string method;
  Eigen::VectorXd point;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  std::string model_meta;
};

ForecastBundle forecast_mean(const Eigen::VectorXd &train, int h);
ForecastBundle forecast_naive(const Eigen::VectorXd &train, int h);
// Repeats the last observed seasonal cycle; requires at least one full cycle.
ForecastBundle forecast_snaive(const Eigen::VectorXd &train, int h, int m);

}  // namespace hts
