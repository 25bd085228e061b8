#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hts/forecast.hpp"

namespace hts::arima {

struct Orders {
  int p = 0, d = 0, q = 0;
  int P = 0, D = 0, Q = 0;
  int period = 1;

  int n_coef() const { return p + q + P + Q; }
  std::string tag() const;  // "ARIMA(p,d,q)(P,D,Q)[m]"
};

struct MaxOrders {
  int p = 5, q = 5, P = 2, Q = 2;
  int d = 2, D = 1;
};

struct ArimaModel {
  Orders orders;
  Eigen::VectorXd phi, theta;    // non-seasonal AR / MA
  Eigen::VectorXd sphi, stheta;  // seasonal AR / MA
  double intercept = 0.0;        // present only when d + D == 0
  bool has_intercept = false;
  double sigma2 = 0.0;
  double aicc = 0.0;
  Eigen::VectorXd fitted;     // aligned with the training series, NaN warm-up
  Eigen::VectorXd residuals;  // observed - fitted
  std::string meta;
};

// Fits one fixed-order model by conditional-sum-of-squares (Nelder-Mead over
// the coefficients). Throws NumericError when the optimum is explosive or
// non-invertible.
ArimaModel fit_fixed(const Eigen::VectorXd &train, const Orders &orders);

// Automatic order selection: d by repeated KPSS testing (5% level, max 2),
// D = 1 when the seasonal strength reaches 0.64, then an AICc grid search
// over p,q <= max.p/q and P,Q <= max.P/Q.
ArimaModel fit(const Eigen::VectorXd &train, int m, const MaxOrders &max_orders = {});

ForecastBundle forecast(const ArimaModel &model, const Eigen::VectorXd &train, int h);

// True when every root of 1 - c1 z - ... - ck z^k lies outside the unit
// circle (also used with sign-flipped MA coefficients for invertibility).
bool roots_outside_unit_circle(const Eigen::VectorXd &coef);

}  // namespace hts::arima
