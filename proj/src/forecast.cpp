#include "hts/forecast.hpp"

#include <limits>

#include "hts/errors.hpp"

namespace hts {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_inputs(const Eigen::VectorXd &train, int h) {
  if (train.size() < 1) throw DataError("forecast: empty series");
  if (h < 1) throw DataError("forecast: horizon must be >= 1");
  if (!train.allFinite()) throw DataError("forecast: non-finite training values");
}
}  // namespace

ForecastBundle forecast_mean(const Eigen::VectorXd &train, int h) {
  check_inputs(train, h);
  ForecastBundle b;
  b.method = "avg";
  double m = train.mean();
  b.point = Eigen::VectorXd::Constant(h, m);
  b.fitted = Eigen::VectorXd::Constant(train.size(), m);
  b.residuals = train.array() - m;
  b.model_meta = "mean";
  return b;
}

ForecastBundle forecast_naive(const Eigen::VectorXd &train, int h) {
  check_inputs(train, h);
  ForecastBundle b;
  b.method = "nve";
  b.point = Eigen::VectorXd::Constant(h, train(train.size() - 1));
  b.fitted = Eigen::VectorXd::Constant(train.size(), kNaN);
  b.residuals = Eigen::VectorXd::Constant(train.size(), kNaN);
  for (Eigen::Index t = 1; t < train.size(); ++t) {
    b.fitted(t) = train(t - 1);
    b.residuals(t) = train(t) - b.fitted(t);
  }
  b.model_meta = "naive";
  return b;
}

ForecastBundle forecast_snaive(const Eigen::VectorXd &train, int h, int m) {
  check_inputs(train, h);
  if (m < 1) throw DataError("snaive: period must be >= 1");
  const Eigen::Index T = train.size();
  if (T < m) throw DataError("snaive: need at least one full season");
  ForecastBundle b;
  b.method = "snv";
  b.point.resize(h);
  for (int step = 1; step <= h; ++step) {
    int k = (step - 1) / m;
    // y_{T + step - m(k+1)}, 1-based.
    Eigen::Index src = T + step - static_cast<Eigen::Index>(m) * (k + 1) - 1;
    b.point(step - 1) = train(src);
  }
  b.fitted = Eigen::VectorXd::Constant(T, kNaN);
  b.residuals = Eigen::VectorXd::Constant(T, kNaN);
  for (Eigen::Index t = m; t < T; ++t) {
    b.fitted(t) = train(t - m);
    b.residuals(t) = train(t) - b.fitted(t);
  }
  b.model_meta = "snaive m=" + std::to_string(m);
  return b;
}

}  // namespace hts
