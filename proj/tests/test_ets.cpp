#include <doctest.h>

#include <cmath>

#include "hts/ets.hpp"
#include "hts/stats.hpp"

using namespace hts;
using namespace hts::ets;

TEST_CASE("simple exponential smoothing recursion matches a hand oracle") {
  Eigen::VectorXd y(5);
  y << 3, 5, 4, 6, 5;
  CandidateSpec spec;  // (A,N,N)
  Params p;
  p.alpha = 0.5;
  State init;
  init.level = 3.0;
  init.seasonal = Eigen::VectorXd::Zero(1);

  auto r = filter(spec, p, init, y, 1);
  REQUIRE(r.ok);

  // Independent recursion: l <- l + alpha * (y - l).
  double level = 3.0;
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    CHECK(r.fitted(t) == doctest::Approx(level).epsilon(1e-12));
    level = level + 0.5 * (y(t) - level);
  }
  CHECK(r.final_state.level == doctest::Approx(level).epsilon(1e-10));

  auto fc = point_forecast(spec, p, r.final_state, 1, 3);
  for (int j = 0; j < 3; ++j) CHECK(fc(j) == doctest::Approx(level).epsilon(1e-10));
}

TEST_CASE("alpha = 1 collapses to the naive method exactly") {
  stats::Rng rng(31);
  Eigen::VectorXd y(24);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.uniform_int(1, 60);

  CandidateSpec spec;  // (A,N,N)
  Params p;
  p.alpha = 1.0;
  State init;
  init.level = y(0);
  init.seasonal = Eigen::VectorXd::Zero(1);
  auto r = filter(spec, p, init, y, 1);
  REQUIRE(r.ok);
  CHECK(r.final_state.level == y(y.size() - 1));
  auto fc = point_forecast(spec, p, r.final_state, 1, 4);
  for (int j = 0; j < 4; ++j) CHECK(fc(j) == y(y.size() - 1));
}

TEST_CASE("one-step fitted values equal the exponentially weighted average") {
  stats::Rng rng(8);
  Eigen::VectorXd y(40);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = 10.0 + rng.normal();

  const double alpha = 0.37;
  const double l0 = 9.0;
  CandidateSpec spec;
  Params p;
  p.alpha = alpha;
  State init;
  init.level = l0;
  init.seasonal = Eigen::VectorXd::Zero(1);
  auto r = filter(spec, p, init, y, 1);
  REQUIRE(r.ok);

  for (Eigen::Index t = 0; t < y.size(); ++t) {
    // mu_t = alpha * sum_{j=1..t} (1-alpha)^(j-1) y_{t-j} + (1-alpha)^t l0
    double mu = std::pow(1.0 - alpha, static_cast<double>(t)) * l0;
    for (Eigen::Index j = 1; j <= t; ++j)
      mu += alpha * std::pow(1.0 - alpha, static_cast<double>(j - 1)) * y(t - j);
    CHECK(r.fitted(t) == doctest::Approx(mu).epsilon(1e-8));
  }
}

TEST_CASE("candidate set restrictions") {
  stats::Rng rng(12);
  Eigen::VectorXd pos(30), mixed(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    pos(i) = 5.0 + rng.uniform();
    mixed(i) = rng.normal();
  }
  auto with_pos = default_candidates(pos, 4);
  auto with_mixed = default_candidates(mixed, 4);
  CHECK(with_pos.size() == 18);
  // Multiplicative forms need strictly positive data: {A} x {N,A,Ad} x {N,A}.
  CHECK(with_mixed.size() == 6);
  for (const auto &c : with_mixed) {
    CHECK(c.error == ErrorType::Additive);
    CHECK(c.seasonal != SeasonalType::Multiplicative);
  }
  // Short series lose the seasonal candidates.
  auto shorty = default_candidates(pos.head(8), 4);
  for (const auto &c : shorty) CHECK(c.seasonal == SeasonalType::None);
}

TEST_CASE("seasonal generator selects a seasonal model") {
  stats::Rng rng(2024);
  const int m = 4, T = 48;
  Eigen::VectorXd y(T);
  const double pattern[4] = {6.0, -2.0, -5.0, 1.0};
  for (int t = 0; t < T; ++t)
    y(t) = 10.0 + 2.0 * t / T + pattern[t % m] + 0.1 * rng.normal();

  auto model = fit(y, m);
  CHECK(model.spec.seasonal != SeasonalType::None);
  CHECK(model.params.alpha > 0.0);
  CHECK(model.params.alpha < 1.0);

  // Forecasts continue the seasonal pattern.
  auto fc = ets::forecast(model, m);
  Eigen::Index hi, lo;
  fc.point.maxCoeff(&hi);
  fc.point.minCoeff(&lo);
  CHECK(hi == 0);  // pattern peak right after the training window
  CHECK(lo == 2);
}

TEST_CASE("fitted model satisfies the state constraints") {
  stats::Rng rng(4);
  const int m = 4, T = 60;
  Eigen::VectorXd y(T);
  for (int t = 0; t < T; ++t)
    y(t) = 50.0 + 0.3 * t + 8.0 * std::sin(2.0 * M_PI * t / m) + rng.normal();

  auto model = fit(y, m);
  if (model.spec.seasonal == SeasonalType::Additive) {
    CHECK(std::abs(model.final_state.seasonal.sum()) < 1e-8);
  } else if (model.spec.seasonal == SeasonalType::Multiplicative) {
    CHECK(model.final_state.seasonal.mean() == doctest::Approx(1.0).epsilon(1e-8));
  }
  CHECK(std::isfinite(model.aicc));
  for (Eigen::Index t = 0; t < T; ++t) {
    if (std::isnan(model.fitted(t))) continue;
    CHECK(model.fitted(t) + model.residuals(t) == doctest::Approx(y(t)).epsilon(1e-10));
  }
}
