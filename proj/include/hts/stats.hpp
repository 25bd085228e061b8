#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hts::stats {

double mean(const Eigen::VectorXd &x);
// Sample variance (n-1 denominator); 0 for fewer than 2 points.
double variance(const Eigen::VectorXd &x);
// Mean/variance over the finite entries only.
double mean_finite(const Eigen::VectorXd &x);
double variance_finite(const Eigen::VectorXd &x);

// Autocorrelations at lags 1..max_lag (biased denominator, standard ACF).
Eigen::VectorXd acf(const Eigen::VectorXd &x, int max_lag);
// Partial autocorrelations at lags 1..max_lag via Durbin-Levinson.
Eigen::VectorXd pacf(const Eigen::VectorXd &x, int max_lag);

Eigen::VectorXd diff(const Eigen::VectorXd &x, int lag = 1);

// KPSS level-stationarity statistic with the short Bartlett bandwidth
// trunc(4 * (n/100)^(1/4)).
double kpss_level_stat(const Eigen::VectorXd &x);
// p-value by linear interpolation of the standard critical-value table,
// clamped to [0.01, 0.10].
double kpss_level_pvalue(double stat);

// Repeated KPSS testing at the 5% level (0.463), up to max_d differences.
int ndiffs_kpss(const Eigen::VectorXd &x, int max_d = 2);

struct Decomposition {
  Eigen::VectorXd trend;     // NaN at the ends where the moving average is undefined
  Eigen::VectorXd seasonal;  // zero-sum per-period indices, repeated
  Eigen::VectorXd remainder; // NaN wherever trend is
};

// Classical additive decomposition: centered moving average of window m
// (m+1 points with half weights when m is even), per-period means of the
// detrended series re-centered to sum zero.
Decomposition classical_decompose(const Eigen::VectorXd &x, int period);

// max(0, 1 - Var(remainder) / Var(trend + remainder)) over the interior.
double trend_strength(const Decomposition &d);
double seasonal_strength(const Decomposition &d);

// Proportion of periodogram entropy relative to the uniform spectrum; in [0,1].
double spectral_entropy(const Eigen::VectorXd &x);

// Upper-tail probability of the chi-squared distribution with df degrees.
double chi_squared_sf(double stat, double df);
double normal_cdf(double x);

struct Portmanteau {
  double stat = 0.0;
  double pvalue = 1.0;
};
Portmanteau box_pierce(const Eigen::VectorXd &x, int lag);
Portmanteau ljung_box(const Eigen::VectorXd &x, int lag);

// Deterministic xorshift-based generator for tests and simulations.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  uint64_t next();
  double uniform();                  // [0, 1)
  double normal();                   // standard normal (Box-Muller)
  int uniform_int(int lo, int hi);   // inclusive bounds

private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hts::stats
