#include "hts/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hts/errors.hpp"

namespace hts::features {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(Eigen::VectorXd x) {
  std::sort(x.data(), x.data() + x.size());
  Eigen::Index n = x.size();
  return n % 2 ? x(n / 2) : 0.5 * (x(n / 2 - 1) + x(n / 2));
}

Eigen::VectorXd finite_only(const Eigen::VectorXd &x) {
  std::vector<double> v;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::isfinite(x(i))) v.push_back(x(i));
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Coefficients of the trend component on orthonormal linear and quadratic
// time polynomials.
void poly_trend_coefs(const Eigen::VectorXd &trend, double &lin, double &quad) {
  Eigen::VectorXd t = finite_only(trend);
  const Eigen::Index n = t.size();
  if (n < 3) { lin = quad = kNaN; return; }
  Eigen::VectorXd idx(n);
  for (Eigen::Index i = 0; i < n; ++i) idx(i) = static_cast<double>(i + 1);
  // Gram-Schmidt on [1, t, t^2].
  Eigen::VectorXd p0 = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd p1 = idx.array() - idx.mean();
  double n1 = p1.norm();
  if (n1 < 1e-12) { lin = quad = kNaN; return; }
  p1 /= n1;
  Eigen::VectorXd sq = idx.array().square();
  Eigen::VectorXd p2 = sq - p0 * p0.dot(sq) - p1 * p1.dot(sq);
  double n2 = p2.norm();
  if (n2 < 1e-12) { lin = p1.dot(t); quad = kNaN; return; }
  p2 /= n2;
  lin = p1.dot(t);
  quad = p2.dot(t);
}

struct Shift {
  double size = kNaN;
  double index = kNaN;
};

// Largest jump between two adjacent windows of the rolling statistic.
Shift max_shift(const Eigen::VectorXd &x, int width, bool variance) {
  const Eigen::Index n = x.size();
  Shift s;
  if (width < 1 || n < 2 * width) return s;
  Eigen::VectorXd roll(n - width + 1);
  for (Eigen::Index i = 0; i + width <= n; ++i) {
    auto seg = x.segment(i, width);
    roll(i) = variance ? stats::variance(seg) : seg.mean();
  }
  double best = -1.0;
  Eigen::Index best_i = 0;
  for (Eigen::Index i = 0; i + width < roll.size(); ++i) {
    double d = std::abs(roll(i + width) - roll(i));
    if (d > best) { best = d; best_i = i; }
  }
  if (best < 0) return s;
  s.size = best;
  s.index = static_cast<double>(best_i + width);  // 1-based end of the first window
  return s;
}

double acf_at(const Eigen::VectorXd &x, int lag) {
  if (lag < 1 || x.size() <= lag + 1) return kNaN;
  return stats::acf(x, lag)(lag - 1);
}

double acf10_sumsq(const Eigen::VectorXd &x) {
  if (x.size() <= 11) return kNaN;
  Eigen::VectorXd r = stats::acf(x, 10);
  return r.allFinite() ? r.squaredNorm() : kNaN;
}

double pacf5_sumsq(const Eigen::VectorXd &x) {
  if (x.size() <= 6) return kNaN;
  Eigen::VectorXd r = stats::pacf(x, 5);
  return r.allFinite() ? r.squaredNorm() : kNaN;
}

}  // namespace

Decomposition decompose(const Eigen::VectorXd &series, int m) {
  return stats::classical_decompose(series, m);
}

double stability(const Eigen::VectorXd &series, int tile_width) {
  const Eigen::Index n = series.size();
  if (tile_width < 1) throw DataError("stability: bad tile width");
  Eigen::Index tiles = n / tile_width;
  if (tiles < 2) return kNaN;
  Eigen::VectorXd means(tiles);
  for (Eigen::Index i = 0; i < tiles; ++i)
    means(i) = series.segment(i * tile_width, tile_width).mean();
  return stats::variance(means);
}

double lumpiness(const Eigen::VectorXd &series, int tile_width) {
  const Eigen::Index n = series.size();
  if (tile_width < 1) throw DataError("lumpiness: bad tile width");
  Eigen::Index tiles = n / tile_width;
  if (tiles < 2) return kNaN;
  Eigen::VectorXd vars(tiles);
  for (Eigen::Index i = 0; i < tiles; ++i)
    vars(i) = stats::variance(series.segment(i * tile_width, tile_width));
  return stats::variance(vars);
}

int crossing_points(const Eigen::VectorXd &series) {
  if (series.size() < 2) return 0;
  double med = median(series);
  int count = 0;
  for (Eigen::Index t = 0; t + 1 < series.size(); ++t) {
    bool above = series(t) > med;
    bool next_above = series(t + 1) > med;
    if (above != next_above) ++count;
  }
  return count;
}

int flat_spots(const Eigen::VectorXd &series) {
  const Eigen::Index n = series.size();
  if (n == 0) return 0;
  double lo = series.minCoeff(), hi = series.maxCoeff();
  // Ten equal-width bins; a constant series is one long flat spot.
  auto bin = [&](double v) {
    if (hi <= lo) return 0;
    int b = static_cast<int>((v - lo) / (hi - lo) * 10.0);
    return std::min(b, 9);
  };
  int longest = 1, run = 1;
  for (Eigen::Index t = 1; t < n; ++t) {
    if (bin(series(t)) == bin(series(t - 1))) ++run;
    else run = 1;
    longest = std::max(longest, run);
  }
  return longest;
}

const std::vector<std::string> &FeatureVector::names() {
  static const std::vector<std::string> n = {
      "trend_strength", "seasonal_strength", "spikiness", "linearity", "curvature",
      "e_acf1", "e_acf10", "x_acf1", "x_acf10",
      "diff1_acf1", "diff1_acf10", "diff2_acf1", "diff2_acf10", "season_acf1",
      "x_pacf5", "diff1_pacf5", "diff2_pacf5", "season_pacf",
      "entropy",
      "box_pierce_stat", "box_pierce_pval", "ljung_box_stat", "ljung_box_pval",
      "kpss_stat", "kpss_pval",
      "ndiffs", "nsdiffs",
      "stability", "lumpiness",
      "max_level_shift", "time_level_shift", "max_var_shift", "time_var_shift",
      "crossing_points", "flat_spots",
      "seasonal_peak", "seasonal_trough",
      "zero_start_prop", "zero_end_prop", "nonzero_interval_mean", "nonzero_cv2"};
  return n;
}

std::vector<double> FeatureVector::values() const {
  return {trend_strength, seasonal_strength, spikiness, linearity, curvature,
          e_acf1, e_acf10, x_acf1, x_acf10,
          diff1_acf1, diff1_acf10, diff2_acf1, diff2_acf10, season_acf1,
          x_pacf5, diff1_pacf5, diff2_pacf5, season_pacf,
          entropy,
          box_pierce_stat, box_pierce_pval, ljung_box_stat, ljung_box_pval,
          kpss_stat, kpss_pval,
          ndiffs, nsdiffs,
          stability, lumpiness,
          max_level_shift, time_level_shift, max_var_shift, time_var_shift,
          crossing_points, flat_spots,
          seasonal_peak, seasonal_trough,
          zero_start_prop, zero_end_prop, nonzero_interval_mean, nonzero_cv2};
}

double FeatureVector::at(const std::string &name) const {
  const auto &ns = names();
  auto vals = values();
  for (size_t i = 0; i < ns.size(); ++i)
    if (ns[i] == name) return vals[i];
  throw DataError("unknown feature '" + name + "'");
}

FeatureVector compute_features(const Eigen::VectorXd &y, int m) {
  const Eigen::Index n = y.size();
  if (n < 3) throw DataError("compute_features: series too short");
  if (m < 1) throw DataError("compute_features: period must be >= 1");

  FeatureVector f;
  std::fill_n(reinterpret_cast<double *>(&f), sizeof(FeatureVector) / sizeof(double), kNaN);

  const bool constant = (y.maxCoeff() - y.minCoeff()) <= 0.0;
  const bool seasonal = m > 1 && n >= 3 * m;

  // Decomposition-based block.
  int dec_period = seasonal ? m : 1;
  if (n >= 2 * dec_period + 1) {
    auto d = stats::classical_decompose(y, dec_period);
    f.trend_strength = constant ? 0.0 : stats::trend_strength(d);
    if (seasonal) f.seasonal_strength = constant ? 0.0 : stats::seasonal_strength(d);

    Eigen::VectorXd rem = finite_only(d.remainder);
    if (rem.size() >= 3) {
      // Leave-one-out variance spread of the remainder.
      double rm = rem.mean();
      double total = (rem.array() - rm).square().sum();
      Eigen::Index k = rem.size();
      Eigen::VectorXd loo(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        double ss = total - (rem(i) - rm) * (rem(i) - rm) * k / static_cast<double>(k - 1);
        loo(i) = std::max(0.0, ss) / static_cast<double>(k - 2);
      }
      f.spikiness = stats::variance(loo);
      f.e_acf1 = acf_at(rem, 1);
      f.e_acf10 = acf10_sumsq(rem);
    }
    poly_trend_coefs(d.trend, f.linearity, f.curvature);
    if (seasonal) {
      Eigen::Index peak = 0, trough = 0;
      Eigen::VectorXd idx = d.seasonal.head(m);
      idx.maxCoeff(&peak);
      idx.minCoeff(&trough);
      f.seasonal_peak = static_cast<double>(peak + 1);
      f.seasonal_trough = static_cast<double>(trough + 1);
    }
  }

  if (!constant) {
    f.x_acf1 = acf_at(y, 1);
    f.x_acf10 = acf10_sumsq(y);
    Eigen::VectorXd d1 = stats::diff(y, 1);
    Eigen::VectorXd d2 = stats::diff(d1, 1);
    f.diff1_acf1 = acf_at(d1, 1);
    f.diff1_acf10 = acf10_sumsq(d1);
    f.diff2_acf1 = acf_at(d2, 1);
    f.diff2_acf10 = acf10_sumsq(d2);
    f.x_pacf5 = pacf5_sumsq(y);
    f.diff1_pacf5 = pacf5_sumsq(d1);
    f.diff2_pacf5 = pacf5_sumsq(d2);
    if (seasonal) {
      f.season_acf1 = acf_at(y, m);
      if (n > m + 1) {
        Eigen::VectorXd p = stats::pacf(y, m);
        f.season_pacf = p.allFinite() ? p(m - 1) : kNaN;
      }
    }
    f.entropy = stats::spectral_entropy(y);
    auto bp = stats::box_pierce(y, 10);
    f.box_pierce_stat = bp.stat;
    f.box_pierce_pval = bp.pvalue;
    auto lb = stats::ljung_box(y, 10);
    f.ljung_box_stat = lb.stat;
    f.ljung_box_pval = lb.pvalue;
  } else {
    f.entropy = 0.0;
  }

  f.kpss_stat = stats::kpss_level_stat(y);
  f.kpss_pval = stats::kpss_level_pvalue(f.kpss_stat);
  f.ndiffs = static_cast<double>(stats::ndiffs_kpss(y, 2));
  if (seasonal) {
    auto d = stats::classical_decompose(y, m);
    f.nsdiffs = constant ? 0.0 : (stats::seasonal_strength(d) >= 0.64 ? 1.0 : 0.0);
  }

  if (n / m >= 2) {
    f.stability = constant ? 0.0 : features::stability(y, m);
    f.lumpiness = constant ? 0.0 : features::lumpiness(y, m);
  }
  auto ls = max_shift(y, m, false);
  f.max_level_shift = ls.size;
  f.time_level_shift = ls.index;
  auto vs = max_shift(y, m, true);
  f.max_var_shift = vs.size;
  f.time_var_shift = vs.index;

  f.crossing_points = static_cast<double>(crossing_points(y));
  f.flat_spots = static_cast<double>(flat_spots(y));

  // Count-data block.
  Eigen::Index lead = 0;
  while (lead < n && y(lead) == 0.0) ++lead;
  Eigen::Index trail = 0;
  while (trail < n && y(n - 1 - trail) == 0.0) ++trail;
  f.zero_start_prop = static_cast<double>(lead) / static_cast<double>(n);
  f.zero_end_prop = static_cast<double>(trail) / static_cast<double>(n);

  std::vector<Eigen::Index> nz;
  for (Eigen::Index t = 0; t < n; ++t)
    if (y(t) != 0.0) nz.push_back(t);
  if (nz.size() >= 2) {
    double gap = 0.0;
    for (size_t i = 1; i < nz.size(); ++i) gap += static_cast<double>(nz[i] - nz[i - 1]);
    f.nonzero_interval_mean = gap / static_cast<double>(nz.size() - 1);
    Eigen::VectorXd vals(static_cast<Eigen::Index>(nz.size()));
    for (size_t i = 0; i < nz.size(); ++i) vals(static_cast<Eigen::Index>(i)) = y(nz[i]);
    double mu = vals.mean();
    if (std::abs(mu) > 1e-300) f.nonzero_cv2 = stats::variance(vals) / (mu * mu);
  }
  return f;
}

}  // namespace hts::features
