#include "hts/stats.hpp"

#include <cmath>
#include <limits>

#include "hts/errors.hpp"

namespace hts::stats {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Regularized upper incomplete gamma Q(a, x) by series / continued fraction.
double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return kNaN;
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // P(a,x) series, then Q = 1 - P.
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    double lg = std::lgamma(a);
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  // Lentz continued fraction for Q(a,x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  double lg = std::lgamma(a);
  return std::exp(-x + a * std::log(x) - lg) * h;
}
}  // namespace

double mean(const Eigen::VectorXd &x) {
  if (x.size() == 0) return kNaN;
  return x.mean();
}

double variance(const Eigen::VectorXd &x) {
  if (x.size() < 2) return 0.0;
  double m = x.mean();
  return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

double mean_finite(const Eigen::VectorXd &x) {
  double s = 0.0;
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::isfinite(x(i))) { s += x(i); ++n; }
  return n ? s / static_cast<double>(n) : kNaN;
}

double variance_finite(const Eigen::VectorXd &x) {
  double m = mean_finite(x);
  if (!std::isfinite(m)) return kNaN;
  double s = 0.0;
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::isfinite(x(i))) { s += (x(i) - m) * (x(i) - m); ++n; }
  return n > 1 ? s / static_cast<double>(n - 1) : 0.0;
}

Eigen::VectorXd acf(const Eigen::VectorXd &x, int max_lag) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(max_lag);
  if (n < 2) return out;
  double m = x.mean();
  double denom = (x.array() - m).square().sum();
  if (denom <= 0.0) {
    out.setConstant(kNaN);
    return out;
  }
  for (int k = 1; k <= max_lag; ++k) {
    double s = 0.0;
    for (Eigen::Index t = 0; t + k < n; ++t) s += (x(t) - m) * (x(t + k) - m);
    out(k - 1) = k < n ? s / denom : 0.0;
  }
  return out;
}

Eigen::VectorXd pacf(const Eigen::VectorXd &x, int max_lag) {
  Eigen::VectorXd rho = acf(x, max_lag);
  Eigen::VectorXd out(max_lag);
  if (!rho.allFinite()) {
    out.setConstant(kNaN);
    return out;
  }
  // Durbin-Levinson recursion.
  std::vector<double> phi_prev(max_lag + 1, 0.0), phi(max_lag + 1, 0.0);
  double v = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    double num = rho(k - 1);
    for (int j = 1; j < k; ++j) num -= phi_prev[j] * rho(k - 1 - j);
    double a = v > 1e-300 ? num / v : 0.0;
    phi[k] = a;
    for (int j = 1; j < k; ++j) phi[j] = phi_prev[j] - a * phi_prev[k - j];
    v *= (1.0 - a * a);
    out(k - 1) = a;
    phi_prev = phi;
  }
  return out;
}

Eigen::VectorXd diff(const Eigen::VectorXd &x, int lag) {
  if (lag < 1 || x.size() <= lag) return Eigen::VectorXd(0);
  return x.tail(x.size() - lag) - x.head(x.size() - lag);
}

double kpss_level_stat(const Eigen::VectorXd &x) {
  const Eigen::Index n = x.size();
  if (n < 3) return 0.0;
  Eigen::VectorXd e = x.array() - x.mean();
  Eigen::VectorXd s(n);
  double run = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) { run += e(t); s(t) = run; }
  double eta = s.squaredNorm();

  int l = static_cast<int>(std::trunc(4.0 * std::pow(n / 100.0, 0.25)));
  double lrv = e.squaredNorm() / static_cast<double>(n);
  for (int k = 1; k <= l; ++k) {
    double g = 0.0;
    for (Eigen::Index t = k; t < n; ++t) g += e(t) * e(t - k);
    g /= static_cast<double>(n);
    lrv += 2.0 * (1.0 - k / static_cast<double>(l + 1)) * g;
  }
  if (lrv <= 0.0) return 0.0;
  return eta / (static_cast<double>(n) * static_cast<double>(n) * lrv);
}

double kpss_level_pvalue(double stat) {
  // Level-stationarity critical values (10%, 5%, 2.5%, 1%).
  static const double crit[4] = {0.347, 0.463, 0.574, 0.739};
  static const double pval[4] = {0.10, 0.05, 0.025, 0.01};
  if (stat <= crit[0]) return pval[0];
  if (stat >= crit[3]) return pval[3];
  for (int i = 0; i < 3; ++i) {
    if (stat <= crit[i + 1]) {
      double w = (stat - crit[i]) / (crit[i + 1] - crit[i]);
      return pval[i] + w * (pval[i + 1] - pval[i]);
    }
  }
  return pval[3];
}

int ndiffs_kpss(const Eigen::VectorXd &x, int max_d) {
  Eigen::VectorXd cur = x;
  int d = 0;
  while (d < max_d && cur.size() >= 3) {
    if (kpss_level_stat(cur) < 0.463) break;
    cur = diff(cur, 1);
    ++d;
  }
  return d;
}

Decomposition classical_decompose(const Eigen::VectorXd &x, int period) {
  const Eigen::Index n = x.size();
  if (period < 1) throw DataError("decompose: period must be >= 1");
  if (n < 2 * period + 1) throw DataError("decompose: series too short for period");

  Decomposition d;
  d.trend = Eigen::VectorXd::Constant(n, kNaN);
  d.seasonal = Eigen::VectorXd::Zero(n);
  d.remainder = Eigen::VectorXd::Constant(n, kNaN);

  // Centered moving average.
  if (period == 1) {
    // Window of 3 keeps a usable local trend for the strength formulas.
    for (Eigen::Index t = 1; t + 1 < n; ++t) d.trend(t) = (x(t - 1) + x(t) + x(t + 1)) / 3.0;
  } else if (period % 2 == 1) {
    int half = period / 2;
    for (Eigen::Index t = half; t + half < n; ++t)
      d.trend(t) = x.segment(t - half, period).mean();
  } else {
    int half = period / 2;
    for (Eigen::Index t = half; t + half < n; ++t) {
      double s = 0.5 * x(t - half) + 0.5 * x(t + half);
      s += x.segment(t - half + 1, period - 1).sum();
      d.trend(t) = s / period;
    }
  }

  if (period > 1) {
    // Per-period means of the detrended interior, re-centered to sum zero.
    Eigen::VectorXd idx = Eigen::VectorXd::Zero(period);
    Eigen::VectorXi cnt = Eigen::VectorXi::Zero(period);
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!std::isfinite(d.trend(t))) continue;
      idx(t % period) += x(t) - d.trend(t);
      cnt(t % period) += 1;
    }
    for (int j = 0; j < period; ++j) idx(j) = cnt(j) ? idx(j) / cnt(j) : 0.0;
    idx.array() -= idx.mean();
    for (Eigen::Index t = 0; t < n; ++t) d.seasonal(t) = idx(t % period);
  }

  for (Eigen::Index t = 0; t < n; ++t)
    if (std::isfinite(d.trend(t))) d.remainder(t) = x(t) - d.trend(t) - d.seasonal(t);
  return d;
}

namespace {
double strength(const Eigen::VectorXd &rem, const Eigen::VectorXd &other) {
  Eigen::VectorXd sum(rem.size());
  for (Eigen::Index i = 0; i < rem.size(); ++i) sum(i) = rem(i) + other(i);
  double vr = variance_finite(rem);
  double vs = variance_finite(sum);
  if (!(vs > 0.0)) return 0.0;
  return std::max(0.0, 1.0 - vr / vs);
}
}  // namespace

double trend_strength(const Decomposition &d) { return strength(d.remainder, d.trend); }

double seasonal_strength(const Decomposition &d) { return strength(d.remainder, d.seasonal); }

double spectral_entropy(const Eigen::VectorXd &x) {
  const Eigen::Index n = x.size();
  if (n < 4) return kNaN;
  Eigen::VectorXd e = x.array() - x.mean();
  const Eigen::Index nf = n / 2;
  Eigen::VectorXd pgram(nf);
  double total = 0.0;
  for (Eigen::Index j = 1; j <= nf; ++j) {
    double re = 0.0, im = 0.0;
    double w = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
    for (Eigen::Index t = 0; t < n; ++t) {
      re += e(t) * std::cos(w * static_cast<double>(t));
      im += e(t) * std::sin(w * static_cast<double>(t));
    }
    pgram(j - 1) = (re * re + im * im) / static_cast<double>(n);
    total += pgram(j - 1);
  }
  if (total <= 0.0) return 0.0;  // constant series carries no spectral information
  double h = 0.0;
  for (Eigen::Index j = 0; j < nf; ++j) {
    double p = pgram(j) / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h / std::log(static_cast<double>(nf));
}

double chi_squared_sf(double stat, double df) {
  if (stat <= 0.0) return 1.0;
  return gamma_q(df / 2.0, stat / 2.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Portmanteau box_pierce(const Eigen::VectorXd &x, int lag) {
  const Eigen::Index n = x.size();
  Portmanteau r;
  if (n <= lag + 1) return r;
  Eigen::VectorXd rho = acf(x, lag);
  if (!rho.allFinite()) return r;
  r.stat = static_cast<double>(n) * rho.squaredNorm();
  r.pvalue = chi_squared_sf(r.stat, lag);
  return r;
}

Portmanteau ljung_box(const Eigen::VectorXd &x, int lag) {
  const Eigen::Index n = x.size();
  Portmanteau r;
  if (n <= lag + 1) return r;
  Eigen::VectorXd rho = acf(x, lag);
  if (!rho.allFinite()) return r;
  double s = 0.0;
  for (int k = 1; k <= lag; ++k) s += rho(k - 1) * rho(k - 1) / static_cast<double>(n - k);
  r.stat = static_cast<double>(n) * (n + 2.0) * s;
  r.pvalue = chi_squared_sf(r.stat, lag);
  return r;
}

uint64_t Rng::next() {
  // xorshift64*
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1Dull;
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do { u1 = uniform(); } while (u1 <= 1e-300);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

int Rng::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace hts::stats
