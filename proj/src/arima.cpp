#include "hts/arima.hpp"

#include <cmath>
#include <limits>

#include "hts/errors.hpp"
#include "hts/optim.hpp"
#include "hts/stats.hpp"

namespace hts::arima {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd difference(const Eigen::VectorXd &y, int d, int D, int m) {
  Eigen::VectorXd w = y;
  for (int i = 0; i < D; ++i) w = stats::diff(w, m);
  for (int i = 0; i < d; ++i) w = stats::diff(w, 1);
  return w;
}

// Expands (1 - phi(B)) (1 - sphi(B^m)) into a single AR polynomial; the MA
// side uses the same convolution with flipped signs handled by the caller.
Eigen::VectorXd expand_poly(const Eigen::VectorXd &coef, const Eigen::VectorXd &scoef,
                            int m, double cross_sign) {
  const int p = static_cast<int>(coef.size());
  const int P = static_cast<int>(scoef.size());
  Eigen::VectorXd full = Eigen::VectorXd::Zero(p + m * P);
  for (int i = 0; i < p; ++i) full(i) = coef(i);
  for (int j = 0; j < P; ++j) {
    full((j + 1) * m - 1) += scoef(j);
    for (int i = 0; i < p; ++i) full((j + 1) * m + i) += cross_sign * coef(i) * scoef(j);
  }
  return full;
}

struct CssResult {
  bool ok = false;
  double sigma2 = 0.0;
  int n_used = 0;
  Eigen::VectorXd resid;  // aligned with w; NaN during conditioning
};

CssResult css_residuals(const Eigen::VectorXd &w, const Eigen::VectorXd &ar,
                        const Eigen::VectorXd &ma, double c, int ncond) {
  const Eigen::Index n = w.size();
  const int np = static_cast<int>(ar.size());
  const int nq = static_cast<int>(ma.size());
  CssResult r;
  r.resid = Eigen::VectorXd::Constant(n, kNaN);
  if (n <= ncond) return r;

  double ssq = 0.0;
  for (Eigen::Index l = ncond; l < n; ++l) {
    double tmp = w(l) - c;
    for (int i = 0; i < np; ++i) tmp -= ar(i) * (w(l - i - 1) - c);
    int usable = static_cast<int>(l) - ncond;
    for (int j = 0; j < std::min(usable, nq); ++j) tmp -= ma(j) * r.resid(l - j - 1);
    if (!std::isfinite(tmp)) return r;
    r.resid(l) = tmp;
    ssq += tmp * tmp;
    ++r.n_used;
  }
  if (r.n_used == 0 || !std::isfinite(ssq)) return r;
  r.sigma2 = ssq / r.n_used;
  r.ok = true;
  return r;
}

struct Packed {
  Orders orders;
  bool has_intercept = false;

  int dim() const { return orders.n_coef() + (has_intercept ? 1 : 0); }

  void unpack(const Eigen::VectorXd &x, Eigen::VectorXd &phi, Eigen::VectorXd &theta,
              Eigen::VectorXd &sphi, Eigen::VectorXd &stheta, double &c) const {
    int i = 0;
    phi = x.segment(i, orders.p); i += orders.p;
    theta = x.segment(i, orders.q); i += orders.q;
    sphi = x.segment(i, orders.P); i += orders.P;
    stheta = x.segment(i, orders.Q); i += orders.Q;
    c = has_intercept ? x(i) : 0.0;
  }
};

double gaussian_neg2ll(double sigma2, int n) {
  return n * (std::log(2.0 * M_PI * sigma2) + 1.0);
}

}  // namespace

std::string Orders::tag() const {
  char buf[72];
  if (P || D || Q)
    std::snprintf(buf, sizeof(buf), "ARIMA(%d,%d,%d)(%d,%d,%d)[%d]", p, d, q, P, D, Q, period);
  else
    std::snprintf(buf, sizeof(buf), "ARIMA(%d,%d,%d)", p, d, q);
  return buf;
}

bool roots_outside_unit_circle(const Eigen::VectorXd &coef) {
  // Companion-matrix eigenvalues are the reciprocal roots.
  int k = static_cast<int>(coef.size());
  while (k > 0 && std::abs(coef(k - 1)) < 1e-10) --k;
  if (k == 0) return true;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) comp(0, i) = coef(i);
  for (int i = 1; i < k; ++i) comp(i, i - 1) = 1.0;
  Eigen::VectorXcd ev = comp.eigenvalues();
  for (int i = 0; i < k; ++i)
    if (std::abs(ev(i)) > 1.0 / 1.001) return false;
  return true;
}

ArimaModel fit_fixed(const Eigen::VectorXd &train, const Orders &orders) {
  const int m = std::max(orders.period, 1);
  if (orders.p < 0 || orders.q < 0 || orders.P < 0 || orders.Q < 0 || orders.d < 0 ||
      orders.D < 0)
    throw DataError("arima: negative order");
  if ((orders.P || orders.Q || orders.D) && m < 2)
    throw DataError("arima: seasonal orders need a seasonal period");

  Eigen::VectorXd w = difference(train, orders.d, orders.D, m);
  const int ncond = orders.p + m * orders.P;
  Packed packed{orders, orders.d + orders.D == 0};
  const int n_eff = static_cast<int>(w.size()) - ncond;
  if (n_eff < packed.dim() + 2)
    throw DataError("arima: series too short for orders " + orders.tag());

  auto objective = [&](const Eigen::VectorXd &x) -> double {
    Eigen::VectorXd phi, theta, sphi, stheta;
    double c;
    packed.unpack(x, phi, theta, sphi, stheta, c);
    Eigen::VectorXd ar = expand_poly(phi, sphi, m, -1.0);
    Eigen::VectorXd ma = expand_poly(theta, stheta, m, +1.0);
    auto r = css_residuals(w, ar, ma, c, ncond);
    if (!r.ok || r.sigma2 <= 0.0) return kInf;
    return 0.5 * std::log(r.sigma2);
  };

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(packed.dim());
  if (packed.has_intercept) x0(packed.dim() - 1) = w.mean();
  optim::Result opt;
  if (packed.dim() == 0) {
    opt.x = x0;
    opt.value = objective(x0);
  } else {
    opt = optim::nelder_mead(objective, x0, 0.1, 250 * packed.dim(), 1e-9);
  }
  if (!std::isfinite(opt.value)) throw NumericError("arima: CSS did not converge for " + orders.tag());

  ArimaModel model;
  model.orders = orders;
  model.orders.period = m;
  model.has_intercept = packed.has_intercept;
  packed.unpack(opt.x, model.phi, model.theta, model.sphi, model.stheta, model.intercept);

  if (!roots_outside_unit_circle(model.phi) || !roots_outside_unit_circle(model.sphi))
    throw NumericError("arima: explosive AR fit for " + orders.tag());
  Eigen::VectorXd neg_theta = -model.theta, neg_stheta = -model.stheta;
  if (!roots_outside_unit_circle(neg_theta) || !roots_outside_unit_circle(neg_stheta))
    throw NumericError("arima: non-invertible MA fit for " + orders.tag());

  Eigen::VectorXd ar = expand_poly(model.phi, model.sphi, m, -1.0);
  Eigen::VectorXd ma = expand_poly(model.theta, model.stheta, m, +1.0);
  auto css = css_residuals(w, ar, ma, model.intercept, ncond);
  if (!css.ok) throw NumericError("arima: residual pass failed for " + orders.tag());

  model.sigma2 = css.sigma2;
  int np = packed.dim() + 1;  // + sigma^2
  double neg2ll = gaussian_neg2ll(css.sigma2, css.n_used);
  model.aicc = css.n_used > np + 1
                   ? neg2ll + 2.0 * np +
                         2.0 * np * (np + 1.0) / static_cast<double>(css.n_used - np - 1)
                   : kInf;

  const Eigen::Index offset = train.size() - w.size();
  model.fitted = Eigen::VectorXd::Constant(train.size(), kNaN);
  model.residuals = Eigen::VectorXd::Constant(train.size(), kNaN);
  for (Eigen::Index l = 0; l < w.size(); ++l) {
    if (!std::isfinite(css.resid(l))) continue;
    model.residuals(offset + l) = css.resid(l);
    model.fitted(offset + l) = train(offset + l) - css.resid(l);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s aicc=%.4f sigma2=%.6g", model.orders.tag().c_str(),
                model.aicc, model.sigma2);
  model.meta = buf;
  return model;
}

ArimaModel fit(const Eigen::VectorXd &train, int m, const MaxOrders &max_orders) {
  if (train.size() < 20) throw DataError("arima: need at least 20 observations");
  m = std::max(m, 1);

  // Seasonal differencing first, then the KPSS ladder on what remains.
  int D = 0;
  if (m > 1 && max_orders.D > 0 && train.size() >= 2 * m + 1) {
    auto dec = stats::classical_decompose(train, m);
    if (stats::seasonal_strength(dec) >= 0.64) D = 1;
  }
  Eigen::VectorXd after_seasonal = difference(train, 0, D, m);
  int d = stats::ndiffs_kpss(after_seasonal, max_orders.d);

  ArimaModel best;
  bool found = false;
  double best_aicc = kInf;
  int best_np = -1;

  const int Pmax = m > 1 ? max_orders.P : 0;
  const int Qmax = m > 1 ? max_orders.Q : 0;
  // Candidates are compared on a common conditioning window; otherwise higher
  // AR orders are scored on fewer residuals and win by losing observations.
  const Eigen::Index common_start = d + m * D + max_orders.p + m * Pmax;

  for (int p = 0; p <= max_orders.p; ++p)
    for (int q = 0; q <= max_orders.q; ++q)
      for (int P = 0; P <= Pmax; ++P)
        for (int Q = 0; Q <= Qmax; ++Q) {
          Orders o{p, d, q, P, D, Q, m};
          ArimaModel cand;
          try {
            cand = fit_fixed(train, o);
          } catch (const Error &) {
            continue;  // short, explosive or non-invertible candidates drop out
          }
          int np = o.n_coef() + (cand.has_intercept ? 1 : 0) + 1;
          double sse = 0.0;
          int count = 0;
          for (Eigen::Index t = common_start; t < train.size(); ++t) {
            if (!std::isfinite(cand.residuals(t))) continue;
            sse += cand.residuals(t) * cand.residuals(t);
            ++count;
          }
          if (count < np + 2 || sse <= 0.0) continue;
          double sigma2 = sse / count;
          double aicc = gaussian_neg2ll(sigma2, count) + 2.0 * np +
                        2.0 * np * (np + 1.0) / static_cast<double>(count - np - 1);
          if (!std::isfinite(aicc)) continue;
          bool better = !found || aicc < best_aicc - 1e-9 ||
                        (std::abs(aicc - best_aicc) <= 1e-9 && np < best_np);
          if (better) {
            cand.aicc = aicc;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%s aicc=%.4f sigma2=%.6g",
                          cand.orders.tag().c_str(), aicc, cand.sigma2);
            cand.meta = buf;
            best = std::move(cand);
            best_aicc = aicc;
            best_np = np;
            found = true;
          }
        }
  if (!found) throw NumericError("arima: no admissible model in the search grid");
  return best;
}

ForecastBundle forecast(const ArimaModel &model, const Eigen::VectorXd &train, int h) {
  if (h < 1) throw DataError("arima forecast: horizon must be >= 1");
  const int m = std::max(model.orders.period, 1);
  const int d = model.orders.d, D = model.orders.D;

  Eigen::VectorXd w = difference(train, d, D, m);
  Eigen::VectorXd ar = expand_poly(model.phi, model.sphi, m, -1.0);
  Eigen::VectorXd ma = expand_poly(model.theta, model.stheta, m, +1.0);
  const int ncond = model.orders.p + m * model.orders.P;
  auto css = css_residuals(w, ar, ma, model.intercept, ncond);

  const Eigen::Index nw = w.size();
  const int np = static_cast<int>(ar.size());
  const int nq = static_cast<int>(ma.size());

  // Forecast the differenced series with future errors at zero.
  std::vector<double> z(nw + h), e(nw + h, 0.0);
  for (Eigen::Index l = 0; l < nw; ++l) {
    z[l] = w(l) - model.intercept;
    if (css.ok && std::isfinite(css.resid(l))) e[l] = css.resid(l);
  }
  for (int j = 0; j < h; ++j) {
    Eigen::Index l = nw + j;
    double v = 0.0;
    for (int i = 0; i < np; ++i)
      if (l - i - 1 >= 0) v += ar(i) * z[l - i - 1];
    for (int k = 0; k < nq; ++k)
      if (l - k - 1 >= 0) v += ma(k) * e[l - k - 1];
    z[l] = v;
    e[l] = 0.0;
  }

  // Integrate back: first undo the regular differences, then the seasonal one.
  Eigen::VectorXd u = difference(train, 0, D, m);  // w = (1-B)^d u
  std::vector<double> uf(u.size() + h);
  for (Eigen::Index i = 0; i < u.size(); ++i) uf[i] = u(i);
  for (int j = 0; j < h; ++j) {
    Eigen::Index l = u.size() + j;
    double v = z[nw + j] + model.intercept;
    if (d == 1) v += uf[l - 1];
    else if (d == 2) v += 2.0 * uf[l - 1] - uf[l - 2];
    uf[l] = v;
  }
  std::vector<double> yf(train.size() + h);
  for (Eigen::Index i = 0; i < train.size(); ++i) yf[i] = train(i);
  for (int j = 0; j < h; ++j) {
    Eigen::Index l = train.size() + j;
    double v = uf[u.size() + j];
    if (D == 1) v += yf[l - m];
    yf[l] = v;
  }

  ForecastBundle b;
  b.method = "arm";
  b.point.resize(h);
  for (int j = 0; j < h; ++j) b.point(j) = yf[train.size() + j];
  b.fitted = model.fitted;
  b.residuals = model.residuals;
  b.model_meta = model.meta;
  return b;
}

}  // namespace hts::arima
