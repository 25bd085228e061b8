#include "hts/ets.hpp"

#include <cmath>
#include <limits>

#include "hts/errors.hpp"
#include "hts/optim.hpp"
#include "hts/stats.hpp"

namespace hts::ets {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_trend(const CandidateSpec &s) { return s.trend != TrendType::None; }
bool is_damped(const CandidateSpec &s) { return s.trend == TrendType::AdditiveDamped; }
bool has_seasonal(const CandidateSpec &s) { return s.seasonal != SeasonalType::None; }

// One-step-ahead mean from the state at t-1.
double one_step_mean(const CandidateSpec &spec, double phi, const State &st, int m) {
  double q = st.level;
  if (spec.trend == TrendType::Additive) q += st.trend;
  else if (spec.trend == TrendType::AdditiveDamped) q += phi * st.trend;
  if (spec.seasonal == SeasonalType::Additive) return q + st.seasonal(m - 1);
  if (spec.seasonal == SeasonalType::Multiplicative) return q * st.seasonal(m - 1);
  return q;
}

int free_param_count(const CandidateSpec &spec, int m) {
  int n = 1;  // alpha
  if (has_trend(spec)) ++n;
  if (has_seasonal(spec)) ++n;
  if (is_damped(spec)) ++n;
  ++n;  // level
  if (has_trend(spec)) ++n;
  if (has_seasonal(spec)) n += m - 1;
  return n;
}
}  // namespace

std::string CandidateSpec::tag() const {
  auto e = error == ErrorType::Additive ? "A" : "M";
  const char *t = trend == TrendType::None ? "N" : (trend == TrendType::Additive ? "A" : "Ad");
  const char *s = seasonal == SeasonalType::None
                      ? "N"
                      : (seasonal == SeasonalType::Additive ? "A" : "M");
  return std::string("ETS(") + e + "," + t + "," + s + ")";
}

std::vector<CandidateSpec> default_candidates(const Eigen::VectorXd &train, int m) {
  bool positive = train.minCoeff() > 0.0;
  bool seasonal_ok = m > 1 && train.size() >= 2 * m + 4;
  std::vector<CandidateSpec> out;
  for (ErrorType e : {ErrorType::Additive, ErrorType::Multiplicative}) {
    if (e == ErrorType::Multiplicative && !positive) continue;
    for (TrendType t : {TrendType::None, TrendType::Additive, TrendType::AdditiveDamped}) {
      for (SeasonalType s :
           {SeasonalType::None, SeasonalType::Additive, SeasonalType::Multiplicative}) {
        if (s == SeasonalType::Multiplicative && !positive) continue;
        if (s != SeasonalType::None && !seasonal_ok) continue;
        out.push_back({e, t, s});
      }
    }
  }
  return out;
}

FilterResult filter(const CandidateSpec &spec, const Params &params, const State &init,
                    const Eigen::VectorXd &y, int m) {
  const Eigen::Index n = y.size();
  FilterResult r;
  r.fitted = Eigen::VectorXd::Constant(n, kNaN);
  r.residuals = Eigen::VectorXd::Constant(n, kNaN);

  const bool mult_err = spec.error == ErrorType::Multiplicative;
  const double phi = is_damped(spec) ? params.phi : 1.0;
  State st = init;
  if (!has_seasonal(spec)) st.seasonal = Eigen::VectorXd::Zero(std::max(m, 1));

  double sse = 0.0, log_f = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    double mu = one_step_mean(spec, phi, st, m);
    if (!std::isfinite(mu)) return r;
    if (mult_err && mu <= 1e-10) return r;  // likelihood undefined
    double e = mult_err ? (y(t) - mu) / mu : y(t) - mu;
    r.fitted(t) = mu;
    r.residuals(t) = y(t) - mu;
    sse += e * e;
    log_f += std::log(std::abs(mu) > 1e-300 ? std::abs(mu) : 1e-300);

    // State update in error-correction form; the same equations serve both
    // error types because they act on the observation directly.
    double q = st.level;
    double phib = 0.0;
    if (has_trend(spec)) {
      phib = phi * st.trend;
      q += phib;
    }
    double p;
    if (spec.seasonal == SeasonalType::Additive) p = y(t) - st.seasonal(m - 1);
    else if (spec.seasonal == SeasonalType::Multiplicative) {
      if (std::abs(st.seasonal(m - 1)) < 1e-10) return r;
      p = y(t) / st.seasonal(m - 1);
    } else p = y(t);

    double new_level = q + params.alpha * (p - q);
    if (has_trend(spec)) st.trend = phib + params.beta * (p - q);
    if (has_seasonal(spec)) {
      double target;
      if (spec.seasonal == SeasonalType::Additive) target = y(t) - q;
      else {
        if (std::abs(q) < 1e-10) return r;
        target = y(t) / q;
      }
      double s_new = st.seasonal(m - 1) + params.gamma * (target - st.seasonal(m - 1));
      for (int j = m - 1; j > 0; --j) st.seasonal(j) = st.seasonal(j - 1);
      st.seasonal(0) = s_new;
    }
    st.level = new_level;
    if (!std::isfinite(st.level) || std::abs(st.level) > 1e12) return r;
  }

  if (sse <= 0.0) sse = 1e-300;
  r.loglik = static_cast<double>(n) * std::log(sse);
  if (mult_err) r.loglik += 2.0 * log_f;
  r.final_state = st;
  r.ok = true;
  return r;
}

Eigen::VectorXd point_forecast(const CandidateSpec &spec, const Params &params,
                               const State &state, int m, int h) {
  Eigen::VectorXd out(h);
  const double phi = is_damped(spec) ? params.phi : 1.0;
  double phistar = has_trend(spec) ? phi : 0.0;
  for (int i = 0; i < h; ++i) {
    double f = state.level;
    if (has_trend(spec)) f += phistar * state.trend;
    if (has_seasonal(spec)) {
      int j = (m - 1 - i) % m;
      if (j < 0) j += m;
      if (spec.seasonal == SeasonalType::Additive) f += state.seasonal(j);
      else f *= state.seasonal(j);
    }
    out(i) = f;
    if (has_trend(spec)) {
      if (std::abs(phi - 1.0) < 1e-12) phistar += 1.0;
      else phistar += std::pow(phi, i + 2);
    }
  }
  return out;
}

namespace {

// Heuristic initial state: seasonal indices from a moving-average detrend,
// level and trend from a linear fit of the seasonally adjusted head.
State heuristic_state(const CandidateSpec &spec, const Eigen::VectorXd &y, int m) {
  State st;
  const Eigen::Index n = y.size();
  st.seasonal = Eigen::VectorXd::Zero(std::max(m, 1));

  Eigen::VectorXd adjusted = y;
  if (has_seasonal(spec)) {
    auto d = stats::classical_decompose(y, m);
    if (spec.seasonal == SeasonalType::Additive) {
      for (int j = 0; j < m; ++j) st.seasonal(j) = 0.0;
      // d.seasonal repeats the zero-sum indices; state order is most recent
      // first and the pre-sample state s_0 sits at position (m-1).
      for (int j = 0; j < m; ++j) {
        // index of season preceding the sample: s_{-j} corresponds to period
        // ((-1 - j) mod m) of the decomposition.
        int per = ((-1 - j) % m + m) % m;
        st.seasonal(j) = d.seasonal(per);
      }
      adjusted = y - d.seasonal;
    } else {
      Eigen::VectorXd ratio_idx(m);
      double base = y.mean();
      if (base <= 0) base = 1.0;
      for (int per = 0; per < m; ++per)
        ratio_idx(per) = std::max(0.05, 1.0 + d.seasonal(per) / base);
      ratio_idx *= static_cast<double>(m) / ratio_idx.sum();
      for (int j = 0; j < m; ++j) {
        int per = ((-1 - j) % m + m) % m;
        st.seasonal(j) = ratio_idx(per);
      }
      adjusted.resize(n);
      for (Eigen::Index t = 0; t < n; ++t) adjusted(t) = y(t) / ratio_idx(t % m);
    }
  }

  Eigen::Index head = std::min<Eigen::Index>(n, std::max(10, 2 * m));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Eigen::Index t = 0; t < head; ++t) {
    sx += static_cast<double>(t);
    sy += adjusted(t);
    sxx += static_cast<double>(t) * static_cast<double>(t);
    sxy += static_cast<double>(t) * adjusted(t);
  }
  double denom = head * sxx - sx * sx;
  double slope = std::abs(denom) > 1e-12 ? (head * sxy - sx * sy) / denom : 0.0;
  double intercept = (sy - slope * sx) / static_cast<double>(head);
  st.level = intercept;
  st.trend = has_trend(spec) ? slope : 0.0;
  if (spec.error == ErrorType::Multiplicative && st.level <= 0.0)
    st.level = std::max(1e-3, y.mean());
  return st;
}

struct PackedSpec {
  CandidateSpec spec;
  int m = 1;
  int n_smooth = 0;
};

Eigen::VectorXd pack(const PackedSpec &ps, const Params &pr, const State &st) {
  int m = ps.m;
  int dim = free_param_count(ps.spec, has_seasonal(ps.spec) ? m : 1);
  Eigen::VectorXd x(dim);
  int i = 0;
  x(i++) = pr.alpha;
  if (has_trend(ps.spec)) x(i++) = pr.beta;
  if (has_seasonal(ps.spec)) x(i++) = pr.gamma;
  if (is_damped(ps.spec)) x(i++) = pr.phi;
  x(i++) = st.level;
  if (has_trend(ps.spec)) x(i++) = st.trend;
  if (has_seasonal(ps.spec))
    for (int j = 0; j < m - 1; ++j) x(i++) = st.seasonal(j);
  return x;
}

bool unpack(const PackedSpec &ps, const Eigen::VectorXd &x, Params &pr, State &st) {
  int m = ps.m;
  int i = 0;
  pr.alpha = x(i++);
  pr.beta = has_trend(ps.spec) ? x(i++) : 0.0;
  pr.gamma = has_seasonal(ps.spec) ? x(i++) : 0.0;
  pr.phi = is_damped(ps.spec) ? x(i++) : 1.0;
  if (pr.alpha <= 1e-4 || pr.alpha >= 0.9999) return false;
  if (has_trend(ps.spec) && (pr.beta <= 1e-4 || pr.beta >= pr.alpha)) return false;
  if (has_seasonal(ps.spec) && (pr.gamma <= 1e-4 || pr.gamma >= 1.0 - pr.alpha)) return false;
  if (is_damped(ps.spec) && (pr.phi < 0.8 || pr.phi > 0.98)) return false;

  st.level = x(i++);
  st.trend = has_trend(ps.spec) ? x(i++) : 0.0;
  st.seasonal = Eigen::VectorXd::Zero(std::max(m, 1));
  if (has_seasonal(ps.spec)) {
    double sum = 0.0;
    for (int j = 0; j < m - 1; ++j) {
      st.seasonal(j) = x(i++);
      sum += st.seasonal(j);
    }
    if (ps.spec.seasonal == SeasonalType::Additive) {
      st.seasonal(m - 1) = -sum;
    } else {
      st.seasonal(m - 1) = static_cast<double>(m) - sum;  // keeps the mean at 1
      for (int j = 0; j < m; ++j)
        if (st.seasonal(j) <= 1e-4) return false;
    }
  }
  return true;
}

// Shifts the seasonal constraint back onto the final state without changing
// any forecast: additive seasons re-centered into the level, multiplicative
// ones rescaled through level and trend.
void renormalize(const CandidateSpec &spec, State &st, int m) {
  if (!has_seasonal(spec) || m < 1) return;
  if (spec.seasonal == SeasonalType::Additive) {
    double c = st.seasonal.mean();
    st.seasonal.array() -= c;
    st.level += c;
  } else {
    double c = st.seasonal.mean();
    if (c > 1e-10) {
      st.seasonal /= c;
      st.level *= c;
      st.trend *= c;
    }
  }
}

}  // namespace

EtsModel fit(const Eigen::VectorXd &train, int m) {
  return fit(train, m, default_candidates(train, m));
}

EtsModel fit(const Eigen::VectorXd &train, int m,
             const std::vector<CandidateSpec> &candidates) {
  const Eigen::Index n = train.size();
  if (n < 3) throw DataError("ets: need at least 3 observations");
  if (candidates.empty()) throw DataError("ets: empty candidate set");

  EtsModel best;
  best.aicc = kInf;
  bool found = false;
  int best_np = 0;
  int best_rank = 0;

  int rank = 0;
  for (const auto &spec : candidates) {
    ++rank;
    const int mm = has_seasonal(spec) ? m : 1;
    PackedSpec ps{spec, mm, 0};

    Params p0;
    p0.alpha = 0.3;
    p0.beta = has_trend(spec) ? 0.05 : 0.0;
    p0.gamma = has_seasonal(spec) ? 0.1 : 0.0;
    p0.phi = is_damped(spec) ? 0.9 : 1.0;
    State s0 = heuristic_state(spec, train, mm);

    auto objective = [&](const Eigen::VectorXd &x) -> double {
      Params pr;
      State st;
      if (!unpack(ps, x, pr, st)) return kInf;
      auto fr = filter(spec, pr, st, train, mm);
      return fr.ok ? fr.loglik : kInf;
    };

    Eigen::VectorXd x0 = pack(ps, p0, s0);
    if (!std::isfinite(objective(x0))) continue;
    int dim = static_cast<int>(x0.size());
    auto res = optim::nelder_mead(objective, x0, 0.1, 400 * dim, 1e-10);
    if (!std::isfinite(res.value)) continue;

    Params pr;
    State st;
    if (!unpack(ps, res.x, pr, st)) continue;
    auto fr = filter(spec, pr, st, train, mm);
    if (!fr.ok) continue;

    int np = free_param_count(spec, mm) + 1;  // + sigma^2
    double aic = fr.loglik + 2.0 * np;
    double aicc = n > np + 1
                      ? aic + 2.0 * np * (np + 1.0) / static_cast<double>(n - np - 1)
                      : kInf;
    if (!std::isfinite(aicc)) continue;

    bool better = !found || aicc < best.aicc - 1e-9 ||
                  (std::abs(aicc - best.aicc) <= 1e-9 &&
                   (np < best_np || (np == best_np && rank < best_rank)));
    if (!better) continue;

    found = true;
    best_np = np;
    best_rank = rank;
    best.spec = spec;
    best.params = pr;
    best.initial_state = st;
    best.final_state = fr.final_state;
    renormalize(spec, best.final_state, mm);
    best.period = mm;
    best.aicc = aicc;
    double sse = 0.0;
    int cnt = 0;
    for (Eigen::Index t = 0; t < n; ++t)
      if (std::isfinite(fr.residuals(t))) { sse += fr.residuals(t) * fr.residuals(t); ++cnt; }
    best.sigma2 = cnt ? sse / cnt : 0.0;
    best.fitted = fr.fitted;
    best.residuals = fr.residuals;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s aicc=%.4f alpha=%.4f", spec.tag().c_str(), aicc,
                  pr.alpha);
    best.meta = buf;
  }

  if (!found) throw NumericError("ets: no candidate produced a finite likelihood");
  return best;
}

ForecastBundle forecast(const EtsModel &model, int h) {
  if (h < 1) throw DataError("ets forecast: horizon must be >= 1");
  ForecastBundle b;
  b.method = "ets";
  b.point = point_forecast(model.spec, model.params, model.final_state, model.period, h);
  b.fitted = model.fitted;
  b.residuals = model.residuals;
  b.model_meta = model.meta;
  return b;
}

}  // namespace hts::ets
