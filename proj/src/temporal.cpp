#include "hts/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hts/arima.hpp"
#include "hts/errors.hpp"
#include "hts/ets.hpp"
#include "hts/forecast.hpp"
#include "hts/frame.hpp"

namespace hts::temporal {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<int> default_factors(int m) {
  std::set<int, std::greater<int>> f;
  f.insert(1);
  f.insert(m);
  if (m % 2 == 0) { f.insert(2); f.insert(m / 2); }
  if (m % 4 == 0) { f.insert(4); f.insert(m / 4); }
  return {f.begin(), f.end()};
}

std::string granularity_tag(int factor, int m) {
  if (factor == 1) return "w";
  if (factor == m) return "a";
  if (m % 2 == 0 && factor == m / 2) return "sa";
  if (m % 4 == 0 && factor == m / 4) return "q";
  if (factor == 4) return "m4w";
  if (factor == 2) return "2w";
  return "k" + std::to_string(factor);
}

std::string granularity_label(int factor, int m) {
  std::string tag = granularity_tag(factor, m);
  if (tag == "w") return "Weekly";
  if (tag == "2w") return "Bi-Weekly";
  if (tag == "m4w") return "Monthly";
  if (tag == "q") return "Quarterly";
  if (tag == "sa") return "Semi-annual";
  if (tag == "a") return "Annual";
  return "Block-" + std::to_string(factor);
}

int factor_for_tag(const std::string &tag, int m) {
  int k = -1;
  if (tag == "w") k = 1;
  else if (tag == "2w") k = 2;
  else if (tag == "m4w") k = 4;
  else if (tag == "q") k = m % 4 == 0 ? m / 4 : -1;
  else if (tag == "sa") k = m % 2 == 0 ? m / 2 : -1;
  else if (tag == "a") k = m;
  else {
    try {
      k = std::stoi(tag[0] == 'k' ? tag.substr(1) : tag);
    } catch (...) {
      throw DataError("unknown granularity tag '" + tag + "'");
    }
  }
  if (k < 1 || m % k != 0)
    throw DataError("granularity '" + tag + "' does not divide the period " +
                    std::to_string(m));
  return k;
}

Eigen::Index TemporalHierarchy::level_offset(int factor) const {
  Eigen::Index off = 0;
  for (int k : factors) {
    if (k == factor) return off;
    off += base_period / k;
  }
  throw DataError("factor " + std::to_string(factor) + " not in hierarchy");
}

Eigen::Index TemporalHierarchy::level_size(int factor) const {
  if (factor < 1 || base_period % factor != 0)
    throw DataError("factor " + std::to_string(factor) + " not in hierarchy");
  return base_period / factor;
}

TemporalHierarchy build_temporal_smatrix(int m, const std::vector<int> &factors) {
  if (m < 1) throw DataError("temporal: period must be >= 1");
  if (factors.empty()) throw DataError("temporal: empty factor list");
  for (size_t i = 0; i + 1 < factors.size(); ++i)
    if (factors[i] <= factors[i + 1])
      throw DataError("temporal: factors must be strictly decreasing");
  for (int k : factors)
    if (k < 1 || m % k != 0)
      throw DataError("temporal: factor " + std::to_string(k) + " does not divide " +
                      std::to_string(m));
  if (factors.front() != m || factors.back() != 1)
    throw DataError("temporal: factors must include m and 1");

  TemporalHierarchy th;
  th.base_period = m;
  th.factors = factors;

  Eigen::Index rows = 0;
  for (int k : factors) rows += m / k;
  th.S.entries = Eigen::MatrixXd::Zero(rows, m);
  Eigen::Index r = 0;
  for (int k : factors) {
    std::string tag = granularity_tag(k, m);
    for (int j = 0; j < m / k; ++j, ++r) {
      th.S.entries.block(r, static_cast<Eigen::Index>(j) * k, 1, k).setOnes();
      std::string id = tag + "_" + std::to_string(j + 1);
      th.S.row_order.push_back(id);
      th.S.row_index[id] = r;
    }
  }
  return th;
}

Eigen::VectorXd ThiefResult::base_level(int factor) const {
  return base_stack.segment(hierarchy.level_offset(factor), hierarchy.level_size(factor));
}

Eigen::VectorXd ThiefResult::reconciled_level(int factor) const {
  return reconciled_stack.segment(hierarchy.level_offset(factor),
                                  hierarchy.level_size(factor));
}

namespace {

// Fits one base method at a single granularity, falling back to the mean
// method when the aggregated history is too short.
ForecastBundle fit_level(const Eigen::VectorXd &x, int period, int h,
                         const std::string &method, const ThiefOptions &opts,
                         int factor, std::vector<std::string> &notes) {
  auto fallback = [&](const std::string &why) {
    notes.push_back("factor " + std::to_string(factor) + ": " + method +
                    " fell back to avg (" + why + ")");
    return forecast_mean(x, h);
  };
  try {
    if (method == "avg") return forecast_mean(x, h);
    if (method == "nve") return forecast_naive(x, h);
    if (method == "snv") {
      if (x.size() < period) return fallback("shorter than one season");
      return forecast_snaive(x, h, period);
    }
    if (method == "ets") {
      if (x.size() < opts.ets_min_obs) return fallback("history too short");
      int ets_period = period <= opts.ets_max_seasonal_period ? period : 1;
      auto model = ets::fit(x, ets_period);
      return ets::forecast(model, h);
    }
    if (method == "arm") {
      if (x.size() < opts.arima_min_obs) return fallback("history too short");
      auto model = arima::fit(x, period, opts.max_orders);
      return arima::forecast(model, x, h);
    }
  } catch (const Error &e) {
    return fallback(e.what());
  }
  throw DataError("unknown base method '" + method + "'");
}

}  // namespace

ThiefResult thief_forecast(const Eigen::VectorXd &series, int m,
                           const std::string &base_method, const ThiefOptions &opts) {
  if (series.size() < 2 * m) throw DataError("thief: need at least two full cycles");

  ThiefResult res;
  res.hierarchy = build_temporal_smatrix(m, default_factors(m));
  const auto &factors = res.hierarchy.factors;
  const Eigen::Index rows = res.hierarchy.S.rows();

  res.base_stack = Eigen::VectorXd::Zero(rows);
  std::vector<Eigen::VectorXd> level_resid(factors.size());

  for (size_t li = 0; li < factors.size(); ++li) {
    int k = factors[li];
    Eigen::VectorXd x = temporal_aggregate(series, k);
    int period = m / k;
    int h = m / k;  // exactly one future cycle
    auto bundle = fit_level(x, std::max(period, 1), h, base_method, opts, k, res.notes);
    res.base_stack.segment(res.hierarchy.level_offset(k), h) = bundle.point;
    level_resid[li] = bundle.residuals;
  }

  // Weight matrix for the reconciliation.
  WeightKind kind = opts.w_kind;
  WeightSpec W;
  if (kind == WeightKind::Ols) {
    W.kind = kind;
    W.matrix = Eigen::MatrixXd::Identity(rows, rows);
  } else if (kind == WeightKind::Structural) {
    W.kind = kind;
    W.matrix = res.hierarchy.S.entries.rowwise().sum().asDiagonal();
  } else if (kind == WeightKind::WlsVar) {
    // Pooled uncentered residual variance within each level.
    Eigen::VectorXd diag(rows);
    for (size_t li = 0; li < factors.size(); ++li) {
      int k = factors[li];
      double ss = 0.0;
      int n = 0;
      for (Eigen::Index t = 0; t < level_resid[li].size(); ++t)
        if (std::isfinite(level_resid[li](t))) { ss += level_resid[li](t) * level_resid[li](t); ++n; }
      if (n == 0 || ss <= 0.0)
        throw NumericError("thief: degenerate residual variance at factor " +
                           std::to_string(k));
      diag.segment(res.hierarchy.level_offset(k), res.hierarchy.level_size(k))
          .setConstant(ss / n);
    }
    W.kind = kind;
    W.matrix = diag.asDiagonal();
  } else {
    // Cycle-stacked residual rows: one row per complete year with residuals
    // available at every granularity.
    int max_years = static_cast<int>(series.size()) / m;
    std::vector<Eigen::VectorXd> year_rows;
    for (int c = max_years; c >= 1; --c) {  // chronological, oldest first
      Eigen::VectorXd row(rows);
      bool ok = true;
      for (size_t li = 0; li < factors.size() && ok; ++li) {
        int k = factors[li];
        Eigen::Index per_year = m / k;
        Eigen::Index nk = level_resid[li].size();
        Eigen::Index first = nk - static_cast<Eigen::Index>(c) * per_year;
        if (first < 0) { ok = false; break; }
        for (Eigen::Index j = 0; j < per_year; ++j) {
          double v = level_resid[li](first + j);
          if (!std::isfinite(v)) { ok = false; break; }
          row(res.hierarchy.level_offset(k) + j) = v;
        }
      }
      if (ok) year_rows.push_back(std::move(row));
    }
    Eigen::Index n = static_cast<Eigen::Index>(year_rows.size());
    bool feasible = kind == WeightKind::Shrinkage ? n >= 3 : n > rows;
    if (!feasible) {
      res.notes.push_back(weight_kind_name(kind) +
                          " infeasible with " + std::to_string(n) +
                          " residual years; using structural scaling");
      W.kind = WeightKind::Structural;
      W.matrix = res.hierarchy.S.entries.rowwise().sum().asDiagonal();
    } else {
      Eigen::MatrixXd resid(n, rows);
      for (Eigen::Index i = 0; i < n; ++i) resid.row(i) = year_rows[i];
      W = estimate_W(resid, res.hierarchy.S, kind);
    }
  }

  auto bundle = mint_reconcile(res.hierarchy.S, W, res.base_stack.transpose());
  res.reconciled_stack = bundle.point.row(0);
  return res;
}

}  // namespace hts::temporal
