#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hts/arima.hpp"
#include "hts/hierarchy.hpp"
#include "hts/reconcile.hpp"

namespace hts::temporal {

// Aggregation hierarchy over one seasonal cycle. factors holds block sizes k
// (divisors of m) in decreasing order; level k contributes m/k rows.
struct TemporalHierarchy {
  int base_period = 1;
  std::vector<int> factors;
  SummingMatrix S;

  // Row span [offset, offset + m/k) of a level inside the stacked vector.
  Eigen::Index level_offset(int factor) const;
  Eigen::Index level_size(int factor) const;
};

// The six report granularities (annual, semi-annual, quarterly, four-weekly,
// bi-weekly, base) intersected with the divisors of m.
std::vector<int> default_factors(int m);

// Short tag for a block size: 1->w, 2->2w, 4->m4w, m/4->q, m/2->sa, m->a.
std::string granularity_tag(int factor, int m);
std::string granularity_label(int factor, int m);  // "Weekly", "Annual", ...
int factor_for_tag(const std::string &tag, int m);

TemporalHierarchy build_temporal_smatrix(int m, const std::vector<int> &factors);

struct ThiefOptions {
  WeightKind w_kind = WeightKind::Structural;
  int arima_min_obs = 20;  // below this the level falls back to the mean method
  int ets_min_obs = 3;
  int ets_max_seasonal_period = 24;  // above this ETS drops seasonal candidates
  hts::arima::MaxOrders max_orders;
};

struct ThiefResult {
  TemporalHierarchy hierarchy;
  Eigen::VectorXd base_stack;        // unreconciled, ordered as S rows
  Eigen::VectorXd reconciled_stack;  // coherent across granularities
  std::vector<std::string> notes;    // per-level fallbacks and adjustments

  Eigen::VectorXd base_level(int factor) const;
  Eigen::VectorXd reconciled_level(int factor) const;
};

// One-cycle-ahead forecasts at every granularity of the cycle, reconciled with
// MinT. Per-level residuals drive the variance and shrinkage weights; variance
// scaling pools residuals within each level.
ThiefResult thief_forecast(const Eigen::VectorXd &series, int m,
                           const std::string &base_method, const ThiefOptions &opts = {});

}  // namespace hts::temporal
