#pragma once

#include <string>
#include <vector>

#include "hts/arima.hpp"
#include "hts/reconcile.hpp"

namespace hts {

// Engine configuration. File format is `key=value` lines with '#' comments;
// command-line flags override file values.
struct RunConfig {
  int period = 52;
  int jobs = 1;
  std::vector<std::string> granularities = {"w", "2w", "m4w", "q", "sa", "a"};
  arima::MaxOrders arima_max;
  // The reference tool refuses seasonal ETS above this period; weekly series
  // fall back to the non-seasonal candidate set.
  int ets_max_seasonal_period = 24;
  WeightKind temporal_weights = WeightKind::Structural;
  ProportionMethod top_down = ProportionMethod::AverageHistorical;
  double coherence_tol = 1e-8;
  std::vector<std::string> feature_granularities = {"w", "m4w", "q"};

  void set(const std::string &key, const std::string &value);
  void load_file(const std::string &path);

  // Canonical key=value serialization (sorted keys) and its FNV-1a hash,
  // embedded in output headers for provenance.
  std::string canonical() const;
  std::string hash() const;
};

}  // namespace hts
