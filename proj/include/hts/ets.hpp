#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hts/forecast.hpp"

namespace hts::ets {

enum class ErrorType { Additive, Multiplicative };
enum class TrendType { None, Additive, AdditiveDamped };
enum class SeasonalType { None, Additive, Multiplicative };

struct CandidateSpec {
  ErrorType error = ErrorType::Additive;
  TrendType trend = TrendType::None;
  SeasonalType seasonal = SeasonalType::None;

  std::string tag() const;  // e.g. "ETS(A,Ad,M)"
};

// The admissible search space: {A,M} x {N,A,Ad} x {N,A,M}. Multiplicative
// forms are dropped when any observation is <= 0; seasonal forms need
// T >= 2m + 4.
std::vector<CandidateSpec> default_candidates(const Eigen::VectorXd &train, int m);

struct Params {
  double alpha = 0.3;
  double beta = 0.0;
  double gamma = 0.0;
  double phi = 1.0;
};

struct State {
  double level = 0.0;
  double trend = 0.0;
  // seasonal(0) is the most recent state s_t, seasonal(m-1) is s_{t-m+1}.
  Eigen::VectorXd seasonal;
};

struct FilterResult {
  bool ok = false;
  double loglik = 0.0;  // n*log(SSE) (+ 2*sum log|mu| for multiplicative error)
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;  // observed - fitted
  State final_state;
};

// Runs the single-source-of-error recursions over the series from the given
// initial state. Exposed so tests can pin parameters directly.
FilterResult filter(const CandidateSpec &spec, const Params &params, const State &init,
                    const Eigen::VectorXd &y, int m);

// h-step point forecasts from a state, iterating with zero future errors.
Eigen::VectorXd point_forecast(const CandidateSpec &spec, const Params &params,
                               const State &state, int m, int h);

struct EtsModel {
  CandidateSpec spec;
  Params params;
  State initial_state;
  State final_state;
  int period = 1;
  double aicc = 0.0;
  double sigma2 = 0.0;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  std::string meta;
};

// Fits every candidate by maximizing the Gaussian one-step likelihood over
// smoothing parameters and initial states (heuristic start, then Nelder-Mead),
// and returns the minimum-AICc model.
EtsModel fit(const Eigen::VectorXd &train, int m,
             const std::vector<CandidateSpec> &candidates);
EtsModel fit(const Eigen::VectorXd &train, int m);

ForecastBundle forecast(const EtsModel &model, int h);

}  // namespace hts::ets
