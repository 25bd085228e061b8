#include "hts/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hts/errors.hpp"

namespace hts {

namespace {

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int to_int(const std::string &key, const std::string &value) {
  try {
    return std::stoi(value);
  } catch (...) {
    throw DataError("config: bad integer for " + key + ": '" + value + "'");
  }
}

std::string join(const std::vector<std::string> &v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i];
  }
  return s;
}

}  // namespace

void RunConfig::set(const std::string &key, const std::string &value) {
  if (key == "period") period = to_int(key, value);
  else if (key == "jobs") jobs = to_int(key, value);
  else if (key == "granularities") granularities = split_list(value);
  else if (key == "feature_granularities") feature_granularities = split_list(value);
  else if (key == "arima.max_p") arima_max.p = to_int(key, value);
  else if (key == "arima.max_q") arima_max.q = to_int(key, value);
  else if (key == "arima.max_P") arima_max.P = to_int(key, value);
  else if (key == "arima.max_Q") arima_max.Q = to_int(key, value);
  else if (key == "arima.max_d") arima_max.d = to_int(key, value);
  else if (key == "arima.max_D") arima_max.D = to_int(key, value);
  else if (key == "ets.max_seasonal_period") ets_max_seasonal_period = to_int(key, value);
  else if (key == "temporal.weights") temporal_weights = parse_weight_kind(value);
  else if (key == "topdown.method") {
    if (value == "avg_hist") top_down = ProportionMethod::AverageHistorical;
    else if (value == "prop_of_avg") top_down = ProportionMethod::ProportionOfAverages;
    else throw DataError("config: unknown topdown.method '" + value + "'");
  } else if (key == "coherence.tol") {
    try {
      coherence_tol = std::stod(value);
    } catch (...) {
      throw DataError("config: bad coherence.tol");
    }
  } else {
    throw DataError("config: unknown key '" + key + "'");
  }
}

void RunConfig::load_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(lineno) + " is not key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto ke = key.find_last_not_of(" \t");
    key = key.substr(0, ke + 1);
    auto vb = value.find_first_not_of(" \t");
    value = vb == std::string::npos ? "" : value.substr(vb);
    set(key, value);
  }
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  out << "arima.max_D=" << arima_max.D << "\n"
      << "arima.max_P=" << arima_max.P << "\n"
      << "arima.max_Q=" << arima_max.Q << "\n"
      << "arima.max_d=" << arima_max.d << "\n"
      << "arima.max_p=" << arima_max.p << "\n"
      << "arima.max_q=" << arima_max.q << "\n"
      << "coherence.tol=" << coherence_tol << "\n"
      << "ets.max_seasonal_period=" << ets_max_seasonal_period << "\n"
      << "feature_granularities=" << join(feature_granularities) << "\n"
      << "granularities=" << join(granularities) << "\n"
      << "period=" << period << "\n"
      << "temporal.weights=" << weight_kind_name(temporal_weights) << "\n"
      << "topdown.method="
      << (top_down == ProportionMethod::AverageHistorical ? "avg_hist" : "prop_of_avg")
      << "\n";
  return out.str();
}

std::string RunConfig::hash() const {
  // FNV-1a 64; jobs deliberately excluded so worker count never changes output.
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hts
