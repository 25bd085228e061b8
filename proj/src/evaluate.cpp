#include "hts/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "hts/errors.hpp"

namespace hts {

double mase(const Eigen::VectorXd &actual, const Eigen::VectorXd &forecast,
            const Eigen::VectorXd &train, int m) {
  const Eigen::Index h = actual.size();
  const Eigen::Index T = train.size();
  if (h < 1 || forecast.size() != h) throw DataError("mase: forecast/actual length mismatch");
  if (m < 1) throw DataError("mase: period must be >= 1");
  if (T <= m) throw DataError("mase: training window no longer than the period");

  double q = 0.0;
  for (Eigen::Index t = m; t < T; ++t) q += std::abs(train(t) - train(t - m));
  q /= static_cast<double>(T - m);
  if (q <= 0.0) throw NumericError("mase: degenerate scaling factor (seasonally constant training series)");

  double mae = (actual - forecast).cwiseAbs().mean();
  return mae / q;
}

const std::vector<std::string> &method_order() {
  static const std::vector<std::string> order = {
      "arm", "snv", "nve", "ets", "avg",
      "bup", "top", "ols", "mit", "var", "stc", "cov",
      "ebup", "etop", "eols", "emit", "evar", "estc", "ecov",
      "havg", "hnve", "hsnv", "hets", "harm"};
  return order;
}

void AccuracyTable::remember(const std::string &node, const std::string &method) {
  if (std::find(node_order_.begin(), node_order_.end(), node) == node_order_.end())
    node_order_.push_back(node);
  if (std::find(present_methods_.begin(), present_methods_.end(), method) ==
      present_methods_.end())
    present_methods_.push_back(method);
}

void AccuracyTable::set(const std::string &node, const std::string &method, double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw DataError("accuracy value must be finite and non-negative");
  remember(node, method);
  cells_[{node, method}] = AccuracyCell{true, value, ""};
}

void AccuracyTable::flag(const std::string &node, const std::string &method,
                         const std::string &reason) {
  remember(node, method);
  cells_[{node, method}] = AccuracyCell{false, 0.0, reason};
}

const AccuracyCell *AccuracyTable::find(const std::string &node,
                                        const std::string &method) const {
  auto it = cells_.find({node, method});
  return it == cells_.end() ? nullptr : &it->second;
}

std::vector<std::string> AccuracyTable::nodes() const { return node_order_; }

std::vector<std::string> AccuracyTable::methods() const {
  std::vector<std::string> out;
  for (const auto &m : method_order())
    if (std::find(present_methods_.begin(), present_methods_.end(), m) !=
        present_methods_.end())
      out.push_back(m);
  // Methods outside the canonical order keep insertion order at the tail.
  for (const auto &m : present_methods_)
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  return out;
}

std::map<std::string, BestMethod> best_method(const AccuracyTable &table) {
  if (table.nodes().empty()) throw DataError("best_method: empty table");
  std::map<std::string, BestMethod> out;
  auto methods = table.methods();
  for (const auto &node : table.nodes()) {
    bool found = false;
    BestMethod best;
    for (const auto &m : methods) {
      const AccuracyCell *c = table.find(node, m);
      if (!c || !c->ok) continue;
      if (!found || c->value < best.value) {
        best = BestMethod{m, c->value};
        found = true;
      }
    }
    if (found) out[node] = best;
  }
  return out;
}

}  // namespace hts
