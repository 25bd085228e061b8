#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hts {

// Mean absolute scaled error: MAE over the test window divided by the
// in-sample seasonal-naive scaling factor Q = (1/(T-m)) sum |y_t - y_{t-m}|
// computed on the training window only.
double mase(const Eigen::VectorXd &actual, const Eigen::VectorXd &forecast,
            const Eigen::VectorXd &train, int m);

// Report column order; also the tie-break order for best_method.
const std::vector<std::string> &method_order();

struct AccuracyCell {
  bool ok = false;
  double value = 0.0;
  std::string reason;  // set when the cell is flagged instead of scored
};

class AccuracyTable {
public:
  std::string split_name;
  std::string granularity;

  void set(const std::string &node, const std::string &method, double value);
  void flag(const std::string &node, const std::string &method, const std::string &reason);
  const AccuracyCell *find(const std::string &node, const std::string &method) const;

  std::vector<std::string> nodes() const;    // insertion order
  std::vector<std::string> methods() const;  // method_order() filtered to present

  const std::map<std::pair<std::string, std::string>, AccuracyCell> &cells() const {
    return cells_;
  }

private:
  void remember(const std::string &node, const std::string &method);

  std::map<std::pair<std::string, std::string>, AccuracyCell> cells_;
  std::vector<std::string> node_order_;
  std::vector<std::string> present_methods_;
};

struct BestMethod {
  std::string method;
  double value = 0.0;
};

// Per-node argmin over scored methods; ties resolve to the earliest method in
// method_order(). Nodes with no scored cell are absent from the result.
std::map<std::string, BestMethod> best_method(const AccuracyTable &table);

}  // namespace hts
