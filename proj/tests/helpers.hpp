#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hts/hierarchy.hpp"
#include "hts/stats.hpp"

namespace test_helpers {

// The two-level example tree: Total; A,B,C; AX,AY,BX,BY,CX,CY.
inline hts::HierarchySpec figure1() {
  using hts::HierarchyNode;
  std::vector<HierarchyNode> nodes = {
      {"Total", 0, std::nullopt}, {"A", 1, "Total"}, {"B", 1, "Total"}, {"C", 1, "Total"},
      {"AX", 2, "A"}, {"AY", 2, "A"}, {"BX", 2, "B"}, {"BY", 2, "B"},
      {"CX", 2, "C"}, {"CY", 2, "C"}};
  return hts::HierarchySpec::from_nodes(nodes);
}

// Random tree with bounded depth and leaf count; leaves may sit at any level.
inline hts::HierarchySpec random_tree(hts::stats::Rng &rng, int max_depth = 4,
                                      int max_leaves = 64) {
  using hts::HierarchyNode;
  std::vector<HierarchyNode> nodes;
  nodes.push_back({"n0", 0, std::nullopt});
  std::vector<size_t> frontier = {0};
  int counter = 1;
  int leaf_budget = max_leaves;

  for (int level = 1; level <= max_depth && !frontier.empty(); ++level) {
    std::vector<size_t> next;
    for (size_t pi : frontier) {
      bool expand = level == 1 ? rng.uniform() < 0.95 : rng.uniform() < 0.6;
      if (!expand || leaf_budget <= 1) continue;
      int kids = rng.uniform_int(1, 4);
      kids = std::min(kids, leaf_budget - 1 + 1);
      for (int c = 0; c < kids && leaf_budget > 0; ++c) {
        std::string id = "n" + std::to_string(counter++);
        nodes.push_back({id, level, nodes[pi].id});
        next.push_back(nodes.size() - 1);
        --leaf_budget;
      }
      ++leaf_budget;  // the parent stopped being a leaf
    }
    frontier = std::move(next);
  }
  return hts::HierarchySpec::from_nodes(nodes);
}

// Per-node sums by walking the tree, independent of the summing matrix.
inline Eigen::MatrixXd tree_walk_aggregate(const hts::HierarchySpec &spec,
                                           const Eigen::MatrixXd &bottom,
                                           const std::vector<std::string> &node_order) {
  const auto &leaves = spec.bottom_order();
  auto leaf_col = [&](const std::string &id) -> int {
    for (size_t j = 0; j < leaves.size(); ++j)
      if (leaves[j] == id) return static_cast<int>(j);
    return -1;
  };
  std::function<Eigen::VectorXd(const std::string &)> sum_node =
      [&](const std::string &id) -> Eigen::VectorXd {
    int lc = leaf_col(id);
    if (lc >= 0) return bottom.col(lc);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(bottom.rows());
    for (const auto &child : spec.children_of(id)) acc += sum_node(child);
    return acc;
  };
  Eigen::MatrixXd full(bottom.rows(), static_cast<Eigen::Index>(node_order.size()));
  for (size_t i = 0; i < node_order.size(); ++i) full.col(i) = sum_node(node_order[i]);
  return full;
}

}  // namespace test_helpers
