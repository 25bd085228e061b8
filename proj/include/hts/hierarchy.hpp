#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace hts {

// A node hierarchy: one root at level 0, every other node's parent exactly
// one level above it. Leaves are listed in bottom_order.
struct HierarchyNode {
  std::string id;
  int level = 0;
  std::optional<std::string> parent;
};

class HierarchySpec {
public:
  HierarchySpec(std::vector<HierarchyNode> nodes, std::vector<std::string> bottom_order);

  // Builds the spec from node declarations alone; leaves keep declaration order.
  static HierarchySpec from_nodes(std::vector<HierarchyNode> nodes);

  // CSV with columns node_id,level,parent (root has empty parent).
  static HierarchySpec load_csv(const std::string &path);

  const std::vector<HierarchyNode> &nodes() const { return nodes_; }
  const std::vector<std::string> &bottom_order() const { return bottom_; }
  const std::string &root() const { return root_; }
  int depth() const { return depth_; }
  size_t node_count() const { return nodes_.size(); }
  size_t bottom_count() const { return bottom_.size(); }

  bool is_leaf(const std::string &id) const;
  int level_of(const std::string &id) const;
  std::vector<std::string> children_of(const std::string &id) const;

private:
  void validate();

  std::vector<HierarchyNode> nodes_;
  std::vector<std::string> bottom_;
  std::unordered_map<std::string, size_t> index_;
  std::string root_;
  int depth_ = 0;
};

// The m x m_k aggregation matrix S. Bottom rows are the identity; the row of
// node v has ones in the columns of the leaves below v.
struct SummingMatrix {
  Eigen::MatrixXd entries;            // 0/1 values
  std::vector<std::string> row_order; // root first, bottom rows last
  std::unordered_map<std::string, Eigen::Index> row_index;

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
  Eigen::Index row_of(const std::string &id) const;
};

// Row order is breadth-first: root, then each level in declaration order,
// bottom level in bottom_order.
SummingMatrix build_summing_matrix(const HierarchySpec &spec);

// full(t, :) = S * bottom(t, :). Bottom columns are reproduced exactly.
Eigen::MatrixXd aggregate(const Eigen::MatrixXd &bottom, const SummingMatrix &S);

struct CoherenceViolation {
  std::string node_id;
  Eigen::Index time = 0;
  double value = 0.0;
  double child_sum = 0.0;
  double violation = 0.0;  // |value - child_sum| / max(1, |value|)
};

struct CoherenceReport {
  bool pass = true;
  std::vector<CoherenceViolation> per_node;  // worst offender per aggregate node
  CoherenceViolation worst;
};

// Checks |value - sum(descendant leaves)| <= tol * max(1, |value|) for every
// aggregate node and time step. Report-only; never throws on incoherence.
CoherenceReport check_coherence(const Eigen::MatrixXd &full, const SummingMatrix &S,
                                double tol = 1e-8);

}  // namespace hts
