#include "hts/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hts/csv.hpp"
#include "hts/errors.hpp"

namespace hts {

HierarchySpec::HierarchySpec(std::vector<HierarchyNode> nodes,
                             std::vector<std::string> bottom_order)
    : nodes_(std::move(nodes)), bottom_(std::move(bottom_order)) {
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second)
      throw DataError("duplicate node_id: " + nodes_[i].id);
  }
  validate();
}

HierarchySpec HierarchySpec::from_nodes(std::vector<HierarchyNode> nodes) {
  std::set<std::string> parents;
  for (const auto &n : nodes)
    if (n.parent) parents.insert(*n.parent);
  std::vector<std::string> bottom;
  for (const auto &n : nodes)
    if (!parents.count(n.id)) bottom.push_back(n.id);
  return HierarchySpec(std::move(nodes), std::move(bottom));
}

HierarchySpec HierarchySpec::load_csv(const std::string &path) {
  auto t = csv::read_file(path);
  if (t.header != std::vector<std::string>{"node_id", "level", "parent"})
    throw DataError("hierarchy file must have header node_id,level,parent: " + path);
  std::vector<HierarchyNode> nodes;
  for (const auto &row : t.rows) {
    if (row.size() != 3) throw DataError("hierarchy row needs 3 fields");
    HierarchyNode n;
    n.id = row[0];
    try {
      n.level = std::stoi(row[1]);
    } catch (...) {
      throw DataError("bad level for node " + row[0]);
    }
    if (!row[2].empty()) n.parent = row[2];
    nodes.push_back(std::move(n));
  }
  return from_nodes(std::move(nodes));
}

void HierarchySpec::validate() {
  if (nodes_.empty()) throw DataError("hierarchy has no nodes");

  int roots = 0;
  for (const auto &n : nodes_) {
    if (!n.parent) {
      ++roots;
      root_ = n.id;
      if (n.level != 0) throw DataError("root node must have level 0: " + n.id);
    } else {
      auto it = index_.find(*n.parent);
      if (it == index_.end())
        throw DataError("unknown parent '" + *n.parent + "' for node " + n.id);
      const auto &p = nodes_[it->second];
      if (n.level != p.level + 1)
        throw DataError("node " + n.id + " must be one level below its parent");
    }
    if (n.level < 0) throw DataError("negative level for node " + n.id);
    depth_ = std::max(depth_, n.level);
  }
  if (roots != 1) throw DataError("hierarchy must have exactly one root");

  // Walk parent links to the root; a node that never reaches it sits on a
  // cycle or a detached component.
  for (const auto &n : nodes_) {
    const HierarchyNode *cur = &n;
    size_t steps = 0;
    while (cur->parent) {
      if (++steps > nodes_.size()) throw DataError("cycle in parent links at " + n.id);
      cur = &nodes_[index_.at(*cur->parent)];
    }
    if (cur->id != root_) throw DataError("node " + n.id + " is not connected to the root");
  }

  std::set<std::string> parents;
  for (const auto &n : nodes_)
    if (n.parent) parents.insert(*n.parent);

  std::set<std::string> seen;
  for (const auto &id : bottom_) {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("bottom_order names unknown node " + id);
    if (parents.count(id)) throw DataError("bottom_order contains internal node " + id);
    if (!seen.insert(id).second) throw DataError("bottom_order repeats " + id);
  }
  for (const auto &n : nodes_) {
    if (!parents.count(n.id) && !seen.count(n.id))
      throw DataError("leaf " + n.id + " missing from bottom_order");
  }
}

bool HierarchySpec::is_leaf(const std::string &id) const {
  return std::find(bottom_.begin(), bottom_.end(), id) != bottom_.end();
}

int HierarchySpec::level_of(const std::string &id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DataError("unknown node " + id);
  return nodes_[it->second].level;
}

std::vector<std::string> HierarchySpec::children_of(const std::string &id) const {
  std::vector<std::string> out;
  for (const auto &n : nodes_)
    if (n.parent && *n.parent == id) out.push_back(n.id);
  return out;
}

Eigen::Index SummingMatrix::row_of(const std::string &id) const {
  auto it = row_index.find(id);
  if (it == row_index.end()) throw DataError("unknown node " + id);
  return it->second;
}

SummingMatrix build_summing_matrix(const HierarchySpec &spec) {
  const auto &nodes = spec.nodes();
  const auto &bottom = spec.bottom_order();
  const Eigen::Index mk = static_cast<Eigen::Index>(bottom.size());

  std::unordered_map<std::string, Eigen::Index> col_of;
  for (Eigen::Index j = 0; j < mk; ++j) col_of[bottom[j]] = j;

  // Root, then internal levels in declaration order, bottom rows last. In a
  // single-node hierarchy the root is itself the bottom row.
  std::vector<std::string> order;
  for (int lvl = 0; lvl <= spec.depth(); ++lvl)
    for (const auto &n : nodes)
      if (n.level == lvl && !spec.is_leaf(n.id)) order.push_back(n.id);
  for (const auto &id : bottom) order.push_back(id);

  SummingMatrix S;
  S.row_order = order;
  S.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(order.size()), mk);
  for (Eigen::Index r = 0; r < S.rows(); ++r) S.row_index[order[r]] = r;

  // Each leaf contributes a one to every ancestor's row.
  std::unordered_map<std::string, const HierarchyNode *> by_id;
  for (const auto &n : nodes) by_id[n.id] = &n;
  for (const auto &leaf : bottom) {
    Eigen::Index col = col_of[leaf];
    const HierarchyNode *cur = by_id[leaf];
    while (true) {
      S.entries(S.row_index.at(cur->id), col) = 1.0;
      if (!cur->parent) break;
      cur = by_id[*cur->parent];
    }
  }
  return S;
}

Eigen::MatrixXd aggregate(const Eigen::MatrixXd &bottom, const SummingMatrix &S) {
  if (bottom.cols() != S.cols())
    throw DataError("aggregate: bottom has " + std::to_string(bottom.cols()) +
                    " columns, expected " + std::to_string(S.cols()));
  return bottom * S.entries.transpose();
}

CoherenceReport check_coherence(const Eigen::MatrixXd &full, const SummingMatrix &S,
                                double tol) {
  if (full.cols() != S.rows())
    throw DataError("check_coherence: column count must equal node count");

  CoherenceReport rep;
  const Eigen::Index mk = S.cols();
  const Eigen::Index first_bottom = S.rows() - mk;
  rep.worst.violation = -1.0;

  for (Eigen::Index r = 0; r < first_bottom; ++r) {
    CoherenceViolation worst;
    worst.node_id = S.row_order[r];
    worst.violation = -1.0;
    for (Eigen::Index t = 0; t < full.rows(); ++t) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < mk; ++j)
        if (S.entries(r, j) != 0.0) sum += full(t, first_bottom + j);
      double v = full(t, r);
      double rel = std::abs(v - sum) / std::max(1.0, std::abs(v));
      if (rel > worst.violation) {
        worst.time = t;
        worst.value = v;
        worst.child_sum = sum;
        worst.violation = rel;
      }
    }
    if (worst.violation < 0) continue;  // zero-row input
    if (worst.violation > tol) rep.pass = false;
    if (worst.violation > rep.worst.violation) rep.worst = worst;
    rep.per_node.push_back(std::move(worst));
  }
  return rep;
}

}  // namespace hts
