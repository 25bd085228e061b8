#pragma once

#include <map>
#include <string>
#include <vector>

#include "hts/config.hpp"
#include "hts/evaluate.hpp"
#include "hts/frame.hpp"
#include "hts/hierarchy.hpp"
#include "hts/reconcile.hpp"

namespace hts::runner {

// Ingested dataset: bottom frame plus the derived full frame in summing-matrix
// row order.
struct Dataset {
  HierarchySpec hierarchy;
  SummingMatrix S;
  SeriesFrame bottom;
  SeriesFrame full;
};

Dataset load_dataset(const std::string &data_csv, const std::string &hierarchy_csv,
                     int period);

// Cache of scored cells keyed by (split, granularity, node, method); the file
// carries the config hash in its name so stale configurations never match.
class CellCache {
public:
  void put(const std::string &split, const std::string &gran, const std::string &node,
           const std::string &method, const AccuracyCell &cell);
  const AccuracyCell *find(const std::string &split, const std::string &gran,
                           const std::string &node, const std::string &method) const;

  void load(const std::string &path);
  void save(const std::string &path, const std::string &config_hash) const;
  size_t size() const { return cells_.size(); }

private:
  std::map<std::array<std::string, 4>, AccuracyCell> cells_;
};

// MASE of every method for every node at one split and granularity. Cached
// ok-cells are reused verbatim; only flagged or missing cells are recomputed.
AccuracyTable run_spatial(const Dataset &ds, const SplitSpec &split,
                          const std::string &granularity, const RunConfig &config,
                          CellCache *cache = nullptr);

// Thief workflow for one node: per-granularity MASE of the unreconciled base
// methods (avg,nve,snv,ets,arm) and their reconciled counterparts (h-prefixed).
AccuracyTable run_temporal(const Dataset &ds, const std::string &node,
                           const SplitSpec &split, const RunConfig &config);

// Full grid; writes accuracy_long.csv, wide_<split>_<gran>.csv and the cache.
std::vector<AccuracyTable> evaluate_grid(const Dataset &ds,
                                         const std::vector<SplitSpec> &splits,
                                         const RunConfig &config,
                                         const std::string &out_dir);

// Feature extraction + PCA per (level, granularity) group, on the training
// window of each node's best (split, method) pair. Writes features.csv and
// pca_level<L>_<gran>.csv under out_dir.
void run_features(const Dataset &ds, const std::vector<AccuracyTable> &tables,
                  const std::vector<SplitSpec> &splits, const RunConfig &config,
                  const std::string &out_dir);

// Long-format accuracy CSV (split,granularity,node_id,method,mase).
void write_long_csv(const std::vector<AccuracyTable> &tables, const RunConfig &config,
                    const std::string &path);
// Appendix-style wide layout for one table.
void write_wide_csv(const AccuracyTable &table, const RunConfig &config,
                    const std::string &path);
std::string pivot_long_to_wide(const std::string &long_csv_path, const std::string &split,
                               const std::string &granularity);

}  // namespace hts::runner
