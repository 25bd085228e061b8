#pragma once

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <vector>

#include "hts/hierarchy.hpp"

namespace hts {

// Calendar position under the fixed "period observations per year" convention
// (weekly data uses exactly 52 weeks per year). idx is 1-based within the year.
struct CalendarPos {
  int year = 0;
  int idx = 1;

  bool operator==(const CalendarPos &o) const { return year == o.year && idx == o.idx; }
  bool operator<(const CalendarPos &o) const {
    return year != o.year ? year < o.year : idx < o.idx;
  }
};

// Parses "YYYY-WW" tokens used by split files and CLI flags.
CalendarPos parse_calendar_token(const std::string &token);
std::string calendar_token(const CalendarPos &pos);

// Labeled, equally spaced, non-negative observation columns.
class SeriesFrame {
public:
  SeriesFrame() = default;
  SeriesFrame(std::vector<std::string> labels, Eigen::MatrixXd values, int period,
              CalendarPos start);

  const std::vector<std::string> &labels() const { return labels_; }
  const Eigen::MatrixXd &values() const { return values_; }
  int period() const { return period_; }
  CalendarPos start() const { return start_; }
  Eigen::Index rows() const { return values_.rows(); }

  bool has(const std::string &label) const { return index_.count(label) > 0; }
  Eigen::VectorXd col(const std::string &label) const;
  Eigen::Index col_index(const std::string &label) const;

  CalendarPos pos_at(Eigen::Index row) const;
  // Row index of a calendar position; throws if outside the frame.
  Eigen::Index row_of(const CalendarPos &pos) const;

  SeriesFrame slice_rows(Eigen::Index first, Eigen::Index count) const;

private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd values_;
  int period_ = 1;
  CalendarPos start_{};
  std::unordered_map<std::string, Eigen::Index> index_;
};

struct SplitSpec {
  std::string name;
  CalendarPos train_start, train_end, test_start, test_end;
};

// CSV `name,train_start,train_end,test_start,test_end` with YYYY-WW tokens.
std::vector<SplitSpec> load_split_specs(const std::string &path);

// Data CSV header is `year,week,<leaf>...`; rows must advance the calendar by
// exactly one step each. Returns the bottom-level frame in hierarchy leaf
// order; aggregate columns are always derived, never read.
// `period` is the number of observations per year (52 for the weekly
// convention; the bundled toy data uses 12).
SeriesFrame ingest_csv(const std::string &path, const HierarchySpec &hierarchy,
                       int period = 52);

// Full frame over all hierarchy nodes, columns in summing-matrix row order.
SeriesFrame aggregate_frame(const SeriesFrame &bottom, const SummingMatrix &S);

std::pair<SeriesFrame, SeriesFrame> split(const SeriesFrame &frame, const SplitSpec &spec);

// Non-overlapping sums of k consecutive observations, anchored at the end of
// the series; a leading remainder of size T mod k is dropped.
Eigen::VectorXd temporal_aggregate(const Eigen::VectorXd &series, int k);

}  // namespace hts
