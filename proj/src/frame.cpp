#include "hts/frame.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>

#include "hts/csv.hpp"
#include "hts/errors.hpp"

namespace hts {

namespace {

long linear_index(const CalendarPos &pos, int period) {
  return static_cast<long>(pos.year) * period + (pos.idx - 1);
}

double parse_count(const std::string &s, const std::string &context) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("non-numeric cell '" + s + "' in " + context);
  if (!std::isfinite(v)) throw DataError("non-finite value in " + context);
  if (v < 0) throw DataError("negative count in " + context);
  return v;
}

}  // namespace

CalendarPos parse_calendar_token(const std::string &token) {
  auto dash = token.find('-');
  if (dash == std::string::npos) throw DataError("bad calendar token '" + token + "', want YYYY-WW");
  try {
    CalendarPos p;
    p.year = std::stoi(token.substr(0, dash));
    p.idx = std::stoi(token.substr(dash + 1));
    if (p.idx < 1) throw DataError("calendar index must be >= 1 in '" + token + "'");
    return p;
  } catch (const DataError &) {
    throw;
  } catch (...) {
    throw DataError("bad calendar token '" + token + "'");
  }
}

std::string calendar_token(const CalendarPos &pos) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", pos.year, pos.idx);
  return buf;
}

SeriesFrame::SeriesFrame(std::vector<std::string> labels, Eigen::MatrixXd values,
                         int period, CalendarPos start)
    : labels_(std::move(labels)), values_(std::move(values)), period_(period), start_(start) {
  if (period_ < 1) throw DataError("period must be >= 1");
  if (values_.rows() < 1) throw DataError("frame needs at least one row");
  if (static_cast<size_t>(values_.cols()) != labels_.size())
    throw DataError("label count does not match value columns");
  if (start_.idx < 1 || start_.idx > period_) throw DataError("start index outside year");
  if (!values_.allFinite()) throw DataError("frame contains non-finite values");
  for (size_t i = 0; i < labels_.size(); ++i)
    if (!index_.emplace(labels_[i], static_cast<Eigen::Index>(i)).second)
      throw DataError("duplicate column label " + labels_[i]);
}

Eigen::VectorXd SeriesFrame::col(const std::string &label) const {
  return values_.col(col_index(label));
}

Eigen::Index SeriesFrame::col_index(const std::string &label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw DataError("unknown series " + label);
  return it->second;
}

CalendarPos SeriesFrame::pos_at(Eigen::Index row) const {
  long lin = linear_index(start_, period_) + row;
  CalendarPos p;
  p.year = static_cast<int>(lin / period_);
  p.idx = static_cast<int>(lin % period_) + 1;
  return p;
}

Eigen::Index SeriesFrame::row_of(const CalendarPos &pos) const {
  if (pos.idx < 1 || pos.idx > period_)
    throw DataError("calendar index outside year: " + calendar_token(pos));
  long off = linear_index(pos, period_) - linear_index(start_, period_);
  if (off < 0 || off >= rows())
    throw DataError("calendar position outside frame: " + calendar_token(pos));
  return static_cast<Eigen::Index>(off);
}

SeriesFrame SeriesFrame::slice_rows(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 1 || first + count > rows())
    throw DataError("slice outside frame");
  return SeriesFrame(labels_, values_.middleRows(first, count), period_, pos_at(first));
}

std::vector<SplitSpec> load_split_specs(const std::string &path) {
  auto t = csv::read_file(path);
  if (t.header != std::vector<std::string>{"name", "train_start", "train_end",
                                           "test_start", "test_end"})
    throw DataError("split file must have header name,train_start,train_end,test_start,test_end");
  std::vector<SplitSpec> out;
  for (const auto &row : t.rows) {
    if (row.size() != 5) throw DataError("split row needs 5 fields");
    SplitSpec s;
    s.name = row[0];
    s.train_start = parse_calendar_token(row[1]);
    s.train_end = parse_calendar_token(row[2]);
    s.test_start = parse_calendar_token(row[3]);
    s.test_end = parse_calendar_token(row[4]);
    out.push_back(s);
  }
  return out;
}

SeriesFrame ingest_csv(const std::string &path, const HierarchySpec &hierarchy, int period) {
  auto t = csv::read_file(path);
  if (t.header.size() < 3 || t.header[0] != "year" || t.header[1] != "week")
    throw DataError("data file must start with year,week columns: " + path);

  std::unordered_map<std::string, size_t> file_col;
  for (size_t i = 2; i < t.header.size(); ++i) {
    if (!file_col.emplace(t.header[i], i).second)
      throw DataError("duplicate data column " + t.header[i]);
  }
  const auto &leaves = hierarchy.bottom_order();
  for (const auto &leaf : leaves)
    if (!file_col.count(leaf)) throw DataError("missing leaf column " + leaf);
  for (const auto &[name, _] : file_col)
    if (!hierarchy.is_leaf(name))
      throw DataError("data column " + name + " is not a leaf of the hierarchy");

  if (t.rows.empty()) throw DataError("data file has no rows: " + path);

  if (period < 1) throw DataError("period must be >= 1");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(t.rows.size()),
                         static_cast<Eigen::Index>(leaves.size()));
  CalendarPos start{}, prev{};
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto &row = t.rows[r];
    if (row.size() != t.header.size())
      throw DataError("row " + std::to_string(r + 1) + " has wrong field count");
    CalendarPos pos;
    pos.year = std::stoi(row[0]);
    pos.idx = std::stoi(row[1]);
    if (pos.idx < 1 || pos.idx > period)
      throw DataError("week out of range at row " + std::to_string(r + 1));
    if (r == 0) {
      start = pos;
    } else {
      long expect = linear_index(prev, period) + 1;
      long got = linear_index(pos, period);
      if (got != expect)
        throw DataError("calendar gap or disorder at row " + std::to_string(r + 1) +
                        " (" + calendar_token(pos) + ")");
    }
    prev = pos;
    for (size_t j = 0; j < leaves.size(); ++j) {
      const auto &cell = row[file_col.at(leaves[j])];
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          parse_count(cell, "row " + std::to_string(r + 1) + " column " + leaves[j]);
    }
  }
  return SeriesFrame(leaves, std::move(values), period, start);
}

SeriesFrame aggregate_frame(const SeriesFrame &bottom, const SummingMatrix &S) {
  if (bottom.labels().size() != static_cast<size_t>(S.cols()))
    throw DataError("bottom frame width does not match summing matrix");
  for (Eigen::Index j = 0; j < S.cols(); ++j)
    if (bottom.labels()[j] != S.row_order[S.rows() - S.cols() + j])
      throw DataError("bottom frame label order does not match summing matrix");
  return SeriesFrame(S.row_order, aggregate(bottom.values(), S), bottom.period(),
                     bottom.start());
}

std::pair<SeriesFrame, SeriesFrame> split(const SeriesFrame &frame, const SplitSpec &spec) {
  if (!(spec.train_end < spec.test_start))
    throw DataError("split " + spec.name + ": train_end must precede test_start");
  if (spec.test_end < spec.test_start || spec.train_end < spec.train_start)
    throw DataError("split " + spec.name + ": empty window");
  Eigen::Index tr0 = frame.row_of(spec.train_start);
  Eigen::Index tr1 = frame.row_of(spec.train_end);
  Eigen::Index te0 = frame.row_of(spec.test_start);
  Eigen::Index te1 = frame.row_of(spec.test_end);
  return {frame.slice_rows(tr0, tr1 - tr0 + 1), frame.slice_rows(te0, te1 - te0 + 1)};
}

Eigen::VectorXd temporal_aggregate(const Eigen::VectorXd &series, int k) {
  const Eigen::Index n = series.size();
  if (k < 1) throw DataError("aggregation factor must be >= 1");
  if (k > n) throw DataError("aggregation factor exceeds series length");
  const Eigen::Index blocks = n / k;
  const Eigen::Index drop = n - blocks * k;
  Eigen::VectorXd out(blocks);
  for (Eigen::Index j = 0; j < blocks; ++j) out(j) = series.segment(drop + j * k, k).sum();
  return out;
}

}  // namespace hts
