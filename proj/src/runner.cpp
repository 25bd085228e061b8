#include "hts/runner.hpp"

#include <array>
#include <atomic>
#include <functional>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "hts/arima.hpp"
#include "hts/csv.hpp"
#include "hts/errors.hpp"
#include "hts/ets.hpp"
#include "hts/features.hpp"
#include "hts/forecast.hpp"
#include "hts/pca.hpp"
#include "hts/temporal.hpp"

namespace hts::runner {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kBaseMethods = {"arm", "snv", "nve", "ets", "avg"};
const std::vector<std::string> kReconTags = {"bup", "top", "ols", "mit", "var", "stc", "cov"};

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Exceptions inside
// tasks must be captured by the closure itself.
void parallel_for(int count, int jobs, const std::function<void(int)> &fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto &t : pool) t.join();
}

struct BaseFit {
  bool ok = false;
  std::string error;
  ForecastBundle bundle;
};

BaseFit fit_base(const std::string &method, const Eigen::VectorXd &train, int h, int m,
                 const RunConfig &config) {
  BaseFit out;
  try {
    if (method == "avg") out.bundle = forecast_mean(train, h);
    else if (method == "nve") out.bundle = forecast_naive(train, h);
    else if (method == "snv") out.bundle = forecast_snaive(train, h, m);
    else if (method == "ets") {
      int ets_period = m <= config.ets_max_seasonal_period ? m : 1;
      out.bundle = ets::forecast(ets::fit(train, ets_period), h);
    } else if (method == "arm") {
      auto model = arima::fit(train, m, config.arima_max);
      out.bundle = arima::forecast(model, train, h);
    } else {
      throw DataError("unknown method '" + method + "'");
    }
    out.ok = true;
  } catch (const Error &e) {
    out.error = e.what();
  }
  return out;
}

// Residual rows where every node has a finite value (listwise alignment).
Eigen::MatrixXd aligned_residuals(const std::vector<ForecastBundle> &bundles) {
  const Eigen::Index m = static_cast<Eigen::Index>(bundles.size());
  const Eigen::Index T = bundles.empty() ? 0 : bundles[0].residuals.size();
  std::vector<Eigen::Index> rows;
  for (Eigen::Index t = 0; t < T; ++t) {
    bool ok = true;
    for (const auto &b : bundles)
      if (!std::isfinite(b.residuals(t))) { ok = false; break; }
    if (ok) rows.push_back(t);
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m);
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index j = 0; j < m; ++j) out(r, j) = bundles[j].residuals(rows[r]);
  return out;
}

}  // namespace

Dataset load_dataset(const std::string &data_csv, const std::string &hierarchy_csv,
                     int period) {
  auto hierarchy = HierarchySpec::load_csv(hierarchy_csv);
  auto S = build_summing_matrix(hierarchy);
  auto bottom = ingest_csv(data_csv, hierarchy, period);
  auto full = aggregate_frame(bottom, S);
  return Dataset{std::move(hierarchy), std::move(S), std::move(bottom), std::move(full)};
}

void CellCache::put(const std::string &split, const std::string &gran,
                    const std::string &node, const std::string &method,
                    const AccuracyCell &cell) {
  cells_[{split, gran, node, method}] = cell;
}

const AccuracyCell *CellCache::find(const std::string &split, const std::string &gran,
                                    const std::string &node,
                                    const std::string &method) const {
  auto it = cells_.find({split, gran, node, method});
  return it == cells_.end() ? nullptr : &it->second;
}

void CellCache::load(const std::string &path) {
  if (!std::filesystem::exists(path)) return;
  auto t = csv::read_file(path);
  if (t.header != std::vector<std::string>{"split", "granularity", "node_id", "method",
                                           "mase"})
    return;  // unknown layout; start fresh
  for (const auto &row : t.rows) {
    if (row.size() != 5) continue;
    AccuracyCell cell;
    if (row[4].rfind("NA:", 0) == 0) {
      cell.ok = false;
      cell.reason = row[4].substr(3);
    } else {
      try {
        cell.value = std::stod(row[4]);
        cell.ok = true;
      } catch (...) {
        continue;
      }
    }
    put(row[0], row[1], row[2], row[3], cell);
  }
}

void CellCache::save(const std::string &path, const std::string &config_hash) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write cache file " + path);
  out << "# config_hash=" << config_hash << "\n";
  out << "split,granularity,node_id,method,mase\n";
  for (const auto &[key, cell] : cells_) {
    out << key[0] << ',' << key[1] << ',' << key[2] << ',' << key[3] << ',';
    if (cell.ok) out << csv::format_double(cell.value);
    else out << "NA:" << cell.reason;
    out << "\n";
  }
}

AccuracyTable run_spatial(const Dataset &ds, const SplitSpec &split_spec,
                          const std::string &granularity, const RunConfig &config,
                          CellCache *cache) {
  const int period = ds.full.period();
  const int k = temporal::factor_for_tag(granularity, period);
  const int m_g = period / k;

  auto [train, test] = split(ds.full, split_spec);
  const auto &nodes = ds.S.row_order;
  const int n_nodes = static_cast<int>(nodes.size());

  AccuracyTable table;
  table.split_name = split_spec.name;
  table.granularity = granularity;

  auto cached = [&](const std::string &node, const std::string &method) -> const AccuracyCell * {
    if (!cache) return nullptr;
    return cache->find(split_spec.name, granularity, node, method);
  };
  auto needs = [&](const std::string &node, const std::string &method) {
    const AccuracyCell *c = cached(node, method);
    return !(c && c->ok);
  };
  auto emit = [&](const std::string &node, const std::string &method,
                  const AccuracyCell &cell) {
    if (cell.ok) table.set(node, method, cell.value);
    else table.flag(node, method, cell.reason);
    if (cache) cache->put(split_spec.name, granularity, node, method, cell);
  };

  // Aggregate every node's train/test series once.
  std::vector<Eigen::VectorXd> train_g(n_nodes), test_g(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    train_g[i] = temporal_aggregate(train.col(nodes[i]), k);
    test_g[i] = temporal_aggregate(test.col(nodes[i]), k);
  }
  const int h = static_cast<int>(test_g[0].size());

  // Which base families must actually be fit: the family's own column plus
  // any flagged reconciled cell built on it.
  auto family_needed = [&](const std::string &base) {
    for (int i = 0; i < n_nodes; ++i) {
      if (needs(nodes[i], base)) return true;
      for (const auto &tag : kReconTags) {
        std::string col = base == "ets" ? "e" + tag : tag;
        if (needs(nodes[i], col)) return true;
      }
    }
    return false;
  };

  std::map<std::string, std::vector<BaseFit>> family_fits;
  std::vector<std::pair<std::string, int>> tasks;  // (method, node index)
  for (const auto &method : kBaseMethods) {
    bool fit_all = (method == "arm" || method == "ets") && family_needed(method);
    std::vector<int> node_list;
    for (int i = 0; i < n_nodes; ++i)
      if (fit_all || needs(nodes[i], method)) node_list.push_back(i);
    if (!node_list.empty()) family_fits[method].resize(n_nodes);
    for (int i : node_list) tasks.emplace_back(method, i);
  }

  parallel_for(static_cast<int>(tasks.size()), config.jobs, [&](int ti) {
    const auto &[method, i] = tasks[ti];
    family_fits[method][i] = fit_base(method, train_g[i], h, m_g, config);
  });

  // Score the base columns.
  for (const auto &method : kBaseMethods) {
    for (int i = 0; i < n_nodes; ++i) {
      const AccuracyCell *c = cached(nodes[i], method);
      if (c && c->ok) { emit(nodes[i], method, *c); continue; }
      auto it = family_fits.find(method);
      if (it == family_fits.end() || !(it->second[i].ok || !it->second[i].error.empty())) {
        // not fit this round; keep the flagged cache entry if one exists
        if (c) emit(nodes[i], method, *c);
        continue;
      }
      const BaseFit &f = it->second[i];
      AccuracyCell cell;
      if (!f.ok) {
        cell.ok = false;
        cell.reason = f.error;
      } else {
        try {
          cell.value = mase(test_g[i], f.bundle.point, train_g[i], m_g);
          cell.ok = true;
        } catch (const Error &e) {
          cell.ok = false;
          cell.reason = e.what();
        }
      }
      emit(nodes[i], method, cell);
    }
  }

  // Reconciled columns for the ARIMA and ETS families.
  for (const auto &base : {std::string("arm"), std::string("ets")}) {
    const std::string prefix = base == "ets" ? "e" : "";
    auto flag_family = [&](const std::string &reason) {
      for (const auto &tag : kReconTags)
        for (int i = 0; i < n_nodes; ++i) {
          std::string col = prefix + tag;
          const AccuracyCell *c = cached(nodes[i], col);
          if (c && c->ok) emit(nodes[i], col, *c);
          else emit(nodes[i], col, AccuracyCell{false, 0.0, reason});
        }
    };

    auto it = family_fits.find(base);
    if (it == family_fits.end()) {
      // every reconciled cell of this family was cached ok
      for (const auto &tag : kReconTags)
        for (int i = 0; i < n_nodes; ++i) {
          const AccuracyCell *c = cached(nodes[i], prefix + tag);
          if (c) emit(nodes[i], prefix + tag, *c);
        }
      continue;
    }

    const auto &fits = it->second;
    std::string base_failure;
    for (int i = 0; i < n_nodes && base_failure.empty(); ++i)
      if (!fits[i].ok) base_failure = "base " + base + " failed for " + nodes[i] + ": " + fits[i].error;
    if (!base_failure.empty()) {
      flag_family(base_failure);
      continue;
    }

    Eigen::MatrixXd base_points(h, n_nodes);
    std::vector<ForecastBundle> bundles;
    bundles.reserve(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      base_points.col(i) = fits[i].bundle.point;
      bundles.push_back(fits[i].bundle);
    }
    Eigen::MatrixXd resid = aligned_residuals(bundles);

    for (const auto &tag : kReconTags) {
      const std::string col = prefix + tag;
      bool any_needed = false;
      for (int i = 0; i < n_nodes; ++i)
        if (needs(nodes[i], col)) { any_needed = true; break; }
      if (!any_needed) {
        for (int i = 0; i < n_nodes; ++i) {
          const AccuracyCell *c = cached(nodes[i], col);
          if (c) emit(nodes[i], col, *c);
        }
        continue;
      }

      Eigen::MatrixXd recon;
      std::string failure;
      try {
        if (tag == "bup") {
          recon = bottom_up(ds.S, base_points).point;
        } else if (tag == "top") {
          Eigen::MatrixXd bottom_train(train_g[0].size(), ds.S.cols());
          for (Eigen::Index j = 0; j < ds.S.cols(); ++j)
            bottom_train.col(j) = train_g[n_nodes - ds.S.cols() + j];
          SeriesFrame btf(ds.bottom.labels(), bottom_train, std::max(1, m_g),
                          CalendarPos{0, 1});
          Eigen::VectorXd props = compute_proportions(btf, ds.S, config.top_down);
          recon = top_down(ds.S, base_points.col(0), props).point;
        } else {
          WeightKind kind = parse_weight_kind(tag);
          if (kind == WeightKind::SampleCov && resid.rows() <= ds.S.rows())
            throw NumericError("cov skipped: residual rows (" +
                               std::to_string(resid.rows()) + ") <= nodes (" +
                               std::to_string(ds.S.rows()) + ")");
          WeightSpec W = estimate_W(resid, ds.S, kind);
          recon = mint_reconcile(ds.S, W, base_points).point;
        }
      } catch (const Error &e) {
        failure = e.what();
      }

      for (int i = 0; i < n_nodes; ++i) {
        const AccuracyCell *c = cached(nodes[i], col);
        if (c && c->ok) { emit(nodes[i], col, *c); continue; }
        AccuracyCell cell;
        if (!failure.empty()) {
          cell.ok = false;
          cell.reason = failure;
        } else {
          try {
            cell.value = mase(test_g[i], recon.col(i), train_g[i], m_g);
            cell.ok = true;
          } catch (const Error &e) {
            cell.ok = false;
            cell.reason = e.what();
          }
        }
        emit(nodes[i], col, cell);
      }
    }
  }

  return table;
}

AccuracyTable run_temporal(const Dataset &ds, const std::string &node,
                           const SplitSpec &split_spec, const RunConfig &config) {
  if (!ds.full.has(node)) throw DataError("unknown node " + node);
  const int period = ds.full.period();
  auto [train, test] = split(ds.full, split_spec);
  Eigen::VectorXd train_series = train.col(node);
  Eigen::VectorXd test_series = test.col(node);

  temporal::ThiefOptions opts;
  opts.w_kind = config.temporal_weights;
  opts.max_orders = config.arima_max;
  opts.ets_max_seasonal_period = config.ets_max_seasonal_period;

  AccuracyTable table;
  table.split_name = split_spec.name;
  table.granularity = "temporal:" + node;

  for (const auto &method : kBaseMethods) {
    temporal::ThiefResult thief;
    std::string failure;
    try {
      thief = temporal::thief_forecast(train_series, period, method, opts);
    } catch (const Error &e) {
      failure = e.what();
    }
    for (int k : failure.empty() ? thief.hierarchy.factors : temporal::default_factors(period)) {
      std::string row = temporal::granularity_label(k, period);
      std::string base_col = method;
      std::string recon_col = "h" + method;
      if (!failure.empty()) {
        table.flag(row, base_col, failure);
        table.flag(row, recon_col, failure);
        continue;
      }
      Eigen::VectorXd train_k = temporal_aggregate(train_series, k);
      Eigen::VectorXd test_k = temporal_aggregate(test_series, k);
      Eigen::Index L = std::min<Eigen::Index>(test_k.size(), period / k);
      if (L < 1) {
        table.flag(row, base_col, "test window shorter than one block");
        table.flag(row, recon_col, "test window shorter than one block");
        continue;
      }
      Eigen::VectorXd actual = test_k.head(L);
      int m_k = period / k;
      try {
        table.set(row, base_col,
                  mase(actual, thief.base_level(k).head(L), train_k, m_k));
      } catch (const Error &e) {
        table.flag(row, base_col, e.what());
      }
      try {
        table.set(row, recon_col,
                  mase(actual, thief.reconciled_level(k).head(L), train_k, m_k));
      } catch (const Error &e) {
        table.flag(row, recon_col, e.what());
      }
    }
  }
  return table;
}

void write_long_csv(const std::vector<AccuracyTable> &tables, const RunConfig &config,
                    const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "# config_hash=" << config.hash() << "\n";
  out << "split,granularity,node_id,method,mase\n";
  for (const auto &t : tables) {
    for (const auto &node : t.nodes()) {
      for (const auto &method : t.methods()) {
        const AccuracyCell *c = t.find(node, method);
        if (!c) continue;
        out << t.split_name << ',' << t.granularity << ',' << node << ',' << method << ',';
        if (c->ok) out << csv::format_double(c->value);
        else out << "NA:" << c->reason;
        out << "\n";
      }
    }
  }
}

void write_wide_csv(const AccuracyTable &table, const RunConfig &config,
                    const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "# config_hash=" << config.hash() << " split=" << table.split_name
      << " granularity=" << table.granularity << "\n";
  auto methods = table.methods();
  out << "node_id";
  for (const auto &m : methods) out << ',' << m;
  out << "\n";
  for (const auto &node : table.nodes()) {
    out << node;
    for (const auto &m : methods) {
      const AccuracyCell *c = table.find(node, m);
      out << ',';
      if (c && c->ok) out << csv::format_double(c->value);
      else if (c) out << "NA:" << c->reason;
    }
    out << "\n";
  }
}

std::string pivot_long_to_wide(const std::string &long_csv_path, const std::string &split,
                               const std::string &granularity) {
  auto t = csv::read_file(long_csv_path);
  if (t.header != std::vector<std::string>{"split", "granularity", "node_id", "method",
                                           "mase"})
    throw DataError("pivot: input is not a long accuracy CSV");
  AccuracyTable table;
  table.split_name = split;
  table.granularity = granularity;
  for (const auto &row : t.rows) {
    if (row.size() != 5) continue;
    if (!split.empty() && row[0] != split) continue;
    if (!granularity.empty() && row[1] != granularity) continue;
    if (row[4].rfind("NA:", 0) == 0) table.flag(row[2], row[3], row[4].substr(3));
    else table.set(row[2], row[3], std::stod(row[4]));
  }
  std::ostringstream out;
  auto methods = table.methods();
  out << "node_id";
  for (const auto &m : methods) out << ',' << m;
  out << "\n";
  for (const auto &node : table.nodes()) {
    out << node;
    for (const auto &m : methods) {
      const AccuracyCell *c = table.find(node, m);
      out << ',';
      if (c && c->ok) out << csv::format_double(c->value);
      else if (c) out << "NA:" << c->reason;
    }
    out << "\n";
  }
  return out.str();
}

std::vector<AccuracyTable> evaluate_grid(const Dataset &ds,
                                         const std::vector<SplitSpec> &splits,
                                         const RunConfig &config,
                                         const std::string &out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string cache_path = out_dir + "/cache_" + config.hash() + ".csv";
  CellCache cache;
  cache.load(cache_path);

  std::vector<AccuracyTable> tables;
  for (const auto &sp : splits)
    for (const auto &g : config.granularities)
      tables.push_back(run_spatial(ds, sp, g, config, &cache));

  cache.save(cache_path, config.hash());
  write_long_csv(tables, config, out_dir + "/accuracy_long.csv");
  for (const auto &t : tables)
    write_wide_csv(t, config, out_dir + "/wide_" + t.split_name + "_" + t.granularity + ".csv");
  return tables;
}

void run_features(const Dataset &ds, const std::vector<AccuracyTable> &tables,
                  const std::vector<SplitSpec> &splits, const RunConfig &config,
                  const std::string &out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const int period = ds.full.period();

  std::map<std::string, const SplitSpec *> split_by_name;
  for (const auto &sp : splits) split_by_name[sp.name] = &sp;

  // Group nodes by hierarchy level (aggregate levels stay out of the root
  // group; the paper plots province- and district-level panels).
  std::map<int, std::vector<std::string>> levels;
  for (const auto &n : ds.hierarchy.nodes())
    if (n.level > 0) levels[n.level].push_back(n.id);

  std::ofstream feat(out_dir + "/features.csv");
  if (!feat) throw DataError("cannot write features.csv");
  feat << "# config_hash=" << config.hash() << "\n";
  feat << "node_id,granularity";
  for (const auto &name : features::FeatureVector::names()) feat << ',' << name;
  feat << "\n";

  for (const auto &gran : config.feature_granularities) {
    const int k = temporal::factor_for_tag(gran, period);
    const int m_g = period / k;

    for (const auto &[level, nodes] : levels) {
      // Best (split, method) per node at this granularity across all tables.
      struct Choice {
        std::string method, split;
        double value = kNaN;
        bool ok = false;
      };
      std::map<std::string, Choice> choice;
      for (const auto &t : tables) {
        if (t.granularity != gran) continue;
        auto best = best_method(t);
        for (const auto &node : nodes) {
          auto it = best.find(node);
          if (it == best.end()) continue;
          auto &c = choice[node];
          if (!c.ok || it->second.value < c.value) {
            c = Choice{it->second.method, t.split_name, it->second.value, true};
          }
        }
      }

      std::vector<std::string> group_nodes;
      std::vector<features::FeatureVector> fvs;
      for (const auto &node : nodes) {
        auto it = choice.find(node);
        if (it == choice.end() || !it->second.ok) continue;
        const SplitSpec *sp = split_by_name.at(it->second.split);
        auto windows = split(ds.full, *sp);
        Eigen::VectorXd series = temporal_aggregate(windows.first.col(node), k);
        fvs.push_back(features::compute_features(series, std::max(1, m_g)));
        group_nodes.push_back(node);
      }
      if (group_nodes.empty()) continue;

      for (size_t i = 0; i < group_nodes.size(); ++i) {
        feat << group_nodes[i] << ',' << gran;
        for (double v : fvs[i].values())
          feat << ',' << (std::isfinite(v) ? csv::format_double(v) : "NA");
        feat << "\n";
      }

      // PCA over the features present for every node in the group.
      const auto &names = features::FeatureVector::names();
      std::vector<int> cols;
      for (size_t j = 0; j < names.size(); ++j) {
        bool all = true;
        for (const auto &fv : fvs)
          if (!std::isfinite(fv.values()[j])) { all = false; break; }
        if (all) cols.push_back(static_cast<int>(j));
      }
      if (group_nodes.size() < 2 || cols.size() < 2) continue;

      Eigen::MatrixXd X(static_cast<Eigen::Index>(group_nodes.size()),
                        static_cast<Eigen::Index>(cols.size()));
      for (size_t i = 0; i < group_nodes.size(); ++i) {
        auto vals = fvs[i].values();
        for (size_t j = 0; j < cols.size(); ++j)
          X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vals[cols[j]];
      }

      std::string path = out_dir + "/pca_level" + std::to_string(level) + "_" + gran + ".csv";
      std::ofstream out(path);
      if (!out) throw DataError("cannot write " + path);
      out << "# config_hash=" << config.hash() << " level=" << level
          << " granularity=" << gran;
      PcaResult p;
      try {
        p = pca(X);
      } catch (const Error &e) {
        out << " pca_error=" << e.what() << "\n";
        continue;
      }
      out << " dropped_feature_columns=";
      for (size_t j = 0; j < p.dropped_columns.size(); ++j)
        out << (j ? ";" : "") << names[cols[p.dropped_columns[j]]];
      out << "\n";
      out << "node_id,pc1,pc2,best_method,training_set,trend_strength,seasonal_strength,"
             "stability,lumpiness\n";
      for (size_t i = 0; i < group_nodes.size(); ++i) {
        const auto &c = choice.at(group_nodes[i]);
        double pc1 = p.scores(static_cast<Eigen::Index>(i), 0);
        double pc2 = p.scores.cols() > 1 ? p.scores(static_cast<Eigen::Index>(i), 1) : 0.0;
        auto fmt = [](double v) {
          return std::isfinite(v) ? csv::format_double(v) : std::string("NA");
        };
        out << group_nodes[i] << ',' << csv::format_double(pc1) << ','
            << csv::format_double(pc2) << ',' << c.method << ',' << c.split << ','
            << fmt(fvs[i].trend_strength) << ',' << fmt(fvs[i].seasonal_strength) << ','
            << fmt(fvs[i].stability) << ',' << fmt(fvs[i].lumpiness) << "\n";
      }
    }
  }
}

}  // namespace hts::runner
