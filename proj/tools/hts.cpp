// Command-line front end for the hierarchical forecasting engine.
//
// Exit codes: 0 success, 1 data/numeric error, 2 usage error.
// Subcommand stdout is machine-parseable CSV; diagnostics go to stderr.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hts/arima.hpp"
#include "hts/csv.hpp"
#include "hts/errors.hpp"
#include "hts/ets.hpp"
#include "hts/frame.hpp"
#include "hts/runner.hpp"
#include "hts/temporal.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string data, hierarchy, store, splits_file, config_file;
  int period = 0;  // 0 = take from config
  int jobs = 0;
};

void add_common(CLI::App *cmd, CommonArgs &args, bool need_splits) {
  cmd->add_option("--data", args.data, "data CSV (year,week,<leaf>...)");
  cmd->add_option("--hierarchy", args.hierarchy, "hierarchy CSV (node_id,level,parent)");
  cmd->add_option("--store", args.store, "store directory written by `ingest`");
  cmd->add_option("--config", args.config_file, "key=value config file");
  cmd->add_option("--period", args.period, "observations per year (default 52)");
  cmd->add_option("--jobs", args.jobs, "worker threads");
  if (need_splits) cmd->add_option("--splits", args.splits_file, "split spec CSV");
}

hts::RunConfig make_config(const CommonArgs &args) {
  hts::RunConfig config;
  if (!args.config_file.empty()) config.load_file(args.config_file);
  if (args.period > 0) config.period = args.period;
  if (args.jobs > 0) config.jobs = args.jobs;
  return config;
}

hts::runner::Dataset load(const CommonArgs &args, const hts::RunConfig &config) {
  std::string data = args.data, hier = args.hierarchy;
  if (!args.store.empty()) {
    if (data.empty()) data = args.store + "/frame.csv";
    if (hier.empty()) hier = args.store + "/hierarchy.csv";
  }
  if (data.empty() || hier.empty())
    throw UsageError("need --data and --hierarchy (or --store)");
  return hts::runner::load_dataset(data, hier, config.period);
}

hts::SplitSpec find_split(const CommonArgs &args, const std::string &name) {
  if (args.splits_file.empty()) throw UsageError("need --splits");
  for (const auto &s : hts::load_split_specs(args.splits_file))
    if (s.name == name) return s;
  throw UsageError("unknown split '" + name + "'");
}

bool known_method(const std::string &m) {
  for (const auto &k : hts::method_order())
    if (k == m) return true;
  return false;
}

int run(int argc, char **argv) {
  CLI::App app{"hierarchical time-series forecasting engine"};
  app.require_subcommand(1);

  CommonArgs args;

  // ingest
  auto *ingest = app.add_subcommand("ingest", "validate a dataset and cache it");
  std::string ingest_out;
  add_common(ingest, args, false);
  ingest->add_option("--out", ingest_out, "store directory")->required();

  // forecast
  auto *fc = app.add_subcommand("forecast", "point forecasts for one node");
  std::string fc_node, fc_method, fc_split, fc_gran = "w";
  add_common(fc, args, true);
  fc->add_option("--node", fc_node)->required();
  fc->add_option("--method", fc_method)->required();
  fc->add_option("--split", fc_split)->required();
  fc->add_option("--granularity", fc_gran);

  // reconcile
  auto *rc = app.add_subcommand("reconcile", "coherent forecasts for all nodes");
  std::string rc_base, rc_weights, rc_split, rc_gran = "w";
  add_common(rc, args, true);
  rc->add_option("--base", rc_base, "arm|ets")->required();
  rc->add_option("--weights", rc_weights, "ols|var|stc|cov|mit|bup|top")->required();
  rc->add_option("--split", rc_split)->required();
  rc->add_option("--granularity", rc_gran);

  // evaluate
  auto *ev = app.add_subcommand("evaluate", "full accuracy grid");
  std::string ev_out, ev_grans;
  add_common(ev, args, true);
  ev->add_option("--out", ev_out)->required();
  ev->add_option("--granularities", ev_grans, "comma list, e.g. w,q,a");

  // temporal
  auto *tp = app.add_subcommand("temporal", "thief workflow for one node");
  std::string tp_node, tp_split;
  add_common(tp, args, true);
  tp->add_option("--node", tp_node)->required();
  tp->add_option("--split", tp_split)->required();

  // features / pca
  auto *ft = app.add_subcommand("features", "feature extraction outputs");
  std::string ft_out;
  add_common(ft, args, true);
  ft->add_option("--out", ft_out)->required();

  auto *pc = app.add_subcommand("pca", "PCA coordinate outputs");
  std::string pc_out;
  add_common(pc, args, true);
  pc->add_option("--out", pc_out)->required();

  // pivot
  auto *pv = app.add_subcommand("pivot", "long accuracy CSV to wide layout");
  std::string pv_in, pv_split, pv_gran;
  pv->add_option("--in", pv_in)->required();
  pv->add_option("--split", pv_split);
  pv->add_option("--granularity", pv_gran);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  auto config = make_config(args);

  if (app.got_subcommand(ingest)) {
    auto ds = load(args, config);
    namespace fs = std::filesystem;
    fs::create_directories(ingest_out);
    fs::copy_file(args.data.empty() ? args.store + "/frame.csv" : args.data,
                  ingest_out + "/frame.csv", fs::copy_options::overwrite_existing);
    fs::copy_file(args.hierarchy.empty() ? args.store + "/hierarchy.csv" : args.hierarchy,
                  ingest_out + "/hierarchy.csv", fs::copy_options::overwrite_existing);
    std::cout << "nodes," << ds.S.rows() << "\n"
              << "leaves," << ds.S.cols() << "\n"
              << "rows," << ds.bottom.rows() << "\n"
              << "start," << hts::calendar_token(ds.bottom.start()) << "\n"
              << "end," << hts::calendar_token(ds.bottom.pos_at(ds.bottom.rows() - 1))
              << "\n";
    return 0;
  }

  if (app.got_subcommand(fc)) {
    if (!known_method(fc_method) &&
        !(fc_method.size() > 1 && fc_method[0] == 'h' && known_method(fc_method.substr(1))))
      throw UsageError("unknown method '" + fc_method + "'");
    auto ds = load(args, config);
    if (!ds.full.has(fc_node)) throw UsageError("unknown node '" + fc_node + "'");
    auto sp = find_split(args, fc_split);
    auto windows = hts::split(ds.full, sp);
    int k = hts::temporal::factor_for_tag(fc_gran, config.period);
    Eigen::VectorXd train = hts::temporal_aggregate(windows.first.col(fc_node), k);
    Eigen::VectorXd test = hts::temporal_aggregate(windows.second.col(fc_node), k);
    int h = static_cast<int>(test.size());
    int m_g = config.period / k;

    hts::ForecastBundle bundle;
    if (fc_method == "avg") bundle = hts::forecast_mean(train, h);
    else if (fc_method == "nve") bundle = hts::forecast_naive(train, h);
    else if (fc_method == "snv") bundle = hts::forecast_snaive(train, h, m_g);
    else if (fc_method == "ets") {
      int p = m_g <= config.ets_max_seasonal_period ? m_g : 1;
      bundle = hts::ets::forecast(hts::ets::fit(train, p), h);
    } else if (fc_method == "arm") {
      auto model = hts::arima::fit(train, m_g, config.arima_max);
      bundle = hts::arima::forecast(model, train, h);
    } else {
      throw UsageError("method '" + fc_method + "' is not a base method");
    }
    std::cout << "step,forecast\n";
    for (int j = 0; j < h; ++j)
      std::cout << j + 1 << ',' << hts::csv::format_double(bundle.point(j)) << "\n";
    std::cerr << bundle.model_meta << "\n";
    return 0;
  }

  if (app.got_subcommand(rc)) {
    if (rc_base != "arm" && rc_base != "ets") throw UsageError("--base must be arm or ets");
    bool is_mint = rc_weights != "bup" && rc_weights != "top";
    hts::WeightKind kind = hts::WeightKind::Ols;
    if (is_mint) {
      try {
        kind = hts::parse_weight_kind(rc_weights);
      } catch (const hts::Error &) {
        throw UsageError("unknown weights '" + rc_weights + "'");
      }
    }
    auto ds = load(args, config);
    auto sp = find_split(args, rc_split);
    auto windows = hts::split(ds.full, sp);
    int k = hts::temporal::factor_for_tag(rc_gran, config.period);
    int m_g = config.period / k;
    const auto &nodes = ds.S.row_order;

    Eigen::VectorXd test0 = hts::temporal_aggregate(windows.second.col(nodes[0]), k);
    int h = static_cast<int>(test0.size());
    std::vector<hts::ForecastBundle> bundles;
    Eigen::MatrixXd base(h, static_cast<Eigen::Index>(nodes.size()));
    for (size_t i = 0; i < nodes.size(); ++i) {
      Eigen::VectorXd train = hts::temporal_aggregate(windows.first.col(nodes[i]), k);
      hts::ForecastBundle b;
      if (rc_base == "ets") {
        int p = m_g <= config.ets_max_seasonal_period ? m_g : 1;
        b = hts::ets::forecast(hts::ets::fit(train, p), h);
      } else {
        b = hts::arima::forecast(hts::arima::fit(train, m_g, config.arima_max), train, h);
      }
      base.col(static_cast<Eigen::Index>(i)) = b.point;
      bundles.push_back(std::move(b));
    }

    Eigen::MatrixXd recon;
    if (rc_weights == "bup") {
      recon = hts::bottom_up(ds.S, base).point;
    } else if (rc_weights == "top") {
      Eigen::MatrixXd bt(hts::temporal_aggregate(windows.first.col(nodes[0]), k).size(),
                         ds.S.cols());
      for (Eigen::Index j = 0; j < ds.S.cols(); ++j)
        bt.col(j) = hts::temporal_aggregate(
            windows.first.col(nodes[nodes.size() - ds.S.cols() + j]), k);
      hts::SeriesFrame btf(ds.bottom.labels(), bt, std::max(1, m_g), hts::CalendarPos{0, 1});
      auto props = hts::compute_proportions(btf, ds.S, config.top_down);
      recon = hts::top_down(ds.S, base.col(0), props).point;
    } else {
      std::vector<hts::ForecastBundle> all = bundles;
      Eigen::Index T = all[0].residuals.size();
      std::vector<Eigen::Index> rows;
      for (Eigen::Index t = 0; t < T; ++t) {
        bool ok = true;
        for (auto &b : all)
          if (!std::isfinite(b.residuals(t))) { ok = false; break; }
        if (ok) rows.push_back(t);
      }
      Eigen::MatrixXd resid(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(nodes.size()));
      for (Eigen::Index r = 0; r < resid.rows(); ++r)
        for (size_t j = 0; j < nodes.size(); ++j)
          resid(r, static_cast<Eigen::Index>(j)) = all[j].residuals(rows[r]);
      auto W = hts::estimate_W(resid, ds.S, kind);
      recon = hts::mint_reconcile(ds.S, W, base).point;
    }

    std::cout << "node_id,step,forecast\n";
    for (size_t i = 0; i < nodes.size(); ++i)
      for (int j = 0; j < h; ++j)
        std::cout << nodes[i] << ',' << j + 1 << ','
                  << hts::csv::format_double(recon(j, static_cast<Eigen::Index>(i))) << "\n";
    return 0;
  }

  if (app.got_subcommand(ev)) {
    if (!ev_grans.empty()) config.set("granularities", ev_grans);
    auto ds = load(args, config);
    if (args.splits_file.empty()) throw UsageError("need --splits");
    auto splits = hts::load_split_specs(args.splits_file);
    auto tables = hts::runner::evaluate_grid(ds, splits, config, ev_out);
    std::cerr << "wrote " << tables.size() << " tables to " << ev_out << "\n";
    std::cout << "tables," << tables.size() << "\n";
    return 0;
  }

  if (app.got_subcommand(tp)) {
    auto ds = load(args, config);
    if (!ds.full.has(tp_node)) throw UsageError("unknown node '" + tp_node + "'");
    auto sp = find_split(args, tp_split);
    auto table = hts::runner::run_temporal(ds, tp_node, sp, config);
    std::cout << "series";
    for (const auto &m : table.methods()) std::cout << ',' << m;
    std::cout << "\n";
    for (const auto &row : table.nodes()) {
      std::cout << row;
      for (const auto &m : table.methods()) {
        const hts::AccuracyCell *c = table.find(row, m);
        std::cout << ',';
        if (c && c->ok) std::cout << hts::csv::format_double(c->value);
        else if (c) std::cout << "NA:" << c->reason;
      }
      std::cout << "\n";
    }
    return 0;
  }

  if (app.got_subcommand(ft) || app.got_subcommand(pc)) {
    std::string out_dir = app.got_subcommand(ft) ? ft_out : pc_out;
    auto ds = load(args, config);
    if (args.splits_file.empty()) throw UsageError("need --splits");
    auto splits = hts::load_split_specs(args.splits_file);
    auto tables = hts::runner::evaluate_grid(ds, splits, config, out_dir);
    hts::runner::run_features(ds, tables, splits, config, out_dir);
    std::cerr << "features and PCA written to " << out_dir << "\n";
    std::cout << "ok,1\n";
    return 0;
  }

  if (app.got_subcommand(pv)) {
    std::cout << hts::runner::pivot_long_to_wide(pv_in, pv_split, pv_gran);
    return 0;
  }

  throw UsageError("no subcommand");
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const hts::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
