// Acceptance suite: one pass/fail line per criterion, exit code = failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "hts/arima.hpp"
#include "hts/ets.hpp"
#include "hts/evaluate.hpp"
#include "hts/features.hpp"
#include "hts/forecast.hpp"
#include "hts/frame.hpp"
#include "hts/hierarchy.hpp"
#include "hts/pca.hpp"
#include "hts/reconcile.hpp"
#include "hts/runner.hpp"
#include "hts/stats.hpp"
#include "hts/temporal.hpp"

#include "helpers.hpp"

using namespace hts;
namespace fs = std::filesystem;

namespace {

const std::string kData = HTS_DATA_DIR;
const std::string kGolden = HTS_GOLDEN_DIR;
const std::string kCli = HTS_CLI_PATH;

int g_failures = 0;

void report(int number, bool pass, const std::string &what) {
  std::printf("criterion %2d [%s] %s\n", number, pass ? "PASS" : "FAIL", what.c_str());
  if (!pass) ++g_failures;
}

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string &msg) {
    if (!cond && ok) {
      ok = false;
      detail = msg;
    }
  }
};

double max_rel_diff(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
  return (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
}

Eigen::MatrixXd random_residuals(stats::Rng &rng, Eigen::Index n, Eigen::Index m) {
  Eigen::MatrixXd e(n, m);
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index j = 0; j < m; ++j) e(t, j) = rng.normal() * (1.0 + 0.1 * (j % 7));
  return e;
}

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- criterion 1: coherence of every reconciliation method on random trees ---
void criterion_1() {
  auto start = std::chrono::steady_clock::now();
  stats::Rng rng(1001);
  Check c;
  for (int trial = 0; trial < 200 && c.ok; ++trial) {
    auto spec = test_helpers::random_tree(rng, 4, 64);
    auto S = build_summing_matrix(spec);
    const Eigen::Index m = S.rows(), mk = S.cols();
    Eigen::MatrixXd base(2, m);
    for (Eigen::Index t = 0; t < 2; ++t)
      for (Eigen::Index j = 0; j < m; ++j) base(t, j) = rng.uniform() * 100.0 - 20.0;
    Eigen::MatrixXd resid = random_residuals(rng, m + 25, m);

    for (auto kind : {WeightKind::Ols, WeightKind::WlsVar, WeightKind::Structural,
                      WeightKind::SampleCov, WeightKind::Shrinkage}) {
      auto W = estimate_W(resid, S, kind);
      auto rep = check_coherence(mint_reconcile(S, W, base).point, S, 1e-8);
      c.expect(rep.pass, "mint " + weight_kind_name(kind) + " incoherent at trial " +
                             std::to_string(trial) + " (worst " +
                             std::to_string(rep.worst.violation) + ")");
    }
    c.expect(check_coherence(bottom_up(S, base).point, S, 1e-8).pass,
             "bottom_up incoherent at trial " + std::to_string(trial));
    Eigen::VectorXd p(mk);
    for (Eigen::Index j = 0; j < mk; ++j) p(j) = 0.05 + rng.uniform();
    p /= p.sum();
    p(mk - 1) = 1.0 - p.head(mk - 1).sum();
    c.expect(check_coherence(top_down(S, base.col(0), p).point, S, 1e-8).pass,
             "top_down incoherent at trial " + std::to_string(trial));
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(secs < 30.0, "runtime " + std::to_string(secs) + "s exceeds 30s");
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "coherence: 200 random trees x 7 methods at 1e-8 (%.1fs)%s%s", secs,
                c.ok ? "" : " -- ", c.detail.c_str());
  report(1, c.ok, buf);
}

// --- criterion 2: coherent inputs are fixed points of mint_reconcile ---
void criterion_2() {
  stats::Rng rng(1002);
  Check c;
  for (int trial = 0; trial < 100 && c.ok; ++trial) {
    auto spec = test_helpers::random_tree(rng, 3, 24);
    auto S = build_summing_matrix(spec);
    Eigen::MatrixXd bottom(3, S.cols());
    for (Eigen::Index t = 0; t < 3; ++t)
      for (Eigen::Index j = 0; j < S.cols(); ++j) bottom(t, j) = rng.uniform() * 50.0;
    Eigen::MatrixXd coherent = aggregate(bottom, S);
    Eigen::MatrixXd resid = random_residuals(rng, S.rows() + 20, S.rows());
    for (auto kind : {WeightKind::Ols, WeightKind::WlsVar, WeightKind::Structural,
                      WeightKind::SampleCov, WeightKind::Shrinkage}) {
      auto W = estimate_W(resid, S, kind);
      auto out = mint_reconcile(S, W, coherent);
      c.expect(max_rel_diff(out.point, coherent) < 1e-9,
               "fixed point violated for " + weight_kind_name(kind) + " at trial " +
                   std::to_string(trial));
    }
  }
  report(2, c.ok,
         "projection identity: coherent inputs fixed at 1e-9, 100 cases" +
             (c.ok ? "" : " -- " + c.detail));
}

// --- criterion 3: scalar weight factors cancel ---
void criterion_3() {
  stats::Rng rng(1003);
  Check c;
  for (int trial = 0; trial < 60 && c.ok; ++trial) {
    auto spec = test_helpers::random_tree(rng, 3, 20);
    auto S = build_summing_matrix(spec);
    Eigen::MatrixXd base(2, S.rows());
    for (Eigen::Index t = 0; t < 2; ++t)
      for (Eigen::Index j = 0; j < S.rows(); ++j) base(t, j) = rng.uniform() * 30.0;
    Eigen::MatrixXd resid = random_residuals(rng, S.rows() + 10, S.rows());
    for (auto kind : {WeightKind::Ols, WeightKind::WlsVar, WeightKind::Shrinkage}) {
      auto W = estimate_W(resid, S, kind);
      auto ref = mint_reconcile(S, W, base);
      double cfac = std::pow(10.0, rng.uniform() * 6.0 - 3.0);  // [1e-3, 1e3]
      WeightSpec Wc = W;
      Wc.matrix = cfac * W.matrix;
      auto scaled = mint_reconcile(S, Wc, base);
      c.expect(max_rel_diff(scaled.point, ref.point) < 1e-10,
               "scale " + std::to_string(cfac) + " changed the projection at trial " +
                   std::to_string(trial));
    }
  }
  report(3, c.ok,
         "k_h cancellation: W -> c*W leaves output unchanged at 1e-10" +
             (c.ok ? "" : " -- " + c.detail));
}

// --- criterion 4: shrinkage intensity behavior ---
void criterion_4() {
  Check c;
  stats::Rng rng(1004);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd e = random_residuals(rng, rng.uniform_int(4, 50), rng.uniform_int(2, 9));
    double l = shrinkage_lambda(e);
    c.expect(l >= 0.0 && l <= 1.0, "lambda out of [0,1]");
  }
  Eigen::MatrixXd corr(16, 2);
  for (int t = 0; t < 16; ++t) {
    double s = t % 2 ? 1.0 : -1.0;
    corr(t, 0) = s;
    corr(t, 1) = 2.5 * s;
  }
  c.expect(shrinkage_lambda(corr) == 0.0, "constant-products case did not give 0");

  stats::Rng rng2(20240615);
  Eigen::MatrixXd indep(200, 5);
  for (Eigen::Index t = 0; t < 200; ++t)
    for (Eigen::Index j = 0; j < 5; ++j) indep(t, j) = rng2.normal();
  double l = shrinkage_lambda(indep);
  c.expect(l >= 0.6, "independent-gaussian lambda " + std::to_string(l) + " < 0.6");

  report(4, c.ok,
         "shrinkage intensity: [0,1] always, 0 for constant products, >= 0.6 for noise" +
             (c.ok ? "" : " -- " + c.detail));
}

// --- criterion 5: MASE oracle agreement ---
void criterion_5() {
  Check c;
  stats::Rng rng(1005);
  for (int trial = 0; trial < 50; ++trial) {
    int m = rng.uniform_int(1, 8);
    int T = m + rng.uniform_int(3, 50);
    int h = rng.uniform_int(1, 15);
    Eigen::VectorXd train(T), actual(h), forecast(h);
    for (int i = 0; i < T; ++i) train(i) = rng.uniform() * 40.0;
    for (int i = 0; i < h; ++i) {
      actual(i) = rng.uniform() * 40.0;
      forecast(i) = rng.uniform() * 40.0;
    }
    // Independent five-line re-implementation.
    double q = 0.0;
    for (int t = m; t < T; ++t) q += std::fabs(train(t) - train(t - m));
    q /= (T - m);
    double mae = 0.0;
    for (int j = 0; j < h; ++j) mae += std::fabs(actual(j) - forecast(j));
    double want = mae / h / q;
    double got = mase(actual, forecast, train, m);
    c.expect(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)),
             "oracle mismatch at trial " + std::to_string(trial));
  }
  Eigen::VectorXd train(4), actual(2), forecast(2);
  train << 1, 2, 3, 4;
  actual << 5, 7;
  forecast << 5, 6;
  c.expect(mase(actual, forecast, train, 1) == 0.5, "hand case != 0.5 exactly");
  report(5, c.ok,
         "MASE: 50 random instances match the 5-line oracle at 1e-12; hand case exact" +
             (c.ok ? "" : " -- " + c.detail));
}

// --- criterion 6: public-dataset golden values (falls back to criterion 9) ---
bool criterion_6() {
  const std::string dengue = kData + "/dengue.csv";
  if (!fs::exists(dengue)) {
    std::printf(
        "criterion  6 [SKIP] dengue dataset not obtainable in this environment; "
        "replaced by the bundled-toy goldens of criterion 9\n");
    return false;  // criterion replaced; criterion 9 carries the weight
  }
  Check c;
  auto ds = runner::load_dataset(dengue, kData + "/sri_lanka_hierarchy.csv", 52);
  RunConfig config;
  auto score = [&](const SplitSpec &sp, const std::string &method) {
    auto table = runner::run_spatial(ds, sp, "w", config);
    const AccuracyCell *cell = table.find("SL", method);
    return cell && cell->ok ? cell->value : std::nan("");
  };
  SplitSpec ts1{"TS1", {2006, 52}, {2019, 52}, {2020, 1}, {2020, 52}};
  SplitSpec ts2{"TS2", {2016, 1}, {2019, 52}, {2020, 1}, {2020, 52}};
  c.expect(std::abs(score(ts1, "avg") - 0.90) <= 0.01, "TS1 SL avg != 0.90 +- 0.01");
  c.expect(std::abs(score(ts1, "snv") - 2.14) <= 0.01, "TS1 SL snv != 2.14 +- 0.01");
  c.expect(std::abs(score(ts1, "nve") - 4.07) <= 0.01, "TS1 SL nve != 4.07 +- 0.01");
  c.expect(std::abs(score(ts2, "avg") - 0.64) <= 0.01, "TS2 SL avg != 0.64 +- 0.01");
  report(6, c.ok, "dengue golden values" + (c.ok ? "" : " -- " + c.detail));
  return true;
}

// --- criterion 7: ETS recursion oracle and alpha=1 limit ---
void criterion_7() {
  Check c;
  Eigen::VectorXd y(5);
  y << 3, 5, 4, 6, 5;
  ets::CandidateSpec spec;  // (A,N,N)
  ets::Params p;
  p.alpha = 0.5;
  ets::State init;
  init.level = 3.0;
  init.seasonal = Eigen::VectorXd::Zero(1);
  auto r = ets::filter(spec, p, init, y, 1);
  c.expect(r.ok, "filter failed");
  double level = 3.0;
  for (Eigen::Index t = 0; t < y.size() && c.ok; ++t) {
    c.expect(std::abs(r.fitted(t) - level) <= 1e-10, "fitted mismatch vs hand recursion");
    level = level + 0.5 * (y(t) - level);
  }
  c.expect(std::abs(r.final_state.level - level) <= 1e-10, "final level mismatch");

  stats::Rng rng(1007);
  Eigen::VectorXd z(30);
  for (int i = 0; i < 30; ++i) z(i) = rng.uniform_int(1, 99);
  ets::Params p1;
  p1.alpha = 1.0;
  ets::State init1;
  init1.level = z(0);
  init1.seasonal = Eigen::VectorXd::Zero(1);
  auto r1 = ets::filter(spec, p1, init1, z, 1);
  auto fc = ets::point_forecast(spec, p1, r1.final_state, 1, 6);
  auto naive = forecast_naive(z, 6);
  c.expect((fc - naive.point).cwiseAbs().maxCoeff() == 0.0, "alpha=1 != naive exactly");

  report(7, c.ok,
         "ETS: (A,N,N) recursion matches the hand oracle at 1e-10; alpha=1 equals naive" +
             (c.ok ? "" : " -- " + c.detail));
}

// --- criterion 8: ARIMA estimation and the random-walk identity ---
void criterion_8() {
  Check c;
  stats::Rng rng(2024);
  Eigen::VectorXd y(500);
  double prev = 10.0;
  for (int t = 0; t < 500; ++t) {
    prev = 10.0 + 0.7 * (prev - 10.0) + rng.normal();
    y(t) = prev;
  }
  auto model = arima::fit_fixed(y, arima::Orders{1, 0, 0, 0, 0, 0, 1});
  c.expect(std::abs(model.phi(0) - 0.7) <= 0.1,
           "phi_hat " + std::to_string(model.phi(0)) + " off by more than 0.1");

  Eigen::VectorXd walk(60);
  double acc = 50.0;
  for (int t = 0; t < 60; ++t) {
    acc += rng.normal();
    walk(t) = acc;
  }
  auto rw = arima::fit_fixed(walk, arima::Orders{0, 1, 0, 0, 0, 0, 1});
  auto fc = arima::forecast(rw, walk, 8);
  for (int j = 0; j < 8; ++j)
    c.expect(fc.point(j) == walk(59), "(0,1,0) forecast differs from the last value");

  report(8, c.ok,
         "ARIMA: AR(1) phi recovered within 0.1; (0,1,0) equals naive exactly" +
             (c.ok ? "" : " -- " + c.detail));
}

// --- criterion 9: toy end-to-end run matches the frozen goldens byte for byte ---
void criterion_9() {
  Check c;
  fs::path out = fs::temp_directory_path() / "hts_acceptance_toy";
  fs::remove_all(out);

  auto start = std::chrono::steady_clock::now();
  std::string cmd = kCli + " evaluate --data " + kData + "/toy_data.csv --hierarchy " +
                    kData + "/toy_hierarchy.csv --splits " + kData +
                    "/toy_splits.csv --config " + kData + "/toy_config.txt --out " +
                    out.string() + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  c.expect(WEXITSTATUS(rc) == 0, "evaluate exited nonzero");
  c.expect(secs < 10.0, "runtime " + std::to_string(secs) + "s exceeds 10s");
  for (const auto &name :
       {"accuracy_long.csv", "wide_TOY1_w.csv", "wide_TOY1_q.csv", "wide_TOY1_a.csv",
        "wide_TOY2_w.csv", "wide_TOY2_q.csv", "wide_TOY2_a.csv"}) {
    std::string got = slurp((out / name).string());
    std::string want = slurp(kGolden + "/" + name);
    c.expect(!want.empty(), std::string("golden missing: ") + name);
    c.expect(got == want, std::string(name) + " differs from the frozen golden");
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "toy evaluate: byte-identical to goldens in %.1fs%s%s",
                secs, c.ok ? "" : " -- ", c.detail.c_str());
  report(9, c.ok, buf);
}

// --- criterion 10: full cross-granularity coherence on the toy dataset ---
void criterion_10() {
  Check c;
  RunConfig config;
  config.load_file(kData + "/toy_config.txt");
  auto ds = runner::load_dataset(kData + "/toy_data.csv", kData + "/toy_hierarchy.csv",
                                 config.period);
  auto splits = load_split_specs(kData + "/toy_splits.csv");
  auto windows = split(ds.full, splits[0]);

  for (const auto &method : {"avg", "nve", "snv", "ets", "arm"}) {
    temporal::ThiefOptions opts;
    opts.w_kind = config.temporal_weights;
    opts.max_orders = config.arima_max;
    auto res = temporal::thief_forecast(windows.first.col("TOT"), config.period, method, opts);
    Eigen::VectorXd base_level = res.reconciled_level(1);
    for (int k : res.hierarchy.factors) {
      Eigen::VectorXd level = res.reconciled_level(k);
      for (Eigen::Index j = 0; j < level.size(); ++j) {
        double block = base_level.segment(j * k, k).sum();
        c.expect(std::abs(level(j) - block) <= 1e-8 * (1.0 + std::abs(block)),
                 std::string(method) + ": factor " + std::to_string(k) +
                     " block sum mismatch");
      }
    }
  }

  auto table = runner::run_temporal(ds, "TOT", splits[0], config);
  auto rows = table.nodes();
  c.expect(rows.size() == 6, "expected six granularity rows, got " +
                                 std::to_string(rows.size()));
  const char *expected[] = {"Annual", "Semi-annual", "Monthly",
                            "Quarterly", "Bi-Weekly", "Weekly"};
  for (int i = 0; i < 6 && c.ok; ++i)
    c.expect(rows[static_cast<size_t>(i)] == expected[i],
             "row " + std::to_string(i) + " is " + rows[static_cast<size_t>(i)]);

  report(10, c.ok,
         "temporal coherence: every level equals its block sums; report has all six rows" +
             (c.ok ? "" : " -- " + c.detail));
}

// --- criterion 11: feature invariants over 1000 random series ---
void criterion_11() {
  Check c;
  stats::Rng rng(1011);
  for (int trial = 0; trial < 1000 && c.ok; ++trial) {
    int m = rng.uniform_int(2, 8);
    int n = 3 * m + rng.uniform_int(0, 90);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = rng.uniform_int(0, 1023) / 64.0;

    auto f = features::compute_features(y, m);
    c.expect(f.trend_strength >= 0.0 && f.trend_strength <= 1.0, "trend_strength range");
    if (!std::isnan(f.seasonal_strength))
      c.expect(f.seasonal_strength >= 0.0 && f.seasonal_strength <= 1.0,
               "seasonal_strength range");

    double a = 2.0 + (trial % 5);
    double s1 = features::stability(y, m), l1 = features::lumpiness(y, m);
    if (!std::isnan(s1)) {
      double sa = features::stability(a * y, m);
      double la = features::lumpiness(a * y, m);
      c.expect(std::abs(sa - a * a * s1) <= 1e-8 * (1.0 + std::abs(sa)),
               "stability scaling law");
      c.expect(std::abs(la - a * a * a * a * l1) <= 1e-8 * (1.0 + std::abs(la)),
               "lumpiness scaling law");
    }

    Eigen::VectorXd z = 2.0 * y.array() + 3.0;  // exact dyadic affine map
    c.expect(features::crossing_points(z) == features::crossing_points(y),
             "crossing_points affine invariance");
    c.expect(features::flat_spots(z) == features::flat_spots(y),
             "flat_spots affine invariance");
  }

  Eigen::VectorXd constant = Eigen::VectorXd::Constant(20, 4.0);
  auto f = features::compute_features(constant, 4);
  c.expect(f.flat_spots == 20.0, "constant flat_spots != T");
  c.expect(f.stability == 0.0 && f.lumpiness == 0.0, "constant stability/lumpiness != 0");

  report(11, c.ok,
         "features: strengths in [0,1]; a^2/a^4 scaling; affine-invariant counts; "
         "constant degenerates" +
             (c.ok ? "" : " -- " + c.detail));
}

// --- criterion 12: PCA contract ---
void criterion_12() {
  Check c;
  stats::Rng rng(1012);
  Eigen::MatrixXd X(60, 7);
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 7; ++j) X(i, j) = rng.normal() * (1.0 + j % 3);
  auto p = pca(X);
  Eigen::MatrixXd gram = p.loadings * p.loadings.transpose();
  c.expect((gram - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-8,
           "loadings not orthonormal at 1e-8");
  for (Eigen::Index k = 1; k < p.explained_variance_ratio.size(); ++k)
    c.expect(p.explained_variance_ratio(k) <=
                 p.explained_variance_ratio(k - 1) + 1e-12,
             "explained ratios increase");

  Eigen::MatrixXd rank1(10, 2);
  for (int i = 0; i < 10; ++i) {
    rank1(i, 0) = i;
    rank1(i, 1) = -2.0 * i + 5.0;
  }
  auto p1 = pca(rank1);
  c.expect(std::abs(p1.explained_variance_ratio(0) - 1.0) < 1e-10 &&
               std::abs(p1.explained_variance_ratio(1)) < 1e-10,
           "rank-1 ratios not (1, 0)");

  stats::Rng rng2(20240620);
  Eigen::MatrixXd iso(1000, 2);
  for (int i = 0; i < 1000; ++i) {
    iso(i, 0) = rng2.normal();
    iso(i, 1) = rng2.normal();
  }
  auto p2 = pca(iso);
  c.expect(std::abs(p2.explained_variance_ratio(0) - 0.5) <= 0.05,
           "isotropic PC1 ratio outside 0.5 +- 0.05");

  report(12, c.ok,
         "PCA: orthonormal loadings, ordered ratios, rank-1 = (1,0), isotropic = 0.5" +
             (c.ok ? "" : " -- " + c.detail));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  bool ran6 = criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  int total = ran6 ? 12 : 11;
  std::printf("%d/%d criteria passed\n", total - g_failures, total);
  return g_failures == 0 ? 0 : 1;
}
