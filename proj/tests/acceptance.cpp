// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "csbm/classifier.hpp"
#include "csbm/harness.hpp"
#include "csbm/limit.hpp"
#include "csbm/model.hpp"
#include "csbm/neighborhood.hpp"
#include "support.hpp"

#ifndef CSBM_CLI_PATH
#error "CSBM_CLI_PATH must point at the csbm-bayes executable"
#endif

using namespace csbm;

namespace {

// Pinned tolerances and budgets.
constexpr double kScoreRelTol = 1e-9;
constexpr double kClosedFormTol = 0.015;
constexpr double kConvolutionTol = 1e-9;
constexpr double kOrderingSe = 2.0;
constexpr double kLimitGapTol = 0.01;
constexpr double kGcnSe = 2.0;
constexpr double kCycleFreeMin = 0.995;
constexpr double kTvSe = 2.0;

const double kPhiMinus1 = 0.158655253931457051;

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double score_gap(const Prediction& x, const Prediction& y) {
  double worst = 0.0;
  for (std::size_t i = 1; i < x.scores.size(); ++i) {
    const double dx = x.scores[i] - x.scores[0], dy = y.scores[i] - y.scores[0];
    worst = std::max(worst, std::abs(dx - dy) / std::max(1.0, std::abs(dx)));
  }
  return worst;
}

double error_rate(const CsbmGraph& g, const std::vector<Prediction>& preds) {
  std::size_t wrong = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) wrong += preds[v].label != g.label(v);
  return static_cast<double>(wrong) / g.num_nodes();
}

Outcome oracle_equivalence() {
  Rng rng(1);
  int agree = 0;
  double worst = 0.0;
  const int cases = 200;
  for (int t = 0; t < cases; ++t) {
    const std::size_t C = 2 + t % 3;
    auto inst = test::random_tree_instance(C, 8, rng);
    const auto sd = shells(inst.graph, 0, inst.radius);
    const auto o = map_bruteforce_oracle(sd, inst.graph.feature_view(), inst.features, inst.rates);
    const auto m = classify_multiclass(sd, inst.graph.feature_view(), inst.features, inst.rates);
    agree += o.label == m.label;
    worst = std::max(worst, score_gap(o, m));
  }
  return {agree == cases && worst <= kScoreRelTol,
          std::to_string(agree) + "/200 labels, max relative score-difference gap " +
              fmt("%.2e", worst)};
}

Outcome binary_consistency() {
  Rng rng(2);
  int agree = 0;
  const int cases = 1000;
  for (int t = 0; t < cases; ++t) {
    const double a = 0.1 + 8 * rng.uniform_open(), b = 0.1 + 8 * rng.uniform_open();
    const std::vector<double> mu{rng.standard_normal(), rng.standard_normal()};
    const auto fm = GaussianFeatureModel::binary_symmetric(mu, 0.5 + rng.uniform_open());
    const auto rates = EdgeRateMatrix::binary(a, b);
    const auto g = sample_csbm(40, fm, rates, rng());
    const int r = static_cast<int>(rng.uniform_index(4));
    const auto root = static_cast<NodeId>(rng.uniform_index(g.num_nodes()));
    std::vector<double> lpsi(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) lpsi[v] = fm.log_likelihood_ratio(g.features(v));
    const auto sd = shells(g, root, r);
    const auto bin = classify_binary(sd, lpsi, MessageKernel::from_rates(a, b, r));
    const auto multi = classify_multiclass(sd, g.feature_view(), fm, rates);
    agree += bin.label == multi.label;
  }
  return {agree == cases, std::to_string(agree) + "/1000 decisions agree"};
}

Outcome flat_graph_closed_form() {
  auto cfg = parse_config("n = 20000\na = 4\nb = 4\nd = 1\nell = 2\ngamma = 1\nseed = 3\n");
  const auto g = sample_trial_graph(cfg, 0);
  const double err = error_rate(g, predict_all(cfg, "optimal", g, worker_threads()));
  return {std::abs(err - kPhiMinus1) <= kClosedFormTol,
          "error " + fmt("%.5f", err) + " vs Phi(-1) = 0.158655, tolerance 0.015"};
}

Outcome extreme_collapse() {
  const unsigned threads = worker_threads();
  // Gamma = 0: a = b.
  auto flat = parse_config("n = 10000\na = 4\nb = 4\nd = 2\nmu = 0.8, 0.6\nell = 2\nseed = 4\n");
  const auto g0 = sample_trial_graph(flat, 0);
  const auto fm0 = flat.feature_model();
  const auto opt0 = predict_all(flat, "optimal", g0, threads);
  const auto bin0 = predict_all(flat, "binary_optimal", g0, threads);
  std::size_t mismatch0 = 0;
  for (NodeId v = 0; v < g0.num_nodes(); ++v) {
    const auto f = classify_feature_only(g0.features(v), *fm0);
    mismatch0 += f.label != opt0[v].label || f.label != bin0[v].label;
  }
  // b = 0: the optimal rule is the uniform log-likelihood convolution.
  auto sharp = parse_config("n = 10000\na = 4\nb = 0\nd = 2\nmu = 0.8, 0.6\nell = 2\nseed = 5\n");
  const auto g1 = sample_trial_graph(sharp, 0);
  const auto fm1 = sharp.feature_model();
  const auto opt1 = predict_all(sharp, "optimal", g1, threads);
  const auto bin1 = predict_all(sharp, "binary_optimal", g1, threads);
  std::vector<double> lpsi(g1.num_nodes());
  for (NodeId v = 0; v < g1.num_nodes(); ++v) lpsi[v] = fm1->log_likelihood_ratio(g1.features(v));
  std::size_t mismatch1 = 0;
  double worst = 0.0;
  ShellExplorer ex(g1);
  for (NodeId v = 0; v < g1.num_nodes(); ++v) {
    const auto c = classify_convolution(ex.shells(v, 2), lpsi);
    mismatch1 += c.label != opt1[v].label || c.label != bin1[v].label;
    const double t = c.scores[0];
    const double scale = std::max(1.0, std::abs(t));
    worst = std::max(worst, std::abs(bin1[v].scores[0] - t) / scale);
    worst = std::max(worst, std::abs((opt1[v].scores[0] - opt1[v].scores[1]) - t) / scale);
  }
  return {mismatch0 == 0 && mismatch1 == 0 && worst <= kConvolutionTol,
          "Gamma=0: " + std::to_string(mismatch0) + " mismatches; b=0: " +
              std::to_string(mismatch1) + " mismatches, max score gap " + fmt("%.2e", worst)};
}

Outcome accuracy_ordering() {
  auto cfg = parse_config(
      "n = 10000\nd = 4\nell = 2\ntrials = 5\ndegree_sum = 10\nGamma = 0.42\nseed = 6\n"
      "methods = optimal, mlp, gcn\n");
  const std::vector<double> gammas{0.5, 1.0, 1.5};
  const auto rows = sweep(cfg, "gamma", gammas, worker_threads());
  bool ok = true;
  std::string detail;
  for (double gam : gammas) {
    const ResultRow *opt = nullptr, *mlp = nullptr, *gcn = nullptr;
    for (const auto& r : rows) {
      if (r.param_value != gam) continue;
      if (r.method == "optimal") opt = &r;
      if (r.method == "mlp") mlp = &r;
      if (r.method == "gcn") gcn = &r;
    }
    for (const auto* other : {mlp, gcn}) {
      const double cse = std::hypot(opt->std_error, other->std_error);
      ok = ok && opt->accuracy >= other->accuracy - kOrderingSe * cse;
    }
    detail += "gamma=" + fmt("%.1f", gam) + ": opt " + fmt("%.4f", opt->accuracy) + " mlp " +
              fmt("%.4f", mlp->accuracy) + " gcn " + fmt("%.4f", gcn->accuracy) + "; ";
  }
  return {ok, detail};
}

Outcome limit_vs_finite() {
  auto cfg = parse_config("n = 100000\na = 4\nb = 1\nd = 2\nell = 2\ngamma = 1\nseed = 7\n");
  const auto g = sample_trial_graph(cfg, 0);
  const double emp = error_rate(g, predict_all(cfg, "binary_optimal", g, worker_threads()));
  MonteCarloOptions opt;
  opt.samples = 100000;
  opt.seed = 7;
  opt.threads = worker_threads();
  const auto lim = limit_error_mc(4, 1, 1.0, 2, opt);
  const double gap = std::abs(emp - lim.mean);
  return {gap <= kLimitGapTol, "empirical " + fmt("%.5f", emp) + ", limit " +
                                   fmt("%.5f", lim.mean) + " (se " + fmt("%.5f", lim.std_error) +
                                   "), gap " + fmt("%.5f", gap) + " <= 0.01"};
}

Outcome gcn_limit_law() {
  auto cfg = parse_config("n = 100000\na = 4\nb = 1\nd = 2\nell = 1\ngamma = 1\nseed = 8\n");
  const auto g = sample_trial_graph(cfg, 0);
  const double emp = error_rate(g, predict_all(cfg, "gcn", g, worker_threads()));
  const double emp_se = std::sqrt(emp * (1 - emp) / g.num_nodes());
  MonteCarloOptions opt;
  opt.samples = 100000;
  opt.seed = 8;
  opt.threads = worker_threads();
  const auto lim = gcn_error_mc(4, 1, 1.0, opt).estimate;
  const double cse = std::hypot(emp_se, lim.std_error);
  const double gap = std::abs(emp - lim.mean);
  return {gap <= kGcnSe * cse, "empirical " + fmt("%.5f", emp) + ", limit " +
                                   fmt("%.5f", lim.mean) + ", gap " + fmt("%.5f", gap) +
                                   " vs 2 SE = " + fmt("%.5f", kGcnSe * cse)};
}

Outcome shell_tensor_oracle() {
  Rng rng(9);
  int equal = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.uniform_index(50);
    const auto g = test::random_graph(n, 0.1 * rng.uniform_open(), 2, 1, rng);
    const int r = static_cast<int>(rng.uniform_index(5));
    const auto tensor = shell_tensor(g, r);
    const auto dense = test::dense_shell_oracle(g, r);
    bool same = true;
    for (int k = 0; k <= r; ++k) {
      std::vector<std::uint8_t> flat(n * n, 0);
      for (std::size_t u = 0; u < n; ++u) {
        for (NodeId v : tensor[k].row(u)) flat[u * n + v] = 1;
      }
      same = same && flat == dense[k];
    }
    equal += same;
  }
  return {equal == 100, std::to_string(equal) + "/100 graphs equal"};
}

Outcome cycle_census() {
  const auto rows = census(parse_config("n = 100000\na = 4\nb = 1\nell = 2\ntrials = 5\nseed = 10\n"),
                           worker_threads());
  bool ok = rows.size() == 5;
  std::string detail = "cycle-free fractions:";
  for (const auto& r : rows) {
    ok = ok && r.cycle_free_fraction >= kCycleFreeMin;
    detail += " " + fmt("%.5f", r.cycle_free_fraction);
  }
  return {ok, detail};
}

Outcome tv_decay() {
  TvOptions opt;
  opt.samples = 10000;
  opt.bootstrap = 100;
  opt.seed = 11;
  opt.threads = worker_threads();
  std::vector<TvReport> reps;
  for (std::size_t n : {1000u, 10000u, 100000u}) reps.push_back(empirical_tv_shells(n, 4, 1, 2, opt));
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k <= 2; ++k) {
    detail += "k=" + std::to_string(k) + ":";
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const auto& p = reps[i].per_depth[k];
      detail += " " + fmt("%.4f", p.tv);
      if (i > 0) {
        const auto& q = reps[i - 1].per_depth[k];
        ok = ok && p.tv <= q.tv + kTvSe * std::hypot(p.bootstrap_se, q.bootstrap_se);
      }
    }
    detail += "; ";
  }
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Drops the named CSV column, used to exclude wall-clock timings.
std::string drop_column(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line, out;
  std::size_t col = std::string::npos;
  bool header = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (header) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == name) col = i;
      }
      header = false;
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == col) continue;
      out += cells[i];
      out += ',';
    }
    out += '\n';
  }
  return out;
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "csbm_acceptance_cli";
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "run.cfg";
  const fs::path svg_path = dir / "sweep.svg";
  std::ofstream(cfg_path) << "n = 1500\nd = 2\na = 4\nb = 1\nell = 2\ntrials = 2\n"
                             "methods = optimal, binary_optimal, mlp, gcn, arch\n"
                             "sweep = gamma\nsweep_values = 0.5, 1\nsamples = 3000\n"
                             "tv_samples = 200\nbootstrap = 20\nn_list = 500, 1000\n"
                             "method = optimal\nsvg = "
                          << svg_path.string() << "\n";
  int identical = 0, total = 0;
  std::string failures;
  for (auto command : kCommands) {
    std::vector<std::string> outputs;
    bool ran = true;
    for (unsigned threads : {1u, 1u, 8u, 8u}) {
      const fs::path out = dir / (std::string(command) + ".out");
      const std::string cmd = std::string("\"") + CSBM_CLI_PATH + "\" " + std::string(command) +
                              " --config \"" + cfg_path.string() + "\" --out \"" + out.string() +
                              "\" --seed 12 --threads " + std::to_string(threads);
      if (std::system(cmd.c_str()) != 0) ran = false;
      std::string text = drop_column(slurp(out), "wall_time_ms");
      if (command == "sweep") text += slurp(svg_path);
      outputs.push_back(std::move(text));
    }
    ++total;
    bool same = ran && !outputs[0].empty();
    for (const auto& o : outputs) same = same && o == outputs[0];
    if (same) ++identical;
    else failures += " " + std::string(command);
  }
  fs::remove_all(dir);
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " commands byte-identical across runs and 1/8 threads" +
                                  (failures.empty() ? "" : "; differing:" + failures)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", 10, oracle_equivalence},
      {2, "binary/multiclass consistency", 10, binary_consistency},
      {3, "Gamma = 0 closed form", 60, flat_graph_closed_form},
      {4, "extreme-signal collapse", 60, extreme_collapse},
      {5, "accuracy ordering over gamma", 300, accuracy_ordering},
      {6, "limit vs finite n", 300, limit_vs_finite},
      {7, "GCN limit law", 120, gcn_limit_law},
      {8, "shell-tensor oracle", 5, shell_tensor_oracle},
      {9, "cycle census", 60, cycle_census},
      {10, "TV decay", 600, tv_decay},
      {11, "CLI determinism", 600, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] %2d %s: %s (%.1f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name, o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
