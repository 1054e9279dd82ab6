#include <algorithm>
#include <chrono>
#include <cmath>

#include "csbm/architecture.hpp"
#include "csbm/errors.hpp"
#include "csbm/harness.hpp"
#include "csbm/neighborhood.hpp"
#include "csbm/parallel.hpp"
#include "csbm/rng.hpp"

namespace csbm {

std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return derive_seed(master, "trial", trial);
}

CsbmGraph sample_trial_graph(const ExperimentConfig& cfg, std::size_t trial) {
  const auto fm = cfg.feature_model();
  return sample_csbm(cfg.n, *fm, cfg.rates(), trial_seed(cfg.seed, trial));
}

namespace {

template <typename PerNode>
std::vector<Prediction> per_node(const CsbmGraph& g, unsigned threads, PerNode&& fn) {
  std::vector<Prediction> out(g.num_nodes());
  parallel_for(g.num_nodes(), threads, [&](std::size_t begin, std::size_t end) {
    ShellExplorer explorer(g);
    for (std::size_t v = begin; v < end; ++v) {
      out[v] = fn(explorer, static_cast<NodeId>(v));
    }
  });
  return out;
}

const GaussianFeatureModel& require_symmetric(const FeatureModel& fm, std::string_view method) {
  const auto* gm = dynamic_cast<const GaussianFeatureModel*>(&fm);
  if (gm == nullptr || !gm->is_binary_symmetric()) {
    throw InvalidArgument(std::string(method) + " needs the symmetric binary Gaussian model");
  }
  return *gm;
}

}  // namespace

std::vector<Prediction> predict_all(const ExperimentConfig& cfg, std::string_view method,
                                    const CsbmGraph& g, unsigned threads) {
  const auto fm = cfg.feature_model();
  const auto rates = cfg.rates();
  if (g.dim() != fm->dim() || g.num_classes() != fm->num_classes()) {
    throw InvalidArgument("graph shape does not match the configured feature model");
  }
  const int r = cfg.radius;

  if (method == "optimal") {
    const LogDensityTable table(g, *fm, threads);
    const MulticlassClassifier clf(rates, r);
    return per_node(g, threads, [&](ShellExplorer& ex, NodeId v) {
      return clf.classify(ex.shells(v, r), table);
    });
  }
  if (method == "binary_optimal") {
    if (rates.num_classes() != 2 || rates(0, 0) != rates(1, 1)) {
      throw InvalidArgument("binary_optimal needs a symmetric two-class rate matrix");
    }
    const auto kernel = MessageKernel::from_rates(rates(0, 0), rates(0, 1), r);
    std::vector<double> log_psi(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      log_psi[v] = fm->log_likelihood_ratio(g.features(v));
    }
    return per_node(g, threads, [&](ShellExplorer& ex, NodeId v) {
      return classify_binary(ex.shells(v, r), log_psi, kernel);
    });
  }
  if (method == "mlp") {
    const LogDensityTable table(g, *fm, threads);
    std::vector<Prediction> out(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const auto row = table.row(v);
      out[v].scores.assign(row.begin(), row.end());
      out[v].label = argmax_label(row);
    }
    return out;
  }
  if (method == "gcn") {
    const auto& gm = require_symmetric(*fm, method);
    const auto& mu = gm.means()[0];
    std::vector<Prediction> out(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) out[v] = classify_gcn(g, v, mu);
    return out;
  }
  if (method == "arch") {
    const auto params = realize_optimal(*fm, rates, g.num_nodes(), r);
    const auto tensor = shell_tensor(g, r, kDefaultShellEntryCap, threads);
    return arch_forward(g, tensor, params);
  }
  throw InvalidArgument("unknown method '" + std::string(method) + "'");
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial, unsigned threads) {
  TrialResult result{sample_trial_graph(cfg, trial), {}, {}};
  for (const auto& m : cfg.methods) {
    const auto start = std::chrono::steady_clock::now();
    result.predictions[m] = predict_all(cfg, m, result.graph, threads);
    const auto stop = std::chrono::steady_clock::now();
    result.wall_time_ms[m] = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  return result;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<std::size_t> correct(cfg.methods.size(), 0);
  std::vector<double> elapsed(cfg.methods.size(), 0.0);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto trial = run_trial(cfg, t, threads);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      const auto& preds = trial.predictions.at(cfg.methods[m]);
      for (NodeId v = 0; v < trial.graph.num_nodes(); ++v) {
        if (preds[v].label == trial.graph.label(v)) ++correct[m];
      }
      elapsed[m] += trial.wall_time_ms.at(cfg.methods[m]);
    }
  }
  const double total = static_cast<double>(cfg.n) * static_cast<double>(cfg.trials);
  std::vector<ResultRow> rows;
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    ResultRow row;
    row.method = cfg.methods[m];
    row.accuracy = static_cast<double>(correct[m]) / total;
    row.std_error = std::sqrt(row.accuracy * (1.0 - row.accuracy) / total);
    row.n = cfg.n;
    row.trials = cfg.trials;
    row.wall_time_ms = elapsed[m];
    rows.push_back(std::move(row));
  }
  return rows;
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, std::string_view parameter,
                                   double value) {
  ExperimentConfig out = cfg;
  if (parameter == "gamma") out.set_feature_snr(value);
  else if (parameter == "Gamma") out.set_graph_snr(value);
  else throw ConfigError("sweep", "parameter must be 'gamma' or 'Gamma'");
  return out;
}

std::vector<ResultRow> sweep(const ExperimentConfig& cfg, std::string_view parameter,
                             std::span<const double> values, unsigned threads) {
  if (values.empty()) throw ConfigError("sweep_values", "must not be empty");
  std::vector<ResultRow> rows;
  for (double value : values) {
    for (auto& row : run_experiment(apply_sweep_value(cfg, parameter, value), threads)) {
      row.param_name = std::string(parameter);
      row.param_value = value;
      rows.push_back(std::move(row));
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& x, const ResultRow& y) {
    if (x.param_value != y.param_value) return x.param_value < y.param_value;
    return x.method < y.method;
  });
  return rows;
}

CensusGate census_gate(std::size_t n, int radius, double mean_degree) {
  if (n < 2) throw InvalidArgument("census needs n >= 2");
  CensusGate gate;
  gate.depth_constant = radius / std::log(static_cast<double>(n));
  gate.gate_value = mean_degree > 0.0 ? gate.depth_constant * std::log(mean_degree) : 0.0;
  gate.hypothesis_holds = gate.gate_value < 0.25;
  return gate;
}

std::vector<CensusRow> census(const ExperimentConfig& cfg, unsigned threads) {
  const auto rates = cfg.rates();
  double total_rate = 0.0;
  for (double r : rates.rates()) total_rate += r;
  const double c = static_cast<double>(rates.num_classes());
  const double mean_degree = total_rate / (c * c);
  const auto gate = census_gate(cfg.n, cfg.radius, mean_degree);
  std::vector<CensusRow> rows;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto g = sample_sbm(cfg.n, rates, trial_seed(cfg.seed, t));
    CensusRow row;
    row.trial = t;
    row.n = cfg.n;
    row.radius = cfg.radius;
    row.mean_degree = mean_degree;
    row.cycle_free_fraction = cycle_free_fraction(g, cfg.radius, threads);
    row.depth_constant = gate.depth_constant;
    row.gate_value = gate.gate_value;
    row.hypothesis_holds = gate.hypothesis_holds;
    rows.push_back(row);
  }
  return rows;
}

ConvergenceReport convergence_check(const ExperimentConfig& cfg,
                                    std::span<const std::size_t> n_list, unsigned threads) {
  if (n_list.empty()) throw ConfigError("n_list", "must not be empty");
  if (cfg.num_classes != 2 || !cfg.rates_path.empty() || !cfg.means_path.empty()) {
    throw ConfigError("C", "convergence needs the symmetric binary Gaussian model");
  }
  ConvergenceReport report;
  MonteCarloOptions opt;
  opt.samples = cfg.samples;
  opt.seed = derive_seed(cfg.seed, "limit", 0);
  opt.population_cap = cfg.population_cap;
  opt.threads = threads;
  report.limit = limit_error_mc(cfg.a, cfg.b, cfg.feature_snr(), cfg.radius, opt);

  for (std::size_t n : n_list) {
    ExperimentConfig c = cfg;
    c.n = n;
    c.methods = {"binary_optimal"};
    const auto row = run_experiment(c, threads).front();
    ConvergenceRow out;
    out.n = n;
    out.empirical_error = 1.0 - row.accuracy;
    out.empirical_se = row.std_error;
    out.limit_error = report.limit.mean;
    out.limit_se = report.limit.std_error;
    out.gap = std::abs(out.empirical_error - out.limit_error);
    out.gap_se = std::hypot(out.empirical_se, out.limit_se);
    report.rows.push_back(out);
  }
  report.has_trend = report.rows.size() >= 2;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& prev = report.rows[i - 1];
    const auto& cur = report.rows[i];
    if (cur.gap > prev.gap + 2.0 * std::hypot(cur.gap_se, prev.gap_se)) {
      report.trend_nonincreasing = false;
    }
  }
  const auto& last = report.rows.back();
  report.final_within_tolerance = last.gap <= 3.0 * last.gap_se;
  return report;
}

}  // namespace csbm
