#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csbm/classifier.hpp"
#include "csbm/feature_model.hpp"
#include "csbm/graph.hpp"
#include "csbm/limit.hpp"
#include "csbm/model.hpp"

namespace csbm {

struct SweepSpec {
  std::string parameter;  // "gamma" (feature SNR) or "Gamma" (graph SNR)
  std::vector<double> values;
};

// Flat `key = value` configuration; vectors are comma separated.
struct ExperimentConfig {
  std::size_t n = 10'000;
  std::size_t d = 4;
  std::size_t num_classes = 2;
  double a = 4.0;
  double b = 1.0;
  std::string rates_path;  // optional C x C matrix file, overrides a and b
  std::vector<double> mu;  // defaults to e_1 in R^d
  std::string means_path;  // C x d class means, required when C > 2
  double sigma = 1.0;
  int radius = 2;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::vector<std::string> methods{"optimal", "mlp", "gcn"};
  std::optional<SweepSpec> sweep;
  double degree_sum = 10.0;  // a + b held fixed when Gamma is set or swept
  bool heterophily = false;  // realise Gamma by b >= a instead of a >= b
  std::size_t samples = 100'000;  // Monte Carlo trees
  std::size_t tv_samples = 10'000;
  std::size_t bootstrap = 100;
  std::vector<std::size_t> n_list;
  std::int64_t population_cap = kDefaultPopulationCap;
  std::string graph_path;  // classify: read this bundle instead of sampling
  std::string method = "optimal";  // classify
  std::string svg_path;  // sweep: also render a chart here

  // Throws ConfigError naming the offending field.
  void validate() const;

  EdgeRateMatrix rates() const;
  std::unique_ptr<FeatureModel> feature_model() const;
  // ||mu|| / sigma for the binary symmetric model.
  double feature_snr() const;

  // Feature SNR gamma: rescales mu to norm gamma * sigma, keeping its direction.
  void set_feature_snr(double gamma);
  // Graph SNR Gamma at a + b = degree_sum.
  void set_graph_snr(double graph_snr);
};

inline const std::vector<std::string_view> kMethodNames{"optimal", "binary_optimal", "mlp",
                                                        "gcn", "arch"};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ResultRow {
  std::string method;
  std::string param_name = "none";
  double param_value = 0.0;
  double accuracy = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  double wall_time_ms = 0.0;
};

struct TrialResult {
  CsbmGraph graph;
  std::map<std::string, std::vector<Prediction>> predictions;
  std::map<std::string, double> wall_time_ms;
};

// Per-trial seed, shared by every command that samples trial t.
std::uint64_t trial_seed(std::uint64_t master, std::size_t trial);

CsbmGraph sample_trial_graph(const ExperimentConfig& cfg, std::size_t trial);

// Predictions of one method for every node of g.
std::vector<Prediction> predict_all(const ExperimentConfig& cfg, std::string_view method,
                                    const CsbmGraph& g, unsigned threads = 1);

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial, unsigned threads = 1);

// One row per method, pooling correct decisions over every node of every trial.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, std::string_view parameter,
                                   double value);

// Rows sorted by value, then method.
std::vector<ResultRow> sweep(const ExperimentConfig& cfg, std::string_view parameter,
                             std::span<const double> values, unsigned threads = 1);

struct CensusRow {
  std::size_t trial = 0;
  std::size_t n = 0;
  int radius = 0;
  double mean_degree = 0.0;
  double cycle_free_fraction = 0.0;
  double depth_constant = 0.0;  // c = radius / log n
  double gate_value = 0.0;      // c log(mean degree), compared against 1/4
  bool hypothesis_holds = true;
};

struct CensusGate {
  double depth_constant = 0.0;
  double gate_value = 0.0;
  bool hypothesis_holds = true;
};
CensusGate census_gate(std::size_t n, int radius, double mean_degree);

std::vector<CensusRow> census(const ExperimentConfig& cfg, unsigned threads = 1);

struct ConvergenceRow {
  std::size_t n = 0;
  double empirical_error = 0.0;
  double empirical_se = 0.0;
  double limit_error = 0.0;
  double limit_se = 0.0;
  double gap = 0.0;     // |empirical - limit|
  double gap_se = 0.0;  // combined standard error
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  ErrorEstimate limit;
  bool has_trend = false;       // at least two sizes
  bool trend_nonincreasing = true;  // each gap <= previous + 2 combined SE
  bool final_within_tolerance = true;  // largest-n gap <= 3 combined SE
};

ConvergenceReport convergence_check(const ExperimentConfig& cfg,
                                    std::span<const std::size_t> n_list, unsigned threads = 1);

void write_results_csv(std::span<const ResultRow> rows, std::ostream& out,
                       bool include_timing = true);
void write_predictions_csv(const CsbmGraph& g, std::span<const Prediction> preds,
                           std::ostream& out);

struct NamedEstimate {
  std::string quantity;
  ErrorEstimate estimate;
};
void write_estimates_csv(const ExperimentConfig& cfg, std::span<const NamedEstimate> rows,
                         std::ostream& out);
void write_census_csv(std::span<const CensusRow> rows, std::ostream& out);
void write_tv_csv(const ExperimentConfig& cfg, std::span<const TvReport> reports,
                  std::ostream& out);
void write_convergence_csv(const ConvergenceReport& report, std::ostream& out);

// Line chart of accuracy against the swept value, one series per method,
// error bars at +-1.96 standard errors. Output bytes depend only on rows.
std::string render_svg(std::span<const ResultRow> rows);
void emit_svg(std::span<const ResultRow> rows, const std::filesystem::path& path);

// Shortest round-trip decimal form.
std::string format_double(double x);

inline const std::vector<std::string_view> kCommands{
    "generate", "classify", "evaluate", "sweep", "limit-error", "census", "tv", "convergence"};

// Runs one CLI command, writing its primary output to out.
void run_command(std::string_view command, const ExperimentConfig& cfg, std::ostream& out,
                 unsigned threads = 1);

}  // namespace csbm
