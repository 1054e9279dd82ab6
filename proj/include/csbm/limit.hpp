#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "csbm/rng.hpp"

namespace csbm {

// Standard normal CDF via erfc; accurate to ~1e-16 relative in both tails.
double std_normal_cdf(double x);

// Two-type Poisson Galton-Watson generation sizes: alpha_k nodes share the
// root's class, beta_k do not.
struct GwRealization {
  std::vector<std::int64_t> alpha;
  std::vector<std::int64_t> beta;

  int radius() const noexcept { return static_cast<int>(alpha.size()) - 1; }
};

inline constexpr std::int64_t kDefaultPopulationCap = 1'000'000;

// alpha_k ~ Poi((a alpha_{k-1} + b beta_{k-1}) / 2), beta_k ~ Poi((a beta_{k-1} + b alpha_{k-1}) / 2).
// Throws TruncationError when the total population exceeds population_cap.
GwRealization sample_gw(double a, double b, int radius, Rng& rng,
                        std::int64_t population_cap = kDefaultPopulationCap);

// (1 + sum_k |alpha_k - beta_k|) / sqrt(1 + sum_k (alpha_k + beta_k)), k = 1..radius.
double xi(const GwRealization& r);
// Same with signed differences over generation 1 only: the normalised margin
// of the one-hop convolution when the root's class is known.
double gcn_margin(const GwRealization& r);

struct ErrorEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t truncated = 0;

  // Sample mean and standard error of per-sample values in [0, 1].
  static ErrorEstimate from_values(std::span<const double> values, std::size_t truncated = 0);
  // Exact value with zero spread.
  static ErrorEstimate exact(double value);
};

struct MonteCarloOptions {
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;
  std::int64_t population_cap = kDefaultPopulationCap;
  unsigned threads = 1;
};

// Limit misclassification probability of the optimal rule for the symmetric
// binary Gaussian model:
//   Pr[g + (1 / 2 gamma) sum_k (sum_alpha_k Z^a + sum_beta_k Z^b) > gamma].
// Each sample draws the tree and neighbour features; the root noise g is
// integrated out exactly, so a sample contributes Phi(S / (2 gamma) - gamma).
// Refuses (TruncationError) if more than 0.1% of trees hit the population cap.
ErrorEstimate limit_error_mc(double a, double b, double gamma, int radius,
                             const MonteCarloOptions& opt);
ErrorEstimate limit_error_mc(double a, double b, std::span<const double> mu, double sigma,
                             int radius, const MonteCarloOptions& opt);

// Pr(g > gamma xi) averaged over trees; one of a, b must be zero.
ErrorEstimate extreme_error_mc(double a, double b, double gamma, int radius,
                               const MonteCarloOptions& opt);

struct GcnLimit {
  ErrorEstimate estimate;
  double feature_only_error = 0.0;  // Phi(-gamma)
  bool beats_feature_only = false;
};

// One-hop convolution error Pr(g > gamma m) with m the generation-1 margin.
GcnLimit gcn_error_mc(double a, double b, double gamma, const MonteCarloOptions& opt);

// Kesten-Stigum condition (a - b)^2 > 2 (a + b), taken from the community
// detection literature.
bool ks_indicator(double a, double b);

struct TvPoint {
  int k = 0;
  double tv = 0.0;
  double bootstrap_se = 0.0;
};

struct TvReport {
  std::size_t n = 0;
  std::size_t samples = 0;
  std::vector<TvPoint> per_depth;
  // radius / log n times log((a + b) / 2) is at least 1/4.
  bool depth_warning = false;
};

struct TvOptions {
  std::size_t samples = 10'000;
  std::size_t bootstrap = 100;
  std::uint64_t seed = 1;
  std::int64_t population_cap = kDefaultPopulationCap;
  unsigned threads = 1;
};

inline constexpr std::size_t kMinTvSamples = 100;

// Total variation between the empirical joint laws of (U_k^+, U_k^-) around a
// uniform root of fresh CSBM(n, a/n, b/n) graphs and of (alpha_k, beta_k).
TvReport empirical_tv_shells(std::size_t n, double a, double b, int radius,
                             const TvOptions& opt);

// Half the L1 distance between the empirical laws of two samples of pairs.
double empirical_tv(std::span<const std::pair<std::int64_t, std::int64_t>> x,
                    std::span<const std::pair<std::int64_t, std::int64_t>> y);

}  // namespace csbm
