#include "csbm/limit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "csbm/classifier.hpp"
#include "csbm/errors.hpp"
#include "csbm/model.hpp"
#include "csbm/neighborhood.hpp"
#include "csbm/numeric.hpp"
#include "csbm/parallel.hpp"

namespace csbm {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

GwRealization sample_gw(double a, double b, int radius, Rng& rng, std::int64_t population_cap) {
  if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("a and b must be finite and >= 0");
  }
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  if (population_cap <= 0) throw InvalidArgument("population cap must be > 0");
  GwRealization r;
  r.alpha.assign(static_cast<std::size_t>(radius) + 1, 0);
  r.beta.assign(static_cast<std::size_t>(radius) + 1, 0);
  r.alpha[0] = 1;
  std::int64_t population = 1;
  for (std::size_t k = 1; k < r.alpha.size(); ++k) {
    const auto pa = static_cast<double>(r.alpha[k - 1]);
    const auto pb = static_cast<double>(r.beta[k - 1]);
    r.alpha[k] = rng.poisson((a * pa + b * pb) / 2.0);
    r.beta[k] = rng.poisson((a * pb + b * pa) / 2.0);
    population += r.alpha[k] + r.beta[k];
    if (population > population_cap) {
      throw TruncationError("Galton-Watson population " + std::to_string(population) +
                            " exceeds cap " + std::to_string(population_cap) +
                            " at generation " + std::to_string(k));
    }
  }
  return r;
}

double xi(const GwRealization& r) {
  double num = 1.0;
  double den = 1.0;
  for (std::size_t k = 1; k < r.alpha.size(); ++k) {
    num += static_cast<double>(std::abs(r.alpha[k] - r.beta[k]));
    den += static_cast<double>(r.alpha[k] + r.beta[k]);
  }
  return num / std::sqrt(den);
}

double gcn_margin(const GwRealization& r) {
  if (r.alpha.size() < 2) return 1.0;
  const auto same = static_cast<double>(r.alpha[1]);
  const auto other = static_cast<double>(r.beta[1]);
  return (1.0 + same - other) / std::sqrt(1.0 + same + other);
}

ErrorEstimate ErrorEstimate::from_values(std::span<const double> values, std::size_t truncated) {
  ErrorEstimate e;
  e.samples = values.size();
  e.truncated = truncated;
  if (values.empty()) throw InvalidArgument("no samples to estimate from");
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double n = static_cast<double>(values.size());
  e.mean = std::clamp(sum.value() / n, 0.0, 1.0);
  if (values.size() > 1) {
    CompensatedSum sq;
    for (double v : values) sq.add((v - e.mean) * (v - e.mean));
    e.std_error = std::sqrt(sq.value() / (n - 1.0) / n);
  }
  e.ci_low = std::clamp(e.mean - 1.96 * e.std_error, 0.0, 1.0);
  e.ci_high = std::clamp(e.mean + 1.96 * e.std_error, 0.0, 1.0);
  return e;
}

ErrorEstimate ErrorEstimate::exact(double value) {
  ErrorEstimate e;
  e.mean = e.ci_low = e.ci_high = value;
  e.samples = 1;
  return e;
}

namespace {

// Runs sample(i, rng) -> value for every i with its own stream. Samples that
// throw TruncationError are dropped and counted.
template <typename SampleFn>
ErrorEstimate run_monte_carlo(std::string_view label, const MonteCarloOptions& opt,
                              SampleFn&& sample) {
  if (opt.samples < 1) throw InvalidArgument("samples must be >= 1");
  std::vector<double> values(opt.samples);
  std::vector<unsigned char> kept(opt.samples, 1);
  parallel_for(opt.samples, opt.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(opt.seed, label, i);
      try {
        values[i] = sample(rng);
      } catch (const TruncationError&) {
        kept[i] = 0;
      }
    }
  });
  std::vector<double> usable;
  usable.reserve(opt.samples);
  for (std::size_t i = 0; i < opt.samples; ++i) {
    if (kept[i]) usable.push_back(values[i]);
  }
  const std::size_t truncated = opt.samples - usable.size();
  if (static_cast<double>(truncated) > 0.001 * static_cast<double>(opt.samples)) {
    throw TruncationError(std::to_string(truncated) + " of " + std::to_string(opt.samples) +
                          " trees exceeded the population cap (limit 0.1%)");
  }
  return ErrorEstimate::from_values(usable, truncated);
}

void check_rates(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("a and b must be finite and >= 0");
  }
}

}  // namespace

ErrorEstimate limit_error_mc(double a, double b, double gamma, int radius,
                             const MonteCarloOptions& opt) {
  check_rates(a, b);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  // Featureless nodes carry no evidence, so every rule is a coin flip.
  if (gamma == 0.0) return ErrorEstimate::exact(0.5);
  const MessageKernel kernel = MessageKernel::from_rates(a, b, radius);
  const double shift = 2.0 * gamma * gamma;
  return run_monte_carlo("limit-error", opt, [&](Rng& rng) {
    const auto tree = sample_gw(a, b, radius, rng, opt.population_cap);
    double total = 0.0;
    for (int k = 1; k <= radius; ++k) {
      // <g, mu> / ||mu|| is standard normal, so log psi of a neighbour is
      // -+2 gamma^2 + 2 gamma g for same / opposite class (root in class -1).
      for (std::int64_t i = 0; i < tree.alpha[k]; ++i) {
        total += kernel.message(-shift + 2.0 * gamma * rng.standard_normal(), k);
      }
      for (std::int64_t i = 0; i < tree.beta[k]; ++i) {
        total += kernel.message(shift + 2.0 * gamma * rng.standard_normal(), k);
      }
    }
    return std_normal_cdf(total / (2.0 * gamma) - gamma);
  });
}

ErrorEstimate limit_error_mc(double a, double b, std::span<const double> mu, double sigma,
                             int radius, const MonteCarloOptions& opt) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  double sq = 0.0;
  for (double m : mu) sq += m * m;
  return limit_error_mc(a, b, std::sqrt(sq) / sigma, radius, opt);
}

ErrorEstimate extreme_error_mc(double a, double b, double gamma, int radius,
                               const MonteCarloOptions& opt) {
  check_rates(a, b);
  if ((a == 0.0) == (b == 0.0)) {
    throw InvalidArgument("extreme regime needs exactly one of a, b equal to zero");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
  return run_monte_carlo("extreme-error", opt, [&](Rng& rng) {
    const auto tree = sample_gw(a, b, radius, rng, opt.population_cap);
    const double x = xi(tree);
    if (x < 1.0) throw NumericError("xi < 1 in the extreme regime");
    return std_normal_cdf(-gamma * x);
  });
}

GcnLimit gcn_error_mc(double a, double b, double gamma, const MonteCarloOptions& opt) {
  check_rates(a, b);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
  GcnLimit out;
  out.estimate = run_monte_carlo("gcn-error", opt, [&](Rng& rng) {
    const auto tree = sample_gw(a, b, 1, rng, opt.population_cap);
    return std_normal_cdf(-gamma * gcn_margin(tree));
  });
  out.feature_only_error = std_normal_cdf(-gamma);
  out.beats_feature_only = out.estimate.mean < out.feature_only_error;
  return out;
}

bool ks_indicator(double a, double b) {
  check_rates(a, b);
  return (a - b) * (a - b) > 2.0 * (a + b);
}

namespace {

using CountPair = std::pair<std::int64_t, std::int64_t>;

// Bin ids over the union support of x and y.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> bin_pairs(
    std::span<const CountPair> x, std::span<const CountPair> y, std::size_t& bins) {
  std::vector<CountPair> support(x.begin(), x.end());
  support.insert(support.end(), y.begin(), y.end());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  bins = support.size();
  auto index = [&](const CountPair& p) {
    return static_cast<std::uint32_t>(
        std::lower_bound(support.begin(), support.end(), p) - support.begin());
  };
  std::vector<std::uint32_t> bx(x.size()), by(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) bx[i] = index(x[i]);
  for (std::size_t i = 0; i < y.size(); ++i) by[i] = index(y[i]);
  return {std::move(bx), std::move(by)};
}

double tv_from_counts(std::span<const std::int64_t> cx, std::size_t nx,
                      std::span<const std::int64_t> cy, std::size_t ny) {
  double total = 0.0;
  for (std::size_t i = 0; i < cx.size(); ++i) {
    total += std::abs(static_cast<double>(cx[i]) / static_cast<double>(nx) -
                      static_cast<double>(cy[i]) / static_cast<double>(ny));
  }
  return 0.5 * total;
}

}  // namespace

double empirical_tv(std::span<const CountPair> x, std::span<const CountPair> y) {
  if (x.empty() || y.empty()) throw InvalidArgument("empirical TV needs non-empty samples");
  std::size_t bins = 0;
  const auto [bx, by] = bin_pairs(x, y, bins);
  std::vector<std::int64_t> cx(bins, 0), cy(bins, 0);
  for (auto i : bx) ++cx[i];
  for (auto i : by) ++cy[i];
  return tv_from_counts(cx, x.size(), cy, y.size());
}

TvReport empirical_tv_shells(std::size_t n, double a, double b, int radius,
                             const TvOptions& opt) {
  check_rates(a, b);
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  if (n < 2) throw InvalidArgument("n must be >= 2");
  if (opt.samples < kMinTvSamples) {
    throw InvalidArgument("empirical TV needs at least " + std::to_string(kMinTvSamples) +
                          " samples for stable histograms, got " + std::to_string(opt.samples));
  }
  const auto layers = static_cast<std::size_t>(radius) + 1;
  const EdgeRateMatrix rates = EdgeRateMatrix::binary(a, b);
  rates.check_probabilities(n);

  TvReport report;
  report.n = n;
  report.samples = opt.samples;
  const double delta = (a + b) / 2.0;
  if (radius > 0 && delta > 0.0) {
    const double c = radius / std::log(static_cast<double>(n));
    report.depth_warning = c * std::log(delta) >= 0.25;
  }

  // graph_counts[s * layers + k], tree_counts likewise.
  std::vector<CountPair> graph_counts(opt.samples * layers);
  std::vector<CountPair> tree_counts(opt.samples * layers);
  parallel_for(opt.samples, opt.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const CsbmGraph g = sample_sbm(n, rates, derive_seed(opt.seed, "tv-graph", s));
      Rng root_rng(opt.seed, "tv-root", s);
      const auto root = static_cast<NodeId>(root_rng.uniform_index(n));
      const auto counts = labeled_shell_counts(g, root, radius);
      Rng tree_rng(opt.seed, "tv-tree", s);
      const auto tree = sample_gw(a, b, radius, tree_rng, opt.population_cap);
      for (std::size_t k = 0; k < layers; ++k) {
        graph_counts[s * layers + k] = {counts.u_plus[k], counts.u_minus[k]};
        tree_counts[s * layers + k] = {tree.alpha[k], tree.beta[k]};
      }
    }
  });

  for (std::size_t k = 0; k < layers; ++k) {
    std::vector<CountPair> gx(opt.samples), ty(opt.samples);
    for (std::size_t s = 0; s < opt.samples; ++s) {
      gx[s] = graph_counts[s * layers + k];
      ty[s] = tree_counts[s * layers + k];
    }
    std::size_t bins = 0;
    const auto [bx, by] = bin_pairs(gx, ty, bins);
    std::vector<std::int64_t> cx(bins, 0), cy(bins, 0);
    for (auto i : bx) ++cx[i];
    for (auto i : by) ++cy[i];
    TvPoint point;
    point.k = static_cast<int>(k);
    point.tv = tv_from_counts(cx, opt.samples, cy, opt.samples);

    if (opt.bootstrap > 1) {
      std::vector<double> reps(opt.bootstrap);
      for (std::size_t r = 0; r < opt.bootstrap; ++r) {
        Rng rng(opt.seed, "tv-bootstrap", r * layers + k);
        std::fill(cx.begin(), cx.end(), 0);
        std::fill(cy.begin(), cy.end(), 0);
        for (std::size_t s = 0; s < opt.samples; ++s) ++cx[bx[rng.uniform_index(opt.samples)]];
        for (std::size_t s = 0; s < opt.samples; ++s) ++cy[by[rng.uniform_index(opt.samples)]];
        reps[r] = tv_from_counts(cx, opt.samples, cy, opt.samples);
      }
      CompensatedSum sum;
      for (double v : reps) sum.add(v);
      const double mean = sum.value() / static_cast<double>(reps.size());
      CompensatedSum sq;
      for (double v : reps) sq.add((v - mean) * (v - mean));
      point.bootstrap_se = std::sqrt(sq.value() / static_cast<double>(reps.size() - 1));
    }
    report.per_depth.push_back(point);
  }
  return report;
}

}  // namespace csbm
