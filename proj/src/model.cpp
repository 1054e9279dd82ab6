#include "csbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csbm/errors.hpp"
#include "csbm/rng.hpp"

namespace csbm {

EdgeRateMatrix::EdgeRateMatrix(std::size_t num_classes, std::vector<double> rates)
    : num_classes_(num_classes), rates_(std::move(rates)) {
  if (num_classes_ < 2) throw InvalidArgument("edge-rate matrix needs C >= 2");
  if (rates_.size() != num_classes_ * num_classes_) {
    throw InvalidArgument("edge-rate matrix must have C*C entries");
  }
  for (std::size_t i = 0; i < num_classes_; ++i) {
    for (std::size_t j = 0; j < num_classes_; ++j) {
      const double r = (*this)(i, j);
      if (!(r >= 0.0) || !std::isfinite(r)) {
        throw InvalidArgument("edge rates must be finite and >= 0");
      }
      if (r != (*this)(j, i)) throw InvalidArgument("edge-rate matrix must be symmetric");
    }
  }
}

EdgeRateMatrix EdgeRateMatrix::binary(double a, double b) {
  return EdgeRateMatrix(2, {a, b, b, a});
}

double EdgeRateMatrix::max_rate() const noexcept {
  return *std::max_element(rates_.begin(), rates_.end());
}

void EdgeRateMatrix::check_probabilities(std::size_t n) const {
  if (n == 0) throw InvalidArgument("graph size n must be >= 1");
  if (max_rate() > static_cast<double>(n)) {
    throw InvalidArgument("edge rate " + std::to_string(max_rate()) + " exceeds n = " +
                          std::to_string(n) + " (edge probability above 1)");
  }
}

SignalParams SignalParams::from(double a, double b, double feature_snr) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw InvalidArgument("a and b must be >= 0");
  if (!(a + b > 0.0)) throw InvalidArgument("a + b must be > 0");
  SignalParams p;
  p.a = a;
  p.b = b;
  p.signed_ratio = (a - b) / (a + b);
  p.graph_snr = std::abs(p.signed_ratio);
  p.feature_snr = feature_snr;
  return p;
}

namespace {

struct Structure {
  std::vector<ClassId> labels;
  std::vector<Edge> edges;
};

// Distinct uniform pairs from a block. Keys are u * n + v with u < v.
void sample_block(std::size_t n, std::span<const NodeId> left, std::span<const NodeId> right,
                  bool same_class, std::uint64_t pair_count, std::uint64_t edge_count,
                  Rng& rng, std::vector<Edge>& out) {
  if (edge_count == 0) return;
  auto draw_key = [&]() -> std::uint64_t {
    NodeId u, v;
    if (same_class) {
      const auto i = rng.uniform_index(left.size());
      auto j = rng.uniform_index(left.size() - 1);
      if (j >= i) ++j;
      u = left[i];
      v = left[j];
    } else {
      u = left[rng.uniform_index(left.size())];
      v = right[rng.uniform_index(right.size())];
    }
    if (u > v) std::swap(u, v);
    return static_cast<std::uint64_t>(u) * n + v;
  };

  // Dense blocks: pick the complement instead, over an explicit enumeration.
  const bool complement = edge_count * 2 > pair_count;
  const std::uint64_t target = complement ? pair_count - edge_count : edge_count;

  std::vector<std::uint64_t> keys;
  keys.reserve(target);
  while (keys.size() < target) {
    const auto missing = target - keys.size();
    for (std::uint64_t i = 0; i < missing; ++i) keys.push_back(draw_key());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  }

  auto emit = [&](std::uint64_t key) {
    out.emplace_back(static_cast<NodeId>(key / n), static_cast<NodeId>(key % n));
  };
  if (!complement) {
    for (auto key : keys) emit(key);
    return;
  }
  std::vector<std::uint64_t> all;
  all.reserve(pair_count);
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (same_class) {
      for (std::size_t j = i + 1; j < left.size(); ++j) {
        all.push_back(static_cast<std::uint64_t>(std::min(left[i], left[j])) * n +
                      std::max(left[i], left[j]));
      }
    } else {
      for (NodeId r : right) {
        all.push_back(static_cast<std::uint64_t>(std::min(left[i], r)) * n +
                      std::max(left[i], r));
      }
    }
  }
  std::sort(all.begin(), all.end());
  std::size_t k = 0;
  for (auto key : all) {
    while (k < keys.size() && keys[k] < key) ++k;
    if (k < keys.size() && keys[k] == key) continue;
    emit(key);
  }
}

Structure sample_structure(std::size_t n, const EdgeRateMatrix& rates, std::uint64_t seed) {
  rates.check_probabilities(n);
  if (n > std::numeric_limits<NodeId>::max()) throw InvalidArgument("n too large");
  const std::size_t C = rates.num_classes();
  Structure s;
  s.labels.resize(n);
  Rng label_rng(seed, "labels");
  std::vector<std::vector<NodeId>> members(C);
  for (std::size_t u = 0; u < n; ++u) {
    const auto c = static_cast<ClassId>(label_rng.uniform_index(C));
    s.labels[u] = c;
    members[c].push_back(static_cast<NodeId>(u));
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  std::uint64_t block = 0;
  for (std::size_t i = 0; i < C; ++i) {
    for (std::size_t j = i; j < C; ++j, ++block) {
      const std::uint64_t ni = members[i].size();
      const std::uint64_t nj = members[j].size();
      const std::uint64_t pairs = i == j ? ni * (ni - (ni > 0 ? 1 : 0)) / 2 : ni * nj;
      if (pairs == 0) continue;
      const double p = std::min(1.0, rates(i, j) * inv_n);
      Rng rng(seed, "edges", block);
      const auto m =
          static_cast<std::uint64_t>(rng.binomial(static_cast<std::int64_t>(pairs), p));
      sample_block(n, members[i], members[j], i == j, pairs, m, rng, s.edges);
    }
  }
  return s;
}

}  // namespace

CsbmGraph sample_sbm(std::size_t n, const EdgeRateMatrix& rates, std::uint64_t seed) {
  auto s = sample_structure(n, rates, seed);
  return CsbmGraph(rates.num_classes(), 0, std::move(s.labels), {}, s.edges);
}

CsbmGraph sample_csbm(std::size_t n, const FeatureModel& fm, const EdgeRateMatrix& rates,
                      std::uint64_t seed) {
  if (fm.num_classes() != rates.num_classes()) {
    throw InvalidArgument("feature model and edge-rate matrix disagree on C");
  }
  auto s = sample_structure(n, rates, seed);
  const std::size_t d = fm.dim();
  std::vector<double> features(n * d);
  for (std::size_t u = 0; u < n; ++u) {
    Rng rng(seed, "features", u);
    fm.sample(s.labels[u], rng, std::span<double>(features.data() + u * d, d));
  }
  return CsbmGraph(rates.num_classes(), d, std::move(s.labels), std::move(features), s.edges);
}

CsbmGraph sample_binary_symmetric(std::size_t n, double a, double b, std::vector<double> mu,
                                  double sigma, std::uint64_t seed) {
  SignalParams::from(a, b);
  if (!(static_cast<double>(n) > std::max(a, b))) {
    throw InvalidArgument("n must exceed max(a, b)");
  }
  const auto fm = GaussianFeatureModel::binary_symmetric(std::move(mu), sigma);
  return sample_csbm(n, fm, EdgeRateMatrix::binary(a, b), seed);
}

}  // namespace csbm
