#pragma once

#include <cstdint>
#include <vector>

#include "csbm/feature_model.hpp"
#include "csbm/graph.hpp"
#include "csbm/model.hpp"
#include "csbm/neighborhood.hpp"
#include "csbm/rng.hpp"

namespace csbm::test {

inline CsbmGraph make_graph(std::size_t C, std::size_t d, std::vector<ClassId> labels,
                            std::vector<Edge> edges, std::vector<double> features = {}) {
  if (features.empty()) features.assign(labels.size() * d, 0.0);
  return CsbmGraph(C, d, std::move(labels), std::move(features), edges);
}

// Erdos-Renyi style graph with edge probability p, uniform labels and N(0,1) features.
inline CsbmGraph random_graph(std::size_t n, double p, std::size_t C, std::size_t d, Rng& rng) {
  std::vector<ClassId> labels(n);
  for (auto& l : labels) l = static_cast<ClassId>(rng.uniform_index(C));
  std::vector<double> features(n * d);
  for (auto& x : features) x = rng.standard_normal();
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.uniform_open() < p) edges.push_back({u, v});
    }
  }
  return CsbmGraph(C, d, std::move(labels), std::move(features), edges);
}

// Random recursive tree on n nodes rooted at 0: node v attaches to a uniform earlier node.
inline CsbmGraph random_tree(std::size_t n, std::size_t C, std::size_t d, Rng& rng) {
  std::vector<ClassId> labels(n);
  for (auto& l : labels) l = static_cast<ClassId>(rng.uniform_index(C));
  std::vector<double> features(n * d);
  for (auto& x : features) x = rng.standard_normal();
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v) edges.push_back({static_cast<NodeId>(rng.uniform_index(v)), v});
  return CsbmGraph(C, d, std::move(labels), std::move(features), edges);
}

// Dense shell indicators from integer adjacency powers:
// shell_k = [A^k > 0] and not [sum_{m<k} A^m > 0], A^0 = I.
inline std::vector<std::vector<std::uint8_t>> dense_shell_oracle(const CsbmGraph& g, int radius) {
  const std::size_t n = g.num_nodes();
  std::vector<std::int64_t> adj(n * n, 0), power(n * n, 0), reach(n * n, 0);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) adj[u * n + v] = 1;
    power[u * n + u] = 1;
  }
  std::vector<std::vector<std::uint8_t>> shells;
  for (int k = 0; k <= radius; ++k) {
    if (k > 0) {
      std::vector<std::int64_t> next(n * n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t m = 0; m < n; ++m) {
          if (power[i * n + m] == 0) continue;
          for (std::size_t j = 0; j < n; ++j) next[i * n + j] += power[i * n + m] * adj[m * n + j];
        }
      }
      // Clamp to an indicator so powers never overflow; only positivity matters.
      for (auto& x : next) x = x > 0 ? 1 : 0;
      power = std::move(next);
    }
    std::vector<std::uint8_t> shell(n * n, 0);
    for (std::size_t e = 0; e < n * n; ++e) shell[e] = power[e] > 0 && reach[e] == 0;
    for (std::size_t e = 0; e < n * n; ++e) reach[e] += power[e];
    shells.push_back(std::move(shell));
  }
  return shells;
}

// Random tree of at most max_nodes nodes rooted at 0, with random Gaussian class
// means, a random symmetric positive rate matrix and features drawn from the model.
struct TreeInstance {
  CsbmGraph graph;
  GaussianFeatureModel features;
  EdgeRateMatrix rates;
  int radius = 0;
};

inline TreeInstance random_tree_instance(std::size_t C, std::size_t max_nodes, Rng& rng) {
  const std::size_t d = 1 + rng.uniform_index(3);
  std::vector<std::vector<double>> means(C, std::vector<double>(d));
  for (auto& m : means) {
    for (auto& x : m) x = rng.standard_normal();
  }
  GaussianFeatureModel fm(means, 0.5 + rng.uniform_open());
  std::vector<double> b(C * C);
  for (std::size_t i = 0; i < C; ++i) {
    for (std::size_t j = i; j < C; ++j) b[i * C + j] = b[j * C + i] = 0.1 + 6.0 * rng.uniform_open();
  }
  const std::size_t n = 1 + rng.uniform_index(max_nodes);
  auto skeleton = random_tree(n, C, d, rng);
  std::vector<double> x(n * d);
  for (NodeId v = 0; v < n; ++v) {
    fm.sample(skeleton.label(v), rng, std::span<double>(x.data() + v * d, d));
  }
  const auto edges = skeleton.edge_list();
  CsbmGraph g(C, d, std::vector<ClassId>(skeleton.labels().begin(), skeleton.labels().end()),
              std::move(x), edges);
  const int radius = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  return {std::move(g), std::move(fm), EdgeRateMatrix(C, std::move(b)), radius};
}

}  // namespace csbm::test
