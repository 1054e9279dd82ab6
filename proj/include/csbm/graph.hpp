#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace csbm {

using NodeId = std::uint32_t;
using ClassId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Row-major n x d feature matrix view.
struct FeatureView {
  std::span<const double> data;
  std::size_t dim = 0;

  std::span<const double> row(NodeId v) const {
    return data.subspan(static_cast<std::size_t>(v) * dim, dim);
  }
};

// Immutable feature-decorated undirected graph with latent labels.
// Adjacency is CSR with each neighbour list sorted ascending.
class CsbmGraph {
 public:
  CsbmGraph() = default;

  // Validates and builds the adjacency. Edges may be given in either
  // orientation but each unordered pair at most once; self-loops are rejected.
  CsbmGraph(std::size_t num_classes, std::size_t dim, std::vector<ClassId> labels,
            std::vector<double> features, std::span<const Edge> edges);

  std::size_t num_nodes() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  ClassId label(NodeId u) const { return labels_[u]; }
  const std::vector<ClassId>& labels() const noexcept { return labels_; }

  std::span<const double> features(NodeId u) const {
    return {features_.data() + static_cast<std::size_t>(u) * dim_, dim_};
  }
  FeatureView feature_view() const noexcept { return {features_, dim_}; }
  const std::vector<double>& feature_matrix() const noexcept { return features_; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {neighbors_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  bool has_edge(NodeId u, NodeId v) const;

  // Every edge once as (u, v) with u < v, lexicographically sorted.
  std::vector<Edge> edge_list() const;

  bool operator==(const CsbmGraph&) const = default;

 private:
  std::size_t num_classes_ = 0;
  std::size_t dim_ = 0;
  std::vector<ClassId> labels_;
  std::vector<double> features_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
};

// Graph bundle text format, version 1:
//   csbm-graph v1
//   n=<int> d=<int> C=<int>
//   n lines: <label> <x_1> ... <x_d>
//   edges <m>
//   m lines: <u> <v>        (u < v, 0-indexed)
void write_graph(const CsbmGraph& g, std::ostream& out);
void write_graph(const CsbmGraph& g, const std::filesystem::path& path);
CsbmGraph read_graph(std::istream& in);
CsbmGraph read_graph(const std::filesystem::path& path);

}  // namespace csbm
