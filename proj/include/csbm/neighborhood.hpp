#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "csbm/graph.hpp"

namespace csbm {

// Distance shells N_0..N_radius around a root. Shell k holds exactly the
// nodes at graph distance k, sorted ascending.
class ShellDecomposition {
 public:
  ShellDecomposition(NodeId root, int radius, std::vector<NodeId> nodes,
                     std::vector<std::size_t> offsets);

  NodeId root() const noexcept { return root_; }
  int radius() const noexcept { return radius_; }
  std::span<const NodeId> shell(int k) const {
    return {nodes_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
  }
  // All nodes of the ball, shell by shell.
  std::span<const NodeId> ball() const noexcept { return nodes_; }
  std::size_t ball_size() const noexcept { return nodes_.size(); }
  std::optional<int> distance(NodeId v) const;

 private:
  NodeId root_;
  int radius_;
  std::vector<NodeId> nodes_;
  std::vector<std::size_t> offsets_;
};

// Reusable breadth-first workspace; one per thread. Marking is stamp-based,
// so each query costs only the size of the explored ball.
class ShellExplorer {
 public:
  explicit ShellExplorer(const CsbmGraph& g);

  ShellDecomposition shells(NodeId u, int radius);
  bool is_tree(NodeId u, int radius);

 private:
  void explore(NodeId u, int radius);

  const CsbmGraph& graph_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> order_;
  std::vector<std::size_t> offsets_;
};

ShellDecomposition shells(const CsbmGraph& g, NodeId u, int radius);

// n x n binary matrix in CSR form; one row per root.
struct SparseBinaryMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_offsets;
  std::vector<NodeId> cols;

  std::span<const NodeId> row(std::size_t u) const {
    return {cols.data() + row_offsets[u], row_offsets[u + 1] - row_offsets[u]};
  }
  std::size_t nnz() const noexcept { return cols.size(); }
};

inline constexpr std::size_t kDefaultShellEntryCap = 100'000'000;

// Shell indicator matrices for k = 0..radius; row u of matrix k indicates N_k(u)
// (matrix 0 is the identity). Total stored entries equal the summed ball sizes;
// exceeding entry_cap throws CapacityError.
std::vector<SparseBinaryMatrix> shell_tensor(const CsbmGraph& g, int radius,
                                             std::size_t entry_cap = kDefaultShellEntryCap,
                                             unsigned threads = 1);

bool is_tree_neighbourhood(const CsbmGraph& g, NodeId u, int radius);
double cycle_free_fraction(const CsbmGraph& g, int radius, unsigned threads = 1);

struct LabeledShellCounts {
  std::vector<std::int64_t> u_plus;   // shell members sharing the root's label
  std::vector<std::int64_t> u_minus;  // shell members with the other label
};

// Two-class graphs only; both sequences have length radius + 1.
LabeledShellCounts labeled_shell_counts(const CsbmGraph& g, NodeId u, int radius);
LabeledShellCounts labeled_shell_counts(const CsbmGraph& g, const ShellDecomposition& sd);

}  // namespace csbm
