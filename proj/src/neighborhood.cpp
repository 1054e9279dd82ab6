#include "csbm/neighborhood.hpp"

#include <algorithm>
#include <string>

#include "csbm/errors.hpp"
#include "csbm/parallel.hpp"

namespace csbm {

ShellDecomposition::ShellDecomposition(NodeId root, int radius, std::vector<NodeId> nodes,
                                       std::vector<std::size_t> offsets)
    : root_(root), radius_(radius), nodes_(std::move(nodes)), offsets_(std::move(offsets)) {
  if (radius_ < 0) throw InvalidArgument("radius must be >= 0");
  if (offsets_.size() != static_cast<std::size_t>(radius_) + 2 || offsets_.front() != 0 ||
      offsets_.back() != nodes_.size()) {
    throw InvalidArgument("shell offsets do not match radius and node list");
  }
}

std::optional<int> ShellDecomposition::distance(NodeId v) const {
  for (int k = 0; k <= radius_; ++k) {
    const auto s = shell(k);
    if (std::binary_search(s.begin(), s.end(), v)) return k;
  }
  return std::nullopt;
}

ShellExplorer::ShellExplorer(const CsbmGraph& g) : graph_(g), stamp_(g.num_nodes(), 0) {}

void ShellExplorer::explore(NodeId u, int radius) {
  if (u >= graph_.num_nodes()) {
    throw InvalidArgument("node " + std::to_string(u) + " out of range (n = " +
                          std::to_string(graph_.num_nodes()) + ")");
  }
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  order_.clear();
  offsets_.clear();
  order_.push_back(u);
  stamp_[u] = epoch_;
  offsets_.push_back(0);
  offsets_.push_back(1);
  for (int k = 1; k <= radius; ++k) {
    const std::size_t begin = offsets_[k - 1];
    const std::size_t end = offsets_[k];
    for (std::size_t i = begin; i < end; ++i) {
      for (NodeId w : graph_.neighbors(order_[i])) {
        if (stamp_[w] != epoch_) {
          stamp_[w] = epoch_;
          order_.push_back(w);
        }
      }
    }
    std::sort(order_.begin() + static_cast<std::ptrdiff_t>(end), order_.end());
    offsets_.push_back(order_.size());
  }
}

ShellDecomposition ShellExplorer::shells(NodeId u, int radius) {
  explore(u, radius);
  return ShellDecomposition(u, radius, order_, offsets_);
}

bool ShellExplorer::is_tree(NodeId u, int radius) {
  explore(u, radius);
  // The ball is connected, so it is a tree iff it has exactly |ball| - 1 edges.
  std::size_t twice_edges = 0;
  for (NodeId v : order_) {
    for (NodeId w : graph_.neighbors(v)) {
      if (stamp_[w] == epoch_) ++twice_edges;
    }
  }
  return twice_edges / 2 + 1 == order_.size();
}

ShellDecomposition shells(const CsbmGraph& g, NodeId u, int radius) {
  ShellExplorer explorer(g);
  return explorer.shells(u, radius);
}

std::vector<SparseBinaryMatrix> shell_tensor(const CsbmGraph& g, int radius,
                                             std::size_t entry_cap, unsigned threads) {
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  const std::size_t n = g.num_nodes();
  const auto layers = static_cast<std::size_t>(radius) + 1;

  // Pass 1: shell sizes, to size the CSR arrays and enforce the cap up front.
  std::vector<std::size_t> sizes(n * layers);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    ShellExplorer explorer(g);
    for (std::size_t u = begin; u < end; ++u) {
      const auto sd = explorer.shells(static_cast<NodeId>(u), radius);
      for (std::size_t k = 0; k < layers; ++k) {
        sizes[u * layers + k] = sd.shell(static_cast<int>(k)).size();
      }
    }
  });
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  if (total > entry_cap) {
    throw CapacityError("shell tensor needs " + std::to_string(total) +
                        " entries, above the cap of " + std::to_string(entry_cap));
  }

  std::vector<SparseBinaryMatrix> out(layers);
  for (std::size_t k = 0; k < layers; ++k) {
    auto& m = out[k];
    m.n = n;
    m.row_offsets.assign(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) {
      m.row_offsets[u + 1] = m.row_offsets[u] + sizes[u * layers + k];
    }
    m.cols.resize(m.row_offsets[n]);
  }
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    ShellExplorer explorer(g);
    for (std::size_t u = begin; u < end; ++u) {
      const auto sd = explorer.shells(static_cast<NodeId>(u), radius);
      for (std::size_t k = 0; k < layers; ++k) {
        const auto s = sd.shell(static_cast<int>(k));
        std::copy(s.begin(), s.end(),
                  out[k].cols.begin() + static_cast<std::ptrdiff_t>(out[k].row_offsets[u]));
      }
    }
  });
  return out;
}

bool is_tree_neighbourhood(const CsbmGraph& g, NodeId u, int radius) {
  ShellExplorer explorer(g);
  return explorer.is_tree(u, radius);
}

double cycle_free_fraction(const CsbmGraph& g, int radius, unsigned threads) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return 1.0;
  std::vector<unsigned char> tree(n, 0);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    ShellExplorer explorer(g);
    for (std::size_t u = begin; u < end; ++u) {
      tree[u] = explorer.is_tree(static_cast<NodeId>(u), radius) ? 1 : 0;
    }
  });
  std::size_t count = 0;
  for (auto t : tree) count += t;
  return static_cast<double>(count) / static_cast<double>(n);
}

LabeledShellCounts labeled_shell_counts(const CsbmGraph& g, const ShellDecomposition& sd) {
  if (g.num_classes() != 2) throw InvalidArgument("labeled shell counts need C = 2");
  const ClassId root_label = g.label(sd.root());
  LabeledShellCounts out;
  const auto layers = static_cast<std::size_t>(sd.radius()) + 1;
  out.u_plus.assign(layers, 0);
  out.u_minus.assign(layers, 0);
  for (std::size_t k = 0; k < layers; ++k) {
    for (NodeId v : sd.shell(static_cast<int>(k))) {
      ++(g.label(v) == root_label ? out.u_plus[k] : out.u_minus[k]);
    }
  }
  return out;
}

LabeledShellCounts labeled_shell_counts(const CsbmGraph& g, NodeId u, int radius) {
  if (g.num_classes() != 2) throw InvalidArgument("labeled shell counts need C = 2");
  return labeled_shell_counts(g, shells(g, u, radius));
}

}  // namespace csbm
