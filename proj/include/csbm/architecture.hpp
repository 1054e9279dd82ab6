#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "csbm/classifier.hpp"
#include "csbm/feature_model.hpp"
#include "csbm/graph.hpp"
#include "csbm/model.hpp"
#include "csbm/neighborhood.hpp"

namespace csbm {

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation a);

// Fixed-parameter message-passing network: an MLP producing per-node class
// profiles H, a learnable C x C connectivity Z with Q = sigmoid(Z), and
// distance-k messages M^(k)_{v,i} = log <H_v, (Q^k)_{:,i}>.
struct ArchitectureParams {
  std::vector<DenseLayer> layers;
  std::size_t num_classes = 0;
  std::vector<double> z;  // C x C, row-major
  int radius = 0;

  // Throws unless the layer chain maps input_dim to num_classes columns.
  void validate(std::size_t input_dim) const;
};

// Q^k for k = 0..radius (Q^0 = I), each C x C row-major.
std::vector<std::vector<double>> connectivity_powers(const ArchitectureParams& params);

// Prediction for every node. tensor[k] must hold the distance-k shells, with at
// least params.radius + 1 entries.
std::vector<Prediction> arch_forward(const CsbmGraph& g,
                                     const std::vector<SparseBinaryMatrix>& tensor,
                                     const ArchitectureParams& params);

// One layer mapping x to a vector proportional to rho(x), and Z = logit(B / n).
ArchitectureParams realize_optimal(const FeatureModel& fm, const EdgeRateMatrix& rates,
                                   std::size_t n, int radius);

}  // namespace csbm
