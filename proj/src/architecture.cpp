#include "csbm/architecture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csbm/errors.hpp"
#include "csbm/numeric.hpp"

namespace csbm {

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "exp") return Activation::exp;
  if (name == "softmax") return Activation::softmax;
  throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::exp: return "exp";
    case Activation::softmax: return "softmax";
  }
  return "?";
}

void ArchitectureParams::validate(std::size_t input_dim) const {
  if (layers.empty()) throw InvalidArgument("architecture needs at least one layer");
  if (num_classes < 2) throw InvalidArgument("architecture needs C >= 2");
  if (z.size() != num_classes * num_classes) throw InvalidArgument("Z must be C x C");
  if (radius < 0) throw InvalidArgument("radius must be >= 0");
  std::size_t dim = input_dim;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.in_dim != dim) {
      throw InvalidArgument("layer " + std::to_string(l + 1) + " expects input width " +
                            std::to_string(layer.in_dim) + ", got " + std::to_string(dim));
    }
    if (layer.weights.size() != layer.in_dim * layer.out_dim ||
        layer.bias.size() != layer.out_dim) {
      throw InvalidArgument("layer " + std::to_string(l + 1) + " has mis-sized parameters");
    }
    dim = layer.out_dim;
  }
  if (dim != num_classes) throw InvalidArgument("final layer must output C columns");
}

std::vector<std::vector<double>> connectivity_powers(const ArchitectureParams& params) {
  const std::size_t C = params.num_classes;
  std::vector<double> q(C * C);
  for (std::size_t e = 0; e < C * C; ++e) q[e] = 1.0 / (1.0 + std::exp(-params.z[e]));
  std::vector<std::vector<double>> out(static_cast<std::size_t>(params.radius) + 1,
                                       std::vector<double>(C * C, 0.0));
  for (std::size_t i = 0; i < C; ++i) out[0][i * C + i] = 1.0;
  for (std::size_t k = 1; k < out.size(); ++k) {
    for (std::size_t i = 0; i < C; ++i) {
      for (std::size_t j = 0; j < C; ++j) {
        double acc = 0.0;
        for (std::size_t m = 0; m < C; ++m) acc += out[k - 1][i * C + m] * q[m * C + j];
        out[k][i * C + j] = acc;
      }
    }
  }
  return out;
}

namespace {

std::vector<double> apply_layer(const std::vector<double>& in, std::size_t rows,
                                const DenseLayer& layer) {
  std::vector<double> out(rows * layer.out_dim);
  for (std::size_t r = 0; r < rows; ++r) {
    double* o = out.data() + r * layer.out_dim;
    const double* x = in.data() + r * layer.in_dim;
    for (std::size_t c = 0; c < layer.out_dim; ++c) o[c] = layer.bias[c];
    for (std::size_t j = 0; j < layer.in_dim; ++j) {
      const double xj = x[j];
      const double* w = layer.weights.data() + j * layer.out_dim;
      for (std::size_t c = 0; c < layer.out_dim; ++c) o[c] += xj * w[c];
    }
    switch (layer.activation) {
      case Activation::identity: break;
      case Activation::relu:
        for (std::size_t c = 0; c < layer.out_dim; ++c) o[c] = std::max(0.0, o[c]);
        break;
      case Activation::sigmoid:
        for (std::size_t c = 0; c < layer.out_dim; ++c) o[c] = 1.0 / (1.0 + std::exp(-o[c]));
        break;
      case Activation::tanh:
        for (std::size_t c = 0; c < layer.out_dim; ++c) o[c] = std::tanh(o[c]);
        break;
      case Activation::exp:
        for (std::size_t c = 0; c < layer.out_dim; ++c) o[c] = std::exp(o[c]);
        break;
      case Activation::softmax: {
        const double top = *std::max_element(o, o + layer.out_dim);
        double total = 0.0;
        for (std::size_t c = 0; c < layer.out_dim; ++c) {
          o[c] = std::exp(o[c] - top);
          total += o[c];
        }
        for (std::size_t c = 0; c < layer.out_dim; ++c) o[c] /= total;
        break;
      }
    }
    for (std::size_t c = 0; c < layer.out_dim; ++c) {
      if (!std::isfinite(o[c])) {
        throw NumericOverflow("non-finite activation at row " + std::to_string(r) +
                              ", column " + std::to_string(c));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Prediction> arch_forward(const CsbmGraph& g,
                                     const std::vector<SparseBinaryMatrix>& tensor,
                                     const ArchitectureParams& params) {
  params.validate(g.dim());
  const std::size_t n = g.num_nodes();
  const std::size_t C = params.num_classes;
  const auto layers = static_cast<std::size_t>(params.radius) + 1;
  if (tensor.size() < layers) throw InvalidArgument("shell tensor radius is below params.radius");
  for (std::size_t k = 0; k < layers; ++k) {
    if (tensor[k].n != n) throw InvalidArgument("shell tensor size differs from graph");
  }

  std::vector<double> h = g.feature_matrix();
  for (const auto& layer : params.layers) h = apply_layer(h, n, layer);

  const auto q_pow = connectivity_powers(params);

  // messages[k][v * C + i] = log <H_v, (Q^k)_{:,i}>
  std::vector<std::vector<double>> messages(layers, std::vector<double>(n * C));
  for (std::size_t k = 0; k < layers; ++k) {
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < C; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < C; ++c) acc += h[v * C + c] * q_pow[k][c * C + i];
        const double m = std::log(acc);
        if (std::isnan(m)) {
          throw NumericError("message inner product is negative at node " + std::to_string(v));
        }
        messages[k][v * C + i] = m;
      }
    }
  }

  std::vector<Prediction> out(n);
  for (std::size_t u = 0; u < n; ++u) {
    auto& pred = out[u];
    pred.scores.assign(C, 0.0);
    for (std::size_t k = 0; k < layers; ++k) {
      for (NodeId v : tensor[k].row(u)) {
        for (std::size_t i = 0; i < C; ++i) pred.scores[i] += messages[k][v * C + i];
      }
    }
    pred.label = argmax_label(pred.scores);
  }
  return out;
}

ArchitectureParams realize_optimal(const FeatureModel& fm, const EdgeRateMatrix& rates,
                                   std::size_t n, int radius) {
  if (fm.num_classes() != rates.num_classes()) {
    throw InvalidArgument("feature model and edge-rate matrix disagree on C");
  }
  if (n == 0) throw InvalidArgument("n must be >= 1");
  auto layer = fm.density_layer();
  if (!layer) throw InvalidArgument("feature model has no closed-form density layer");
  const std::size_t C = rates.num_classes();
  ArchitectureParams params;
  params.layers.push_back(std::move(*layer));
  params.num_classes = C;
  params.radius = radius;
  params.z.resize(C * C);
  for (std::size_t i = 0; i < C; ++i) {
    for (std::size_t j = 0; j < C; ++j) {
      const double q = rates(i, j) / static_cast<double>(n);
      if (!(q > 0.0 && q < 1.0)) {
        throw InvalidArgument("edge probability b_" + std::to_string(i) + std::to_string(j) +
                              "/n = " + std::to_string(q) +
                              " has no finite logit; clip the rate into (0, n)");
      }
      params.z[i * C + j] = std::log(q) - std::log1p(-q);
    }
  }
  params.validate(fm.dim());
  return params;
}

}  // namespace csbm
