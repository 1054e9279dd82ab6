#include "csbm/feature_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "csbm/errors.hpp"
#include "csbm/numeric.hpp"

namespace csbm {

void FeatureModel::log_densities(std::span<const double> x, std::span<double> out) const {
  for (ClassId c = 0; c < num_classes(); ++c) out[c] = log_density(c, x);
}

double FeatureModel::log_likelihood_ratio(std::span<const double> x) const {
  if (num_classes() != 2) throw InvalidArgument("likelihood ratio needs exactly two classes");
  const double plus = log_density(0, x);
  const double minus = log_density(1, x);
  if (plus == minus) return 0.0;  // includes the -inf/-inf case
  return plus - minus;
}

GaussianFeatureModel::GaussianFeatureModel(std::vector<std::vector<double>> means, double sigma)
    : means_(std::move(means)), sigma_(sigma), dim_(means_.empty() ? 0 : means_[0].size()) {
  if (means_.size() < 2) throw InvalidArgument("Gaussian feature model needs >= 2 classes");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw InvalidArgument("sigma must be finite and > 0");
  }
  for (const auto& m : means_) {
    if (m.size() != dim_) throw InvalidArgument("class means must share one dimension");
    for (double v : m) {
      if (!std::isfinite(v)) throw InvalidArgument("class means must be finite");
    }
  }
}

GaussianFeatureModel GaussianFeatureModel::binary_symmetric(std::vector<double> mu,
                                                            double sigma) {
  std::vector<double> neg(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) neg[j] = -mu[j];
  GaussianFeatureModel model({std::move(mu), std::move(neg)}, sigma);
  model.symmetric_ = true;
  return model;
}

void GaussianFeatureModel::sample(ClassId c, Rng& rng, std::span<double> out) const {
  const auto& m = means_.at(c);
  for (std::size_t j = 0; j < dim_; ++j) out[j] = m[j] + sigma_ * rng.standard_normal();
}

double GaussianFeatureModel::log_density(ClassId c, std::span<const double> x) const {
  const auto& m = means_.at(c);
  double sq = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double diff = x[j] - m[j];
    sq += diff * diff;
  }
  const double var = sigma_ * sigma_;
  return -0.5 * sq / var -
         0.5 * static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi * var);
}

double GaussianFeatureModel::log_likelihood_ratio(std::span<const double> x) const {
  if (!symmetric_) return FeatureModel::log_likelihood_ratio(x);
  double dot = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) dot += x[j] * means_[0][j];
  return 2.0 * dot / (sigma_ * sigma_);
}

// softmax(x M^T / sigma^2 - ||m_c||^2 / (2 sigma^2)) is rho(x) divided by a
// per-row constant.
std::optional<DenseLayer> GaussianFeatureModel::density_layer() const {
  DenseLayer layer;
  layer.in_dim = dim_;
  layer.out_dim = means_.size();
  layer.weights.assign(dim_ * means_.size(), 0.0);
  layer.bias.assign(means_.size(), 0.0);
  layer.activation = Activation::softmax;
  const double var = sigma_ * sigma_;
  for (std::size_t c = 0; c < means_.size(); ++c) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      layer.weights[j * means_.size() + c] = means_[c][j] / var;
      sq += means_[c][j] * means_[c][j];
    }
    layer.bias[c] = -0.5 * sq / var;
  }
  return layer;
}

double GaussianFeatureModel::feature_snr() const {
  if (!symmetric_) throw InvalidArgument("feature SNR is defined for the symmetric binary model");
  double sq = 0.0;
  for (double v : means_[0]) sq += v * v;
  return std::sqrt(sq) / sigma_;
}

CategoricalFeatureModel::CategoricalFeatureModel(std::vector<std::vector<double>> pmf)
    : pmf_(std::move(pmf)) {
  if (pmf_.size() < 2) throw InvalidArgument("categorical model needs >= 2 classes");
  const auto k = pmf_[0].size();
  if (k == 0) throw InvalidArgument("categorical model needs >= 1 category");
  for (const auto& row : pmf_) {
    if (row.size() != k) throw InvalidArgument("pmf rows must have equal length");
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw InvalidArgument("pmf entries must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("pmf rows must sum to 1");
  }
}

void CategoricalFeatureModel::sample(ClassId c, Rng& rng, std::span<double> out) const {
  const auto& row = pmf_.at(c);
  const double u = rng.uniform_open();
  double acc = 0.0;
  std::size_t cat = row.size() - 1;
  for (std::size_t j = 0; j < row.size(); ++j) {
    acc += row[j];
    if (u < acc) {
      cat = j;
      break;
    }
  }
  while (row[cat] == 0.0) --cat;  // rounding in the tail of the cumulative sum
  out[0] = static_cast<double>(cat);
}

double CategoricalFeatureModel::log_density(ClassId c, std::span<const double> x) const {
  const auto& row = pmf_.at(c);
  const double v = x[0];
  if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(row.size())) {
    return kNegInf;
  }
  const double p = row[static_cast<std::size_t>(v)];
  return p > 0.0 ? std::log(p) : kNegInf;
}

}  // namespace csbm
