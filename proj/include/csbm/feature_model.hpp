#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "csbm/graph.hpp"
#include "csbm/rng.hpp"

namespace csbm {

enum class Activation { identity, relu, sigmoid, tanh, exp, softmax };

// Dense layer H -> act(H W + 1 b); W is in_dim x out_dim row-major.
struct DenseLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::identity;
};

// Per-class feature law: a sampler and a log-density for each class.
// log_density may return -inf where a class puts no mass.
class FeatureModel {
 public:
  virtual ~FeatureModel() = default;

  virtual std::size_t num_classes() const = 0;
  virtual std::size_t dim() const = 0;
  virtual void sample(ClassId c, Rng& rng, std::span<double> out) const = 0;
  virtual double log_density(ClassId c, std::span<const double> x) const = 0;

  // log rho_0(x) - log rho_1(x) for two-class models (class 0 is the "+1" side).
  virtual double log_likelihood_ratio(std::span<const double> x) const;

  // A single layer whose output is proportional, per input row, to the vector of
  // class densities. Absent when no closed form exists.
  virtual std::optional<DenseLayer> density_layer() const { return std::nullopt; }

  void log_densities(std::span<const double> x, std::span<double> out) const;
};

// Isotropic Gaussian classes N(mean_c, sigma^2 I).
class GaussianFeatureModel final : public FeatureModel {
 public:
  GaussianFeatureModel(std::vector<std::vector<double>> means, double sigma);

  // Classes {+1, -1} -> {0, 1} with means {+mu, -mu}.
  static GaussianFeatureModel binary_symmetric(std::vector<double> mu, double sigma);

  std::size_t num_classes() const override { return means_.size(); }
  std::size_t dim() const override { return dim_; }
  void sample(ClassId c, Rng& rng, std::span<double> out) const override;
  double log_density(ClassId c, std::span<const double> x) const override;
  // Closed form (2/sigma^2) <x, mu> in the symmetric binary case.
  double log_likelihood_ratio(std::span<const double> x) const override;
  std::optional<DenseLayer> density_layer() const override;

  const std::vector<std::vector<double>>& means() const noexcept { return means_; }
  double sigma() const noexcept { return sigma_; }
  bool is_binary_symmetric() const noexcept { return symmetric_; }
  // gamma = ||mu|| / sigma; symmetric binary models only.
  double feature_snr() const;

 private:
  std::vector<std::vector<double>> means_;
  double sigma_;
  std::size_t dim_;
  bool symmetric_ = false;
};

// One-dimensional discrete features: x[0] holds a category index in [0, K),
// class c draws it from pmf row c. Zero-probability categories give -inf.
class CategoricalFeatureModel final : public FeatureModel {
 public:
  explicit CategoricalFeatureModel(std::vector<std::vector<double>> pmf);

  std::size_t num_classes() const override { return pmf_.size(); }
  std::size_t dim() const override { return 1; }
  void sample(ClassId c, Rng& rng, std::span<double> out) const override;
  double log_density(ClassId c, std::span<const double> x) const override;

 private:
  std::vector<std::vector<double>> pmf_;
};

}  // namespace csbm
