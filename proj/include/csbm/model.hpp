#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "csbm/feature_model.hpp"
#include "csbm/graph.hpp"

namespace csbm {

// Symmetric C x C matrix of scaled edge rates b_ij; at size n the edge
// probability between classes i and j is b_ij / n.
class EdgeRateMatrix {
 public:
  EdgeRateMatrix(std::size_t num_classes, std::vector<double> rates);

  // [[a, b], [b, a]]
  static EdgeRateMatrix binary(double a, double b);

  std::size_t num_classes() const noexcept { return num_classes_; }
  double operator()(std::size_t i, std::size_t j) const { return rates_[i * num_classes_ + j]; }
  const std::vector<double>& rates() const noexcept { return rates_; }
  double max_rate() const noexcept;

  // Throws unless every b_ij / n is a probability.
  void check_probabilities(std::size_t n) const;

 private:
  std::size_t num_classes_;
  std::vector<double> rates_;
};

struct SignalParams {
  double a = 0.0;
  double b = 0.0;
  double graph_snr = 0.0;     // |a - b| / (a + b)
  double signed_ratio = 0.0;  // (a - b) / (a + b)
  double feature_snr = 0.0;   // ||mu|| / sigma

  static SignalParams from(double a, double b, double feature_snr = 0.0);
};

// Labels i.i.d. uniform over [C]; edges per class-pair block with a Binomial
// count and uniformly chosen distinct endpoints; features from the class law.
CsbmGraph sample_csbm(std::size_t n, const FeatureModel& fm, const EdgeRateMatrix& rates,
                      std::uint64_t seed);

// Labels and edges only (d = 0). Draws the same labels and edges as
// sample_csbm for the same seed.
CsbmGraph sample_sbm(std::size_t n, const EdgeRateMatrix& rates, std::uint64_t seed);

CsbmGraph sample_binary_symmetric(std::size_t n, double a, double b, std::vector<double> mu,
                                  double sigma, std::uint64_t seed);

// +1 <-> class 0, -1 <-> class 1.
constexpr int binary_sign(ClassId c) noexcept { return c == 0 ? 1 : -1; }
constexpr ClassId binary_class(int sign) noexcept { return sign >= 0 ? 0 : 1; }

}  // namespace csbm
