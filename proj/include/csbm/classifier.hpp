#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csbm/feature_model.hpp"
#include "csbm/graph.hpp"
#include "csbm/model.hpp"
#include "csbm/neighborhood.hpp"

namespace csbm {

struct Prediction {
  ClassId label = 0;
  std::vector<double> scores;  // per-class log-scores; binary rules use {T, 0}

  int sign() const noexcept { return binary_sign(label); }
};

// Index of the largest score, lowest index on ties. -inf everywhere or any NaN
// raises DegenerateLikelihood.
ClassId argmax_label(std::span<const double> scores);

// n x C table of log rho_c(X_v), computed once per graph.
class LogDensityTable {
 public:
  LogDensityTable(const CsbmGraph& g, const FeatureModel& fm, unsigned threads = 1);
  LogDensityTable(std::size_t num_classes, std::vector<double> values);

  std::span<const double> row(NodeId v) const {
    return {values_.data() + static_cast<std::size_t>(v) * num_classes_, num_classes_};
  }
  std::size_t num_classes() const noexcept { return num_classes_; }

 private:
  std::size_t num_classes_;
  std::vector<double> values_;
};

// Per-distance message for the symmetric two-class model with the signed ratio
// s = (a - b) / (a + b):
//   M(x, k) = log((1 - s^k + psi (1 + s^k)) / (1 + s^k + psi (1 - s^k)))
//           = 2 atanh(s^k tanh(log psi / 2)),
// the second form being what is evaluated (psi itself is never formed).
class MessageKernel {
 public:
  MessageKernel(double signed_ratio, int radius);
  // a + b = 0 gives s = 0 (no graph signal).
  static MessageKernel from_rates(double a, double b, int radius);

  double signed_ratio() const noexcept { return s_; }
  int radius() const noexcept { return radius_; }
  // log_psi may be +-inf (hard evidence); NaN throws NumericError.
  double message(double log_psi, int k) const;

 private:
  double s_;
  int radius_;
  std::vector<double> power_;  // s^k
};

// Multiclass rule: score(i) = sum_k sum_{v in N_k} log <rho(X_v), (B^k)_i>,
// B^0 = I. Each power is rescaled by its largest row sum, which shifts every
// class score equally.
class MulticlassClassifier {
 public:
  MulticlassClassifier(const EdgeRateMatrix& rates, int radius);

  int radius() const noexcept { return radius_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  // log of the rescaled (B^k)_ij; -inf where the power is zero.
  double log_power(int k, std::size_t i, std::size_t j) const {
    return log_powers_[static_cast<std::size_t>(k) * num_classes_ * num_classes_ +
                       i * num_classes_ + j];
  }
  Prediction classify(const ShellDecomposition& sd, const LogDensityTable& log_dens) const;

 private:
  std::size_t num_classes_;
  int radius_;
  std::vector<double> log_powers_;
};

Prediction classify_multiclass(const ShellDecomposition& sd, FeatureView X,
                               const FeatureModel& fm, const EdgeRateMatrix& rates);

// sign(sum_{v in ball} M(X_v, d(u, v))) with sign(0) = +1. log_psi is indexed
// by node id.
Prediction classify_binary(const ShellDecomposition& sd, std::span<const double> log_psi,
                           const MessageKernel& kernel);

// Direct marginalisation over every labelling of the ball.
inline constexpr std::size_t kOracleMaxBall = 16;
inline constexpr std::size_t kOracleMaxAssignments = std::size_t{1} << 28;
Prediction map_bruteforce_oracle(const ShellDecomposition& sd, FeatureView X,
                                 const FeatureModel& fm, const EdgeRateMatrix& rates);

Prediction classify_feature_only(std::span<const double> x, const FeatureModel& fm);

// One-hop convolution sign(sum_{v in eta_1(u)} <X_v, mu>), two classes.
Prediction classify_gcn(const CsbmGraph& g, NodeId u, std::span<const double> mu);

// sign(sum_{v in ball} log psi(X_v)): the uniform log-likelihood convolution.
Prediction classify_convolution(const ShellDecomposition& sd, std::span<const double> log_psi);

}  // namespace csbm
