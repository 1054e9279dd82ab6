#include "csbm/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csbm/errors.hpp"
#include "csbm/numeric.hpp"
#include "csbm/parallel.hpp"

namespace csbm {

ClassId argmax_label(std::span<const double> scores) {
  if (scores.empty()) throw InvalidArgument("no scores to compare");
  ClassId best = 0;
  bool any_finite_or_pos = false;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) {
      throw DegenerateLikelihood("score of class " + std::to_string(i) + " is NaN");
    }
    if (scores[i] != kNegInf) any_finite_or_pos = true;
    if (scores[i] > scores[best]) best = static_cast<ClassId>(i);
  }
  if (!any_finite_or_pos) {
    throw DegenerateLikelihood("degenerate likelihood: every class has score -inf");
  }
  return best;
}

LogDensityTable::LogDensityTable(const CsbmGraph& g, const FeatureModel& fm, unsigned threads)
    : num_classes_(fm.num_classes()), values_(g.num_nodes() * fm.num_classes()) {
  if (g.dim() != fm.dim()) throw InvalidArgument("feature model dimension differs from graph");
  parallel_for(g.num_nodes(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      fm.log_densities(g.features(static_cast<NodeId>(v)),
                       std::span<double>(values_.data() + v * num_classes_, num_classes_));
    }
  });
}

LogDensityTable::LogDensityTable(std::size_t num_classes, std::vector<double> values)
    : num_classes_(num_classes), values_(std::move(values)) {
  if (num_classes_ == 0 || values_.size() % num_classes_ != 0) {
    throw InvalidArgument("log-density table size is not a multiple of C");
  }
}

MessageKernel::MessageKernel(double signed_ratio, int radius)
    : s_(signed_ratio), radius_(radius) {
  if (!(s_ >= -1.0 && s_ <= 1.0)) throw InvalidArgument("signed ratio must lie in [-1, 1]");
  if (radius_ < 0) throw InvalidArgument("radius must be >= 0");
  const auto layers = static_cast<std::size_t>(radius_) + 1;
  power_.resize(layers);
  double p = 1.0;
  for (std::size_t k = 0; k < layers; ++k) {
    power_[k] = p;
    p *= s_;
  }
}

MessageKernel MessageKernel::from_rates(double a, double b, int radius) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw InvalidArgument("a and b must be >= 0");
  const double total = a + b;
  return MessageKernel(total > 0.0 ? (a - b) / total : 0.0, radius);
}

double MessageKernel::message(double log_psi, int k) const {
  if (k < 0 || k > radius_) throw InvalidArgument("distance outside kernel radius");
  if (std::isnan(log_psi)) throw NumericError("log likelihood ratio is NaN");
  const double p = power_[k];
  if (p == 0.0) return 0.0;
  if (p == 1.0) return log_psi;
  if (p == -1.0) return -log_psi;
  // (psi - 1) / (psi + 1) = tanh(log_psi / 2), so the ratio collapses to an
  // atanh with no cancellation when s^k is small; tanh(+-inf) = +-1.
  return 2.0 * std::atanh(p * std::tanh(0.5 * log_psi));
}

MulticlassClassifier::MulticlassClassifier(const EdgeRateMatrix& rates, int radius)
    : num_classes_(rates.num_classes()), radius_(radius) {
  if (radius_ < 0) throw InvalidArgument("radius must be >= 0");
  const std::size_t C = num_classes_;
  const auto layers = static_cast<std::size_t>(radius_) + 1;
  log_powers_.assign(layers * C * C, kNegInf);

  std::vector<double> power(C * C, 0.0);
  for (std::size_t i = 0; i < C; ++i) power[i * C + i] = 1.0;
  std::vector<double> next(C * C);
  for (std::size_t k = 0; k < layers; ++k) {
    if (k > 0) {
      double top = 0.0;
      for (std::size_t i = 0; i < C; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < C; ++j) {
          double acc = 0.0;
          for (std::size_t m = 0; m < C; ++m) acc += power[i * C + m] * rates(m, j);
          next[i * C + j] = acc;
          row_sum += acc;
        }
        top = std::max(top, row_sum);
      }
      if (top > 0.0) {
        for (auto& x : next) x /= top;
      }
      power.swap(next);
    }
    for (std::size_t e = 0; e < C * C; ++e) {
      log_powers_[k * C * C + e] = power[e] > 0.0 ? std::log(power[e]) : kNegInf;
    }
  }
}

namespace {

template <typename RowFn>
Prediction score_multiclass(const MulticlassClassifier& clf, const ShellDecomposition& sd,
                            RowFn&& log_density_row) {
  if (sd.radius() > clf.radius()) {
    throw InvalidArgument("shell radius exceeds the classifier radius");
  }
  const std::size_t C = clf.num_classes();
  Prediction out;
  out.scores.assign(C, 0.0);
  std::vector<double> terms(C);
  for (int k = 0; k <= sd.radius(); ++k) {
    for (NodeId v : sd.shell(k)) {
      const std::span<const double> lr = log_density_row(v);
      for (std::size_t i = 0; i < C; ++i) {
        double msg;
        if (k == 0) {
          msg = lr[i];
        } else {
          for (std::size_t j = 0; j < C; ++j) terms[j] = lr[j] + clf.log_power(k, i, j);
          msg = log_sum_exp(terms);
        }
        out.scores[i] += msg;
      }
    }
  }
  out.label = argmax_label(out.scores);
  return out;
}

double checked_sum(double acc, double term) {
  const double r = acc + term;
  if (std::isnan(r)) throw NumericError("conflicting hard evidence (+inf and -inf messages)");
  return r;
}

Prediction binary_prediction(double total) {
  Prediction out;
  out.scores = {total, 0.0};
  out.label = total >= 0.0 ? 0 : 1;
  return out;
}

}  // namespace

Prediction MulticlassClassifier::classify(const ShellDecomposition& sd,
                                          const LogDensityTable& log_dens) const {
  if (log_dens.num_classes() != num_classes_) {
    throw InvalidArgument("log-density table has the wrong class count");
  }
  return score_multiclass(*this, sd, [&](NodeId v) { return log_dens.row(v); });
}

Prediction classify_multiclass(const ShellDecomposition& sd, FeatureView X,
                               const FeatureModel& fm, const EdgeRateMatrix& rates) {
  if (fm.num_classes() != rates.num_classes()) {
    throw InvalidArgument("feature model and edge-rate matrix disagree on C");
  }
  const MulticlassClassifier clf(rates, sd.radius());
  std::vector<double> buf(fm.num_classes());
  return score_multiclass(clf, sd, [&](NodeId v) -> std::span<const double> {
    fm.log_densities(X.row(v), buf);
    return buf;
  });
}

Prediction classify_binary(const ShellDecomposition& sd, std::span<const double> log_psi,
                           const MessageKernel& kernel) {
  if (kernel.radius() < sd.radius()) {
    throw InvalidArgument("message kernel radius is smaller than the shell radius");
  }
  double total = 0.0;
  for (int k = 0; k <= sd.radius(); ++k) {
    for (NodeId v : sd.shell(k)) total = checked_sum(total, kernel.message(log_psi[v], k));
  }
  return binary_prediction(total);
}

Prediction map_bruteforce_oracle(const ShellDecomposition& sd, FeatureView X,
                                 const FeatureModel& fm, const EdgeRateMatrix& rates) {
  const std::size_t C = fm.num_classes();
  if (rates.num_classes() != C) {
    throw InvalidArgument("feature model and edge-rate matrix disagree on C");
  }
  const std::size_t ball = sd.ball_size();
  if (ball > kOracleMaxBall) {
    throw CapacityError("neighbourhood of " + std::to_string(ball) +
                        " nodes is too large for enumeration (limit " +
                        std::to_string(kOracleMaxBall) + ")");
  }
  const std::size_t others = ball - 1;
  std::size_t assignments = 1;
  for (std::size_t i = 0; i < others; ++i) {
    assignments *= C;
    if (assignments > kOracleMaxAssignments) {
      throw CapacityError("too many labellings to enumerate");
    }
  }

  // Q^k up to a positive factor: powers of B divided by its largest entry.
  const double top = rates.max_rate();
  const auto layers = static_cast<std::size_t>(sd.radius()) + 1;
  std::vector<std::vector<double>> q_pow(layers, std::vector<double>(C * C, 0.0));
  for (std::size_t i = 0; i < C; ++i) q_pow[0][i * C + i] = 1.0;
  for (std::size_t k = 1; k < layers; ++k) {
    for (std::size_t i = 0; i < C; ++i) {
      for (std::size_t j = 0; j < C; ++j) {
        double acc = 0.0;
        for (std::size_t m = 0; m < C; ++m) {
          acc += q_pow[k - 1][i * C + m] * (top > 0.0 ? rates(m, j) / top : 0.0);
        }
        q_pow[k][i * C + j] = acc;
      }
    }
  }

  // Node densities divided by their per-node maximum (a labelling-independent factor).
  std::vector<NodeId> nodes(sd.ball().begin(), sd.ball().end());
  std::vector<int> dist;
  dist.reserve(ball);
  for (int k = 0; k <= sd.radius(); ++k) dist.insert(dist.end(), sd.shell(k).size(), k);
  std::vector<double> dens(ball * C);
  std::vector<double> lr(C);
  for (std::size_t t = 0; t < ball; ++t) {
    fm.log_densities(X.row(nodes[t]), lr);
    const double m = *std::max_element(lr.begin(), lr.end());
    for (std::size_t j = 0; j < C; ++j) {
      dens[t * C + j] = m == kNegInf ? 0.0 : std::exp(lr[j] - m);
    }
  }

  // nodes[0] is the root (shell 0).
  Prediction out;
  out.scores.assign(C, kNegInf);
  std::vector<std::size_t> label(others, 0);
  for (std::size_t root_label = 0; root_label < C; ++root_label) {
    double total = 0.0;
    std::fill(label.begin(), label.end(), 0);
    for (std::size_t a = 0; a < assignments; ++a) {
      double prod = 1.0;
      for (std::size_t t = 0; t < others; ++t) {
        const std::size_t y = label[t];
        prod *= dens[(t + 1) * C + y] *
                q_pow[static_cast<std::size_t>(dist[t + 1])][root_label * C + y];
      }
      total += prod;
      for (std::size_t t = 0; t < others; ++t) {
        if (++label[t] < C) break;
        label[t] = 0;
      }
    }
    const double likelihood = dens[root_label] * total;
    out.scores[root_label] = likelihood > 0.0 ? std::log(likelihood) : kNegInf;
  }
  out.label = argmax_label(out.scores);
  return out;
}

Prediction classify_feature_only(std::span<const double> x, const FeatureModel& fm) {
  Prediction out;
  out.scores.resize(fm.num_classes());
  fm.log_densities(x, out.scores);
  out.label = argmax_label(out.scores);
  return out;
}

Prediction classify_gcn(const CsbmGraph& g, NodeId u, std::span<const double> mu) {
  if (g.num_classes() != 2) throw InvalidArgument("GCN rule needs C = 2");
  if (mu.size() != g.dim()) throw InvalidArgument("mu dimension differs from graph");
  if (u >= g.num_nodes()) throw InvalidArgument("node out of range");
  auto dot = [&](NodeId v) {
    const auto x = g.features(v);
    double acc = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) acc += x[j] * mu[j];
    return acc;
  };
  double total = dot(u);
  for (NodeId v : g.neighbors(u)) total += dot(v);
  return binary_prediction(total);
}

Prediction classify_convolution(const ShellDecomposition& sd, std::span<const double> log_psi) {
  double total = 0.0;
  for (NodeId v : sd.ball()) {
    if (std::isnan(log_psi[v])) throw NumericError("log likelihood ratio is NaN");
    total = checked_sum(total, log_psi[v]);
  }
  return binary_prediction(total);
}

}  // namespace csbm
