#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace csbm {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(x) + exp(y)) over the extended reals; -inf is the additive identity.
inline double log_add_exp(double x, double y) noexcept {
  if (x < y) std::swap(x, y);
  if (y == kNegInf) return x;
  if (x == std::numeric_limits<double>::infinity()) return x;
  return x + std::log1p(std::exp(y - x));
}

inline double log_sum_exp(std::span<const double> args) noexcept {
  if (args.empty()) return kNegInf;
  const double top = *std::max_element(args.begin(), args.end());
  if (top == kNegInf || std::isinf(top)) return top;
  double sum = 0.0;
  for (double a : args) sum += std::exp(a - top);
  return top + std::log(sum);
}

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace csbm
