#include "csbm/rng.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include <cmath>

#include "csbm/errors.hpp"

namespace csbm {

std::uint64_t Rng::uniform_index(std::uint64_t bound) noexcept {
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::standard_normal() {
  const double u = uniform_open();
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

std::int64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw InvalidArgument("poisson mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  boost::random::poisson_distribution<std::int64_t, double> dist(mean);
  return dist(*this);
}

std::int64_t Rng::binomial(std::int64_t trials, double p) {
  if (trials < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("binomial requires trials >= 0 and p in [0, 1]");
  }
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  boost::random::binomial_distribution<std::int64_t, double> dist(trials, p);
  return dist(*this);
}

}  // namespace csbm
