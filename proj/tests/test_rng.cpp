#include <doctest.h>

#include <cmath>
#include <vector>

#include "csbm/numeric.hpp"
#include "csbm/parallel.hpp"
#include "csbm/rng.hpp"

using namespace csbm;

TEST_CASE("derived streams are reproducible and distinct") {
  CHECK(derive_seed(1, "edges", 3) == derive_seed(1, "edges", 3));
  CHECK(derive_seed(1, "edges", 3) != derive_seed(1, "edges", 4));
  CHECK(derive_seed(1, "edges", 3) != derive_seed(2, "edges", 3));
  CHECK(derive_seed(1, "edges", 3) != derive_seed(1, "labels", 3));
  Rng a(5, "x", 0), b(5, "x", 0);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("uniform draws stay in range") {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform_open();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(rng.uniform_index(7) < 7u);
  }
}

TEST_CASE("standard normal moments") {
  Rng rng(3);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.standard_normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("poisson and binomial means") {
  Rng rng(9);
  const int n = 100000;
  double sp = 0, sb = 0;
  for (int i = 0; i < n; ++i) {
    sp += static_cast<double>(rng.poisson(2.5));
    sb += static_cast<double>(rng.binomial(40, 0.1));
  }
  CHECK(std::abs(sp / n - 2.5) < 5.0 * std::sqrt(2.5 / n));
  CHECK(std::abs(sb / n - 4.0) < 5.0 * std::sqrt(3.6 / n));
  CHECK(rng.poisson(0.0) == 0);
  CHECK(rng.binomial(10, 0.0) == 0);
  CHECK(rng.binomial(10, 1.0) == 10);
}

TEST_CASE("log-sum-exp is stable") {
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_add_exp(-1000.0, -1000.0) == doctest::Approx(-1000.0 + std::log(2.0)));
  CHECK(log_add_exp(kNegInf, 3.0) == 3.0);
  CHECK(log_add_exp(kNegInf, kNegInf) == kNegInf);
  const std::vector<double> xs{-1e4, 0.0, kNegInf};
  CHECK(log_sum_exp(xs) == doctest::Approx(0.0));
}

TEST_CASE("compensated sum recovers small terms") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  for (unsigned threads : {1u, 3u, 8u}) {
    std::vector<int> hits(101, 0);
    parallel_for(hits.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (int h : hits) CHECK(h == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 4,
                               [](std::size_t b, std::size_t) {
                                 if (b == 0) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
