#include <doctest.h>

#include <cmath>
#include <vector>

#include "csbm/architecture.hpp"
#include "csbm/errors.hpp"
#include "support.hpp"

using namespace csbm;
using csbm::test::make_graph;

TEST_CASE("activation names round-trip") {
  for (auto a : {Activation::identity, Activation::relu, Activation::sigmoid, Activation::tanh,
                 Activation::exp, Activation::softmax}) {
    CHECK(parse_activation(activation_name(a)) == a);
  }
  CHECK_THROWS_AS(parse_activation("gelu"), InvalidArgument);
}

TEST_CASE("two-layer forward pass by hand") {
  const auto g = make_graph(2, 2, {0, 1}, {{0, 1}}, {1.0, -1.0, 0.0, 2.0});
  ArchitectureParams p;
  p.layers.push_back({2, 2, {1, 0, 0, 1}, {0.5, 0.5}, Activation::relu});
  p.layers.push_back({2, 2, {1, 0, 0, 1}, {0, 0}, Activation::sigmoid});
  p.num_classes = 2;
  p.z = {0.0, 0.0, 0.0, 0.0};
  p.radius = 0;
  const auto preds = arch_forward(g, shell_tensor(g, 0), p);
  const auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  // Node 0: relu(1.5, -0.5) = (1.5, 0); node 1: relu(0.5, 2.5).
  CHECK(preds[0].scores[0] == doctest::Approx(std::log(sig(1.5))));
  CHECK(preds[0].scores[1] == doctest::Approx(std::log(0.5)));
  CHECK(preds[0].label == 0);
  CHECK(preds[1].label == 1);

  // With one hop and Q = 1/2 everywhere the neighbour adds log(<H_v, 1/2>) to both classes.
  p.radius = 1;
  const auto hop = arch_forward(g, shell_tensor(g, 1), p);
  const double shared = std::log(0.5 * (sig(0.5) + sig(2.5)));
  CHECK(hop[0].scores[0] == doctest::Approx(std::log(sig(1.5)) + shared));
  CHECK(hop[0].scores[1] == doctest::Approx(std::log(0.5) + shared));
}

TEST_CASE("architecture validation and overflow") {
  ArchitectureParams p;
  p.num_classes = 2;
  p.z = {0, 0, 0, 0};
  CHECK_THROWS_AS(p.validate(2), InvalidArgument);
  p.layers.push_back({3, 2, std::vector<double>(6, 0.0), {0, 0}, Activation::exp});
  CHECK_THROWS_AS(p.validate(2), InvalidArgument);
  CHECK_NOTHROW(p.validate(3));
  p.layers[0].out_dim = 3;
  CHECK_THROWS_AS(p.validate(3), InvalidArgument);

  const auto g = make_graph(2, 1, {0}, {}, {1000.0});
  ArchitectureParams big;
  big.layers.push_back({1, 2, {1.0, 1.0}, {0, 0}, Activation::exp});
  big.num_classes = 2;
  big.z = {0, 0, 0, 0};
  CHECK_THROWS_AS(arch_forward(g, shell_tensor(g, 0), big), NumericOverflow);
  big.radius = 2;
  CHECK_THROWS_AS(arch_forward(g, shell_tensor(g, 1), big), InvalidArgument);
}

TEST_CASE("realized parameters") {
  const auto fm = GaussianFeatureModel::binary_symmetric({1.0, 0.0}, 1.0);
  const auto p = realize_optimal(fm, EdgeRateMatrix::binary(4, 1), 10000, 2);
  CHECK(p.layers.size() == 1);
  CHECK(p.z[0] == doctest::Approx(std::log(4e-4 / (1 - 4e-4))));
  CHECK(p.z[3] == doctest::Approx(std::log(4e-4 / (1 - 4e-4))));
  CHECK(p.z[1] == doctest::Approx(std::log(1e-4 / (1 - 1e-4))));
  CHECK_THROWS_AS(realize_optimal(fm, EdgeRateMatrix::binary(4, 0), 10000, 2), InvalidArgument);
  CHECK_THROWS_AS(realize_optimal(fm, EdgeRateMatrix::binary(10, 1), 10, 2), InvalidArgument);
  const CategoricalFeatureModel cat({{0.5, 0.5}, {0.2, 0.8}});
  CHECK_THROWS_AS(realize_optimal(cat, EdgeRateMatrix::binary(4, 1), 100, 1), InvalidArgument);
}

TEST_CASE("realized architecture reproduces the multiclass rule") {
  Rng rng(50);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t C = 2 + rng.uniform_index(3);
    const std::size_t d = 1 + rng.uniform_index(3);
    std::vector<std::vector<double>> means(C, std::vector<double>(d));
    for (auto& m : means) {
      for (auto& x : m) x = 0.7 * rng.standard_normal();
    }
    const GaussianFeatureModel fm(means, 0.6 + rng.uniform_open());
    std::vector<double> b(C * C);
    for (std::size_t i = 0; i < C; ++i) {
      for (std::size_t j = i; j < C; ++j) b[i * C + j] = b[j * C + i] = 0.2 + 5 * rng.uniform_open();
    }
    const EdgeRateMatrix rates(C, b);
    const std::size_t n = 300;
    const auto g = sample_csbm(n, fm, rates, rng());
    const int r = static_cast<int>(rng.uniform_index(4));
    const auto preds = arch_forward(g, shell_tensor(g, r), realize_optimal(fm, rates, n, r));
    ShellExplorer ex(g);
    for (NodeId v = 0; v < n; ++v) {
      const auto m = classify_multiclass(ex.shells(v, r), g.feature_view(), fm, rates);
      CHECK(preds[v].label == m.label);
    }
  }
}

TEST_CASE("flat connectivity and radius zero reduce to the root density") {
  Rng rng(6);
  const GaussianFeatureModel fm({{1, 0}, {0, 1}, {-1, 0}}, 1.0);
  const auto g = sample_csbm(400, fm, EdgeRateMatrix(3, {5, 1, 1, 1, 5, 1, 1, 1, 5}), 9);
  auto p = realize_optimal(fm, EdgeRateMatrix(3, {5, 1, 1, 1, 5, 1, 1, 1, 5}), 400, 0);
  auto preds = arch_forward(g, shell_tensor(g, 0), p);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    CHECK(preds[v].label == classify_feature_only(g.features(v), fm).label);
  }
  p.radius = 3;
  std::fill(p.z.begin(), p.z.end(), -2.0);
  preds = arch_forward(g, shell_tensor(g, 3), p);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    CHECK(preds[v].label == classify_feature_only(g.features(v), fm).label);
  }
}
