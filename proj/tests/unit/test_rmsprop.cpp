#include <doctest.h>

#include <cmath>

#include "calocal/errors.hpp"
#include "calocal/rmsprop.hpp"

using namespace calocal;

TEST_CASE("single step from a cold accumulator") {
  std::vector<double> theta{0.0};
  const std::vector<double> g{1.0};
  auto s = OptState::like(theta, {0.1, 0.9, 1e-8});
  rmsprop_step(theta, g, s);
  CHECK(s.accumulators[0][0] == doctest::Approx(0.1));
  CHECK(theta[0] == doctest::Approx(-0.1 / (std::sqrt(0.1) + 1e-8)));
  CHECK(theta[0] == doctest::Approx(-0.31623).epsilon(1e-5));
}

TEST_CASE("zero gradient leaves params and decays the accumulator") {
  std::vector<double> theta{1.5, -2.0};
  auto s = OptState::like(theta, {0.1, 0.9, 1e-8});
  s.accumulators[0] = {0.4, 2.0};
  rmsprop_step(theta, std::vector<double>{0.0, 0.0}, s);
  CHECK(theta == std::vector<double>{1.5, -2.0});
  CHECK(s.accumulators[0][0] == doctest::Approx(0.36));
  CHECK(s.accumulators[0][1] == doctest::Approx(1.8));
}

TEST_CASE("constant gradient: step size approaches the learning rate") {
  const double lr = 0.01;
  std::vector<double> theta{0.0};
  auto s = OptState::like(theta, {lr, 0.9, 1e-8});
  double last = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double before = theta[0];
    rmsprop_step(theta, std::vector<double>{0.7}, s);
    last = before - theta[0];
  }
  CHECK(std::abs(last - lr) <= 1e-3);
  CHECK(s.accumulators[0][0] == doctest::Approx(0.49).epsilon(1e-9));
}

TEST_CASE("non-finite gradient reports its index and leaves state untouched") {
  std::vector<double> theta{1.0, 2.0, 3.0};
  auto s = OptState::like(theta, {0.1, 0.9, 1e-8});
  try {
    rmsprop_step(theta, std::vector<double>{0.1, NAN, 0.2}, s);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
  CHECK(theta == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(s.accumulators[0] == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("shape and config validation") {
  std::vector<double> theta{1.0, 2.0};
  auto s = OptState::like(theta, {0.1, 0.9, 1e-8});
  CHECK_THROWS_AS(rmsprop_step(theta, std::vector<double>{1.0}, s), ShapeError);
  CHECK_THROWS_AS(OptState::like(theta, {0.0, 0.9, 1e-8}), ArgumentError);
  CHECK_THROWS_AS(OptState::like(theta, {0.1, 1.0, 1e-8}), ArgumentError);
  CHECK_THROWS_AS(OptState::like(theta, {0.1, 0.9, 0.0}), ArgumentError);
}

TEST_CASE("network update mirrors the flat update per block") {
  std::mt19937_64 rng(4);
  const std::vector<int> hidden{3};
  auto p = make_mlp(2, hidden, 0.2, 0.5, rng);
  auto s = OptState::like(p, {0.05, 0.9, 1e-8});
  REQUIRE(s.accumulators.size() == 4);
  MlpGradients g;
  for (const auto& l : p.layers)
    g.layers.push_back({Eigen::MatrixXd::Constant(l.weight.rows(), l.weight.cols(), 0.3),
                        Eigen::VectorXd::Constant(l.bias.size(), -0.3)});
  const auto before = p;
  rmsprop_step(p, g, s);
  const double step = 0.05 * 0.3 / (std::sqrt(0.1 * 0.09) + 1e-8);
  CHECK(p.layers[0].weight(1, 0) == doctest::Approx(before.layers[0].weight(1, 0) - step));
  CHECK(p.layers[1].bias(0) == doctest::Approx(before.layers[1].bias(0) + step));

  g.layers[1].weight(0, 0) = INFINITY;
  CHECK_THROWS_AS(rmsprop_step(p, g, s), NumericError);
  g.layers.pop_back();
  CHECK_THROWS_AS(rmsprop_step(p, g, s), ShapeError);
}
