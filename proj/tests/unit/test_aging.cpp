#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "calocal/aging.hpp"
#include "calocal/errors.hpp"
#include "calocal/metrics.hpp"
#include "calocal/showersim.hpp"
#include "support/oracles.hpp"

using namespace calocal;

namespace {

EventSet two_cell_event(std::vector<double> values) {
  EventSet e;
  e.geometry = DetectorGeometry{2, 2, 1.0};
  values.resize(4, 0.0);
  e.energies = std::move(values);
  return e;
}

AgingProfile random_profile(std::size_t cells, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  AgingProfile p;
  p.a.resize(cells);
  for (auto& v : p.a) v = u(rng);
  return p;
}

}  // namespace

TEST_CASE("linear profile examples") {
  const std::vector<double> dose{0, 50, 100};
  const auto p = make_linear_profile(dose, 0.3, 0.5);
  CHECK(p.a[0] == doctest::Approx(1.0));
  CHECK(p.a[1] == doctest::Approx(0.85));
  CHECK(p.a[2] == doctest::Approx(0.7));
  CHECK(p.reciprocal(2) == doctest::Approx(1.0 / 0.7));

  const auto none = make_linear_profile(dose, 0.0, 0.5);
  CHECK(none.a == std::vector<double>(3, 1.0));

  const auto floored = make_linear_profile(std::vector<double>{100}, 0.9, 0.5);
  CHECK(floored.a[0] == 0.5);
}

TEST_CASE("linear profile argument errors") {
  const std::vector<double> dose{0, 1};
  CHECK_THROWS_AS(make_linear_profile(std::vector<double>{0, 0}, 0.3, 0.5), ArgumentError);
  CHECK_THROWS_AS(make_linear_profile(dose, 1.0, 0.5), ArgumentError);
  CHECK_THROWS_AS(make_linear_profile(dose, -0.1, 0.5), ArgumentError);
  CHECK_THROWS_AS(make_linear_profile(dose, 0.3, 0.0), ArgumentError);
  CHECK_THROWS_AS(make_linear_profile(dose, 0.3, 1.1), ArgumentError);
  CHECK_THROWS_AS(make_linear_profile(std::vector<double>{-1, 2}, 0.3, 0.5), ArgumentError);
}

TEST_CASE("stronger slope never raises a coefficient") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> dose(200);
  for (auto& d : dose) d = u(rng);
  for (double k1 = 0.0; k1 < 0.9; k1 += 0.1) {
    const auto p1 = make_linear_profile(dose, k1, 0.4);
    const auto p2 = make_linear_profile(dose, k1 + 0.05, 0.4);
    for (std::size_t i = 0; i < dose.size(); ++i) CHECK(p1.a[i] >= p2.a[i]);
  }
}

TEST_CASE("apply_damage and calibrate examples") {
  const auto e = two_cell_event({1, 2});
  AgingProfile p{{0.8, 0.5, 1.0, 1.0}};
  const auto d = apply_damage(e, p);
  CHECK(d.energies[0] == doctest::Approx(0.8));
  CHECK(d.energies[1] == doctest::Approx(1.0));

  const auto c = calibrate(two_cell_event({0.8, 1.0}), p.a);
  CHECK(c.energies[0] == doctest::Approx(1.0));
  CHECK(c.energies[1] == doctest::Approx(2.0));

  const std::vector<double> ones(4, 1.0);
  CHECK(calibrate(e, ones).energies == e.energies);
  CHECK(apply_damage(e, AgingProfile{ones}).energies == e.energies);
}

TEST_CASE("calibrate rejects non-positive coefficients and names the cell") {
  const auto e = two_cell_event({1, 2});
  try {
    calibrate(e, std::vector<double>{1.0, 1.0, 0.0, 1.0});
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& err) {
    CHECK(std::string(err.what()).find("cell 2") != std::string::npos);
  }
  CHECK_THROWS_AS(calibrate(e, std::vector<double>{1.0, 1.0}), ArgumentError);
  CHECK_THROWS_AS(apply_damage(e, AgingProfile{{1.0}}), ArgumentError);
}

TEST_CASE("calibrate undoes apply_damage to round-off") {
  std::mt19937_64 rng(77);
  const DetectorGeometry g{6, 5, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    const auto e = calocal::testing::random_events(g, 20, rng);
    const auto p = random_profile(g.cells(), rng);
    const auto back = calibrate(apply_damage(e, p), p.a);
    for (std::size_t i = 0; i < e.energies.size(); ++i) {
      const double x = e.energies[i];
      CHECK(std::abs(back.energies[i] - x) <= 1e-9 * std::abs(x));
      // At most one ulp away.
      CHECK(back.energies[i] >= std::nextafter(x, -INFINITY));
      CHECK(back.energies[i] <= std::nextafter(x, INFINITY));
    }
  }
}

TEST_CASE("damage lowers every event sum and the mean sum") {
  const auto e = simulate_events(DetectorGeometry{}, ShowerModel{}, 300, 10.0, 4);
  const auto p = make_linear_profile(integrated_dose(e), 0.3, 0.5);
  const auto before = energy_sum(e);
  const auto after = energy_sum(apply_damage(e, p));
  for (std::size_t k = 0; k < before.size(); ++k) CHECK(after[k] <= before[k]);
  CHECK(std::accumulate(after.begin(), after.end(), 0.0) <
        std::accumulate(before.begin(), before.end(), 0.0));
}

TEST_CASE("identity profile leaves statistics bit-identical") {
  const auto e = simulate_events(DetectorGeometry{}, ShowerModel{}, 100, 10.0, 5);
  const auto p = make_linear_profile(integrated_dose(e), 0.0, 0.5);
  const auto d = apply_damage(e, p);
  CHECK(d.energies == e.energies);
  CHECK(energy_sum(d) == energy_sum(e));
  CHECK(integrated_dose(d) == integrated_dose(e));
}
