#include "calocal/aging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "calocal/errors.hpp"

namespace calocal {

std::vector<double> AgingProfile::reciprocals() const {
  std::vector<double> out(a.size());
  std::transform(a.begin(), a.end(), out.begin(), [](double v) { return 1.0 / v; });
  return out;
}

AgingProfile make_linear_profile(std::span<const double> dose, double slope, double floor) {
  if (dose.empty()) throw ArgumentError("dose map is empty");
  if (!(slope >= 0.0 && slope < 1.0)) throw ArgumentError("aging slope must lie in [0, 1)");
  if (!(floor > 0.0 && floor <= 1.0)) throw ArgumentError("aging floor must lie in (0, 1]");
  double dmax = 0.0;
  for (std::size_t i = 0; i < dose.size(); ++i) {
    if (!std::isfinite(dose[i]) || dose[i] < 0.0)
      throw ArgumentError("dose at cell " + std::to_string(i) + " is negative or non-finite");
    dmax = std::max(dmax, dose[i]);
  }
  if (dmax <= 0.0) throw ArgumentError("dose map is identically zero");

  AgingProfile p;
  p.a.resize(dose.size());
  for (std::size_t i = 0; i < dose.size(); ++i)
    p.a[i] = std::max(1.0 - slope * dose[i] / dmax, floor);
  return p;
}

EventSet apply_damage(const EventSet& e, const AgingProfile& p) {
  const auto cells = e.geometry.cells();
  if (p.a.size() != cells)
    throw ArgumentError("aging profile has " + std::to_string(p.a.size()) + " cells, geometry has " +
                        std::to_string(cells));
  EventSet out = e;
  for (std::size_t k = 0; k < out.n_events(); ++k) {
    auto ev = out.event(k);
    for (std::size_t i = 0; i < cells; ++i) ev[i] *= p.a[i];
  }
  return out;
}

EventSet calibrate(const EventSet& e, std::span<const double> coeffs) {
  const auto cells = e.geometry.cells();
  if (coeffs.size() != cells)
    throw ArgumentError("coefficient vector has " + std::to_string(coeffs.size()) +
                        " cells, geometry has " + std::to_string(cells));
  for (std::size_t i = 0; i < cells; ++i)
    if (!(coeffs[i] > 0.0) || !std::isfinite(coeffs[i]))
      throw ArgumentError("calibration coefficient of cell " + std::to_string(i) + " (row " +
                          std::to_string(i / e.geometry.n_cols) + ", col " +
                          std::to_string(i % e.geometry.n_cols) + ") is not positive");
  EventSet out = e;
  for (std::size_t k = 0; k < out.n_events(); ++k) {
    auto ev = out.event(k);
    for (std::size_t i = 0; i < cells; ++i) ev[i] /= coeffs[i];
  }
  return out;
}

}  // namespace calocal
