#pragma once

#include <span>
#include <vector>

#include "calocal/events.hpp"

namespace calocal {

/// Per-cell response ratio a_i = E_damaged / E_undamaged, in (0, 1].
/// a_i == 1 means the cell has not aged.
struct AgingProfile {
  std::vector<double> a;

  std::size_t size() const noexcept { return a.size(); }
  /// Reciprocal convention A_i = E_undamaged / E_damaged.
  double reciprocal(std::size_t i) const { return 1.0 / a.at(i); }
  std::vector<double> reciprocals() const;
};

/// a_i = max(1 - slope * D_i / max(D), floor).
AgingProfile make_linear_profile(std::span<const double> dose, double slope, double floor);

/// Multiplies every cell of every event by a_i.
EventSet apply_damage(const EventSet& e, const AgingProfile& p);

/// Divides every cell of every event by coeffs_i.
EventSet calibrate(const EventSet& e, std::span<const double> coeffs);

}  // namespace calocal
