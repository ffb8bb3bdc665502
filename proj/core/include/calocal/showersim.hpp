#pragma once

#include <cstdint>
#include <vector>

#include "calocal/events.hpp"

namespace calocal {

/// Parametric single-particle shower: exponential radial profile around a
/// jittered impact point, Gamma-distributed cell fluctuations, and a
/// zero-suppression threshold.
struct ShowerModel {
  double visible_fraction = 0.02;   // mean visible share of the beam energy
  double radius = 2.5;              // radial e-folding length, cells
  double center_spread = 1.5;       // impact point jitter (sigma), cells
  double fluctuation_shape = 2.0;   // Gamma shape k, mean-one noise
  double sparsity_threshold = 0.05; // MeV

  void validate() const;
};

/// Generates events [0, n_events). Each event draws from its own stream
/// derived from (seed, event index), so the result does not depend on
/// `workers` or on how the index range is split.
EventSet simulate_events(const DetectorGeometry& geom, const ShowerModel& model,
                         std::size_t n_events, double beam_energy_gev, std::uint64_t seed,
                         unsigned workers = 1);

/// Generates events [first, first + count) of the stream defined by `seed`.
EventSet simulate_event_range(const DetectorGeometry& geom, const ShowerModel& model,
                              std::size_t first, std::size_t count, double beam_energy_gev,
                              std::uint64_t seed, unsigned workers = 1);

/// Per-cell energy summed over all events.
std::vector<double> integrated_dose(const EventSet& e);

}  // namespace calocal
