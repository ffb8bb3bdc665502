#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace calocal {

/// Readout grid of the calorimeter. Cells are indexed row-major.
struct DetectorGeometry {
  int n_rows = 24;
  int n_cols = 24;
  double cell_pitch_mm = 30.0;  // metadata only

  std::size_t cells() const noexcept {
    return static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols);
  }
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(n_cols) +
           static_cast<std::size_t>(col);
  }

  /// Throws ArgumentError unless both dimensions are at least 2.
  void validate() const;

  friend bool operator==(const DetectorGeometry&, const DetectorGeometry&) = default;
};

/// A batch of events, each a full grid of visible cell energies in MeV.
/// Storage is event-major, then row-major within an event.
struct EventSet {
  DetectorGeometry geometry;
  std::vector<double> energies;
  double beam_energy_gev = 0.0;
  std::uint64_t seed = 0;

  std::size_t n_events() const noexcept {
    const auto c = geometry.cells();
    return c == 0 ? 0 : energies.size() / c;
  }
  std::span<const double> event(std::size_t i) const {
    const auto c = geometry.cells();
    return {energies.data() + i * c, c};
  }
  std::span<double> event(std::size_t i) {
    const auto c = geometry.cells();
    return {energies.data() + i * c, c};
  }

  /// Checks geometry, payload size, and that every energy is finite and >= 0.
  void validate() const;
};

}  // namespace calocal
