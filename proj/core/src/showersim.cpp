#include "calocal/showersim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "calocal/errors.hpp"

namespace calocal {

void DetectorGeometry::validate() const {
  if (n_rows < 2 || n_cols < 2)
    throw ArgumentError("detector grid must be at least 2x2, got " + std::to_string(n_rows) +
                        "x" + std::to_string(n_cols));
  if (!std::isfinite(cell_pitch_mm) || cell_pitch_mm <= 0.0)
    throw ArgumentError("cell pitch must be positive");
}

void EventSet::validate() const {
  geometry.validate();
  const auto c = geometry.cells();
  if (energies.empty() || energies.size() % c != 0)
    throw ArgumentError("event payload of " + std::to_string(energies.size()) +
                        " values is not a positive multiple of " + std::to_string(c) + " cells");
  for (std::size_t i = 0; i < energies.size(); ++i)
    if (!std::isfinite(energies[i]) || energies[i] < 0.0)
      throw ArgumentError("invalid cell energy at event " + std::to_string(i / c) + ", cell " +
                          std::to_string(i % c));
}

void ShowerModel::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(visible_fraction) || visible_fraction <= 0.0 || visible_fraction > 1.0)
    throw ArgumentError("visible_fraction must lie in (0, 1]");
  if (!finite(radius) || radius <= 0.0) throw ArgumentError("radius must be positive");
  if (!finite(center_spread) || center_spread < 0.0)
    throw ArgumentError("center_spread must be non-negative");
  if (!finite(fluctuation_shape) || fluctuation_shape <= 0.0)
    throw ArgumentError("fluctuation_shape must be positive");
  if (!finite(sparsity_threshold) || sparsity_threshold < 0.0)
    throw ArgumentError("sparsity_threshold must be non-negative");
}

namespace {

std::mt19937_64 event_stream(std::uint64_t seed, std::uint64_t event) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(event), static_cast<std::uint32_t>(event >> 32),
                    0x63616c6fu};
  return std::mt19937_64(seq);
}

void simulate_one(const DetectorGeometry& geom, const ShowerModel& model, double target_mev,
                  std::uint64_t seed, std::uint64_t event, std::span<double> out,
                  std::vector<double>& profile) {
  auto rng = event_stream(seed, event);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::gamma_distribution<double> noise(model.fluctuation_shape, 1.0 / model.fluctuation_shape);

  const double cy = 0.5 * geom.n_rows + model.center_spread * jitter(rng);
  const double cx = 0.5 * geom.n_cols + model.center_spread * jitter(rng);

  double norm = 0.0;
  for (int r = 0; r < geom.n_rows; ++r) {
    for (int c = 0; c < geom.n_cols; ++c) {
      const double d = std::hypot(r + 0.5 - cy, c + 0.5 - cx);
      const double w = std::exp(-d / model.radius);
      profile[geom.index(r, c)] = w;
      norm += w;
    }
  }
  const double scale = target_mev / norm;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = scale * profile[i] * noise(rng);
    out[i] = v < model.sparsity_threshold ? 0.0 : v;
  }
}

}  // namespace

EventSet simulate_event_range(const DetectorGeometry& geom, const ShowerModel& model,
                              std::size_t first, std::size_t count, double beam_energy_gev,
                              std::uint64_t seed, unsigned workers) {
  geom.validate();
  model.validate();
  if (count < 1) throw ArgumentError("n_events must be at least 1");
  if (!std::isfinite(beam_energy_gev) || beam_energy_gev <= 0.0)
    throw ArgumentError("beam energy must be positive");

  EventSet e;
  e.geometry = geom;
  e.beam_energy_gev = beam_energy_gev;
  e.seed = seed;
  e.energies.assign(count * geom.cells(), 0.0);
  const double target_mev = model.visible_fraction * beam_energy_gev * 1000.0;

  auto work = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> profile(geom.cells());
    for (std::size_t i = lo; i < hi; ++i)
      simulate_one(geom, model, target_mev, seed, first + i, e.event(i), profile);
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    work(0, count);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t lo = 0; lo < count; lo += chunk)
      pool.emplace_back(work, lo, std::min(count, lo + chunk));
  }
  return e;
}

EventSet simulate_events(const DetectorGeometry& geom, const ShowerModel& model,
                         std::size_t n_events, double beam_energy_gev, std::uint64_t seed,
                         unsigned workers) {
  return simulate_event_range(geom, model, 0, n_events, beam_energy_gev, seed, workers);
}

std::vector<double> integrated_dose(const EventSet& e) {
  const auto cells = e.geometry.cells();
  if (cells == 0 || e.n_events() == 0) throw ArgumentError("integrated dose of an empty event set");
  std::vector<double> dose(cells, 0.0);
  for (std::size_t k = 0; k < e.n_events(); ++k) {
    const auto ev = e.event(k);
    for (std::size_t i = 0; i < cells; ++i) dose[i] += ev[i];
  }
  return dose;
}

}  // namespace calocal
