#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "calocal/events.hpp"
#include "calocal/showersim.hpp"
#include "calocal/wgan.hpp"

namespace calocal {

/// Event-generation settings; live in the [shower] section next to the model.
struct SimulationSettings {
  std::size_t n_events = 5000;
  double beam_energy_gev = 10.0;
  std::uint64_t seed = 1;
};

struct AgingSettings {
  double slope = 0.3;
  double floor = 0.5;
  // Damage the input showers themselves instead of a fresh independent draw.
  bool shared_showers = false;
  // Seed of the independent damaged draw; empty derives it from the input seed.
  std::optional<std::uint64_t> seed;
};

struct MetricsSettings {
  int n_bins = 60;
  double baseline_min_mean_mev = 1.0;
};

/// Fully resolved run configuration. Sections: [detector] [shower] [aging]
/// [train] [metrics]. Unknown sections or keys are rejected; missing keys
/// keep the defaults above.
struct RunConfig {
  DetectorGeometry detector;
  ShowerModel shower;
  SimulationSettings simulation;
  AgingSettings aging;
  TrainConfig train;
  MetricsSettings metrics;

  void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical INI rendering; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& c);

/// Compact JSON rendering with every key present.
std::string to_json(const RunConfig& c);

/// Seed used for the independent damaged draw.
std::uint64_t damaged_draw_seed(const AgingSettings& aging, std::uint64_t input_seed);

}  // namespace calocal
