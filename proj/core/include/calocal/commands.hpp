#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace calocal {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitDivergence = 4,
};

using Path = std::filesystem::path;

struct SimulateOptions {
  std::optional<Path> config;
  std::optional<std::uint64_t> seed;
  Path out;
  std::optional<Path> csv_out;
  unsigned threads = 1;
};

struct DamageOptions {
  std::optional<Path> config;
  std::optional<std::uint64_t> seed;
  Path in;
  Path out;
  Path profile_out;
  unsigned threads = 1;
};

struct CalibrateOptions {
  std::optional<Path> config;
  std::optional<std::uint64_t> seed;
  Path undamaged;
  Path damaged;
  Path coeffs_out;
  Path report_out;
  std::optional<Path> truth;
};

struct EvaluateOptions {
  std::optional<Path> config;
  Path damaged;
  Path undamaged;
  Path coeffs;
  std::optional<Path> truth;
  Path out;
};

struct ReportOptions {
  std::optional<Path> config;
  Path report;
  Path figures_dir;
  std::optional<Path> undamaged;
  std::optional<Path> damaged;
  std::optional<Path> truth;
};

// Each command returns an ExitCode and writes diagnostics to `log`. Outputs
// are staged and renamed into place only after the command has succeeded.
int cmd_simulate(const SimulateOptions& opt, std::ostream& log);
int cmd_damage(const DamageOptions& opt, std::ostream& log);
int cmd_calibrate(const CalibrateOptions& opt, std::ostream& log);
int cmd_evaluate(const EvaluateOptions& opt, std::ostream& log);
int cmd_report(const ReportOptions& opt, std::ostream& log);

}  // namespace calocal
