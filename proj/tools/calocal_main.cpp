// calocal: simulate -> damage -> calibrate -> evaluate -> report
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "calocal/commands.hpp"

namespace {

unsigned worker_cap() {
  const char* env = std::getenv("CALOCAL_THREADS");
  if (env == nullptr) return 1;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<unsigned>(v) : 1u;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using calocal::Path;

  CLI::App app{"Calorimeter aging calibration toolkit"};
  app.require_subcommand(1);

  calocal::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate an undamaged toy event set");
  simulate->add_option("--config", sim.config, "Run configuration (INI)");
  simulate->add_option("--seed", sim.seed, "Override [shower] seed");
  simulate->add_option("--out", sim.out, "Output event file")->required();
  simulate->add_option("--csv", sim.csv_out, "Also export non-zero cells as CSV");

  calocal::DamageOptions dmg;
  auto* damage = app.add_subcommand("damage", "Apply dose-linear aging to an event set");
  damage->add_option("--config", dmg.config, "Run configuration (INI)");
  damage->add_option("--seed", dmg.seed, "Seed of the independent damaged draw");
  damage->add_option("--in", dmg.in, "Undamaged event file")->required();
  damage->add_option("--out", dmg.out, "Damaged event file")->required();
  damage->add_option("--profile-out", dmg.profile_out, "True aging coefficients CSV")->required();

  calocal::CalibrateOptions cal;
  auto* calib = app.add_subcommand("calibrate", "Recover aging coefficients adversarially");
  calib->add_option("--config", cal.config, "Run configuration (INI)");
  calib->add_option("--seed", cal.seed, "Override [train] seed");
  calib->add_option("--undamaged", cal.undamaged, "Undamaged event file")->required();
  calib->add_option("--damaged", cal.damaged, "Damaged event file")->required();
  calib->add_option("--out", cal.coeffs_out, "Predicted coefficients CSV")->required();
  calib->add_option("--report", cal.report_out, "Training report (JSON lines)")->required();
  calib->add_option("--truth", cal.truth, "True coefficients CSV, enables per-epoch MAE/R2");

  calocal::EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score coefficients and energy-sum alignment");
  evaluate->add_option("--config", ev.config, "Run configuration (INI)");
  evaluate->add_option("--damaged", ev.damaged, "Damaged event file")->required();
  evaluate->add_option("--undamaged", ev.undamaged, "Undamaged event file")->required();
  evaluate->add_option("--coeffs", ev.coeffs, "Predicted coefficients CSV")->required();
  evaluate->add_option("--truth", ev.truth, "True coefficients CSV");
  evaluate->add_option("--out", ev.out, "Metrics JSON")->required();

  calocal::ReportOptions rep;
  auto* report = app.add_subcommand("report", "Emit plot-ready CSV figure data");
  report->add_option("--config", rep.config, "Run configuration (INI)");
  report->add_option("--report", rep.report, "Training report (JSON lines)")->required();
  report->add_option("--out", rep.figures_dir, "Output directory")->required();
  report->add_option("--undamaged", rep.undamaged, "Undamaged event file");
  report->add_option("--damaged", rep.damaged, "Damaged event file");
  report->add_option("--truth", rep.truth, "True coefficients CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return calocal::kExitUsage;
  }

  const unsigned threads = worker_cap();
  sim.threads = threads;
  dmg.threads = threads;

  if (*simulate) return calocal::cmd_simulate(sim, std::cerr);
  if (*damage) return calocal::cmd_damage(dmg, std::cerr);
  if (*calib) return calocal::cmd_calibrate(cal, std::cerr);
  if (*evaluate) return calocal::cmd_evaluate(ev, std::cerr);
  if (*report) return calocal::cmd_report(rep, std::cerr);
  return calocal::kExitUsage;
}
