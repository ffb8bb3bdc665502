#include "calocal/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>

#include "calocal/aging.hpp"
#include "calocal/config.hpp"
#include "calocal/errors.hpp"
#include "calocal/event_io.hpp"
#include "calocal/metrics.hpp"
#include "calocal/report_io.hpp"
#include "calocal/showersim.hpp"
#include "calocal/wgan.hpp"

namespace calocal {

namespace {

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TrainingError& e) {
    log << "training diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const Error& e) {
    log << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitData;
  }
}

RunConfig resolve(const std::optional<Path>& path) {
  return path ? load_config(*path) : RunConfig{};
}

std::pair<double, double> auto_range(std::span<const double> a, std::span<const double> b = {}) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : a) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : b) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  return {lo, hi};
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = resolve(opt.config);
    if (opt.seed) cfg.simulation.seed = *opt.seed;
    const auto events = simulate_events(cfg.detector, cfg.shower, cfg.simulation.n_events,
                                        cfg.simulation.beam_energy_gev, cfg.simulation.seed,
                                        opt.threads);
    OutputTransaction tx;
    tx.stage(opt.out, encode_events(events));
    if (opt.csv_out) tx.stage(*opt.csv_out, events_to_csv(events));
    tx.commit();
    log << "simulated " << events.n_events() << " events on a " << cfg.detector.n_rows << "x"
        << cfg.detector.n_cols << " grid (seed " << cfg.simulation.seed << ") -> "
        << opt.out.string() << "\n";
  });
}

int cmd_damage(const DamageOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = resolve(opt.config);
    if (opt.seed) cfg.aging.seed = *opt.seed;
    const EventSet input = read_events(opt.in);
    const auto dose = integrated_dose(input);
    const auto profile = make_linear_profile(dose, cfg.aging.slope, cfg.aging.floor);

    EventSet damaged;
    if (cfg.aging.shared_showers) {
      damaged = apply_damage(input, profile);
    } else {
      ShowerModel model = cfg.shower;
      const auto seed = damaged_draw_seed(cfg.aging, input.seed);
      damaged = apply_damage(simulate_events(input.geometry, model, input.n_events(),
                                             input.beam_energy_gev, seed, opt.threads),
                             profile);
    }
    OutputTransaction tx;
    tx.stage(opt.out, encode_events(damaged));
    tx.stage(opt.profile_out, coefficients_to_csv(input.geometry, profile.a));
    tx.commit();
    const auto [lo, hi] = std::minmax_element(profile.a.begin(), profile.a.end());
    log << "damaged " << damaged.n_events() << " events, coefficients in [" << *lo << ", " << *hi
        << "]" << (cfg.aging.shared_showers ? " (shared showers)" : " (independent draw)")
        << "\n";
  });
}

int cmd_calibrate(const CalibrateOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = resolve(opt.config);
    if (opt.seed) cfg.train.seed = *opt.seed;
    const EventSet undamaged = read_events(opt.undamaged);
    const EventSet damaged = read_events(opt.damaged);
    if (!(undamaged.geometry == damaged.geometry))
      throw FormatError("undamaged and damaged files have different grids");
    std::optional<AgingProfile> truth;
    if (opt.truth) truth = read_coefficients(*opt.truth, undamaged.geometry);

    auto progress = [&](const EpochRecord& r) {
      if (r.epoch % 10 != 0 && r.epoch != 1) return;
      log << "epoch " << r.epoch << "  W~" << r.wasserstein_estimate;
      if (r.mae) log << "  mae " << *r.mae;
      if (r.r2) log << "  r2 " << *r.r2;
      log << "\n";
    };
    const auto result =
        train_calibration(undamaged, damaged, cfg.train, truth ? &*truth : nullptr, progress);

    OutputTransaction tx;
    tx.stage(opt.coeffs_out, coefficients_to_csv(undamaged.geometry, result.coefficients));
    tx.stage(opt.report_out, train_report_to_jsonl(result.report, cfg));
    tx.commit();
    log << "trained " << cfg.train.epochs << " epochs in " << result.report.wall_seconds
        << " s\n";
  });
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = resolve(opt.config);
    const EventSet damaged = read_events(opt.damaged);
    const EventSet undamaged = read_events(opt.undamaged);
    if (!(undamaged.geometry == damaged.geometry))
      throw FormatError("undamaged and damaged files have different grids");
    const auto& geom = damaged.geometry;
    const auto coeffs = read_coefficients(opt.coeffs, geom);

    const auto sum_u = energy_sum(undamaged);
    const auto sum_d = energy_sum(damaged);
    const auto sum_c = energy_sum(calibrate(damaged, coeffs.a));
    const double w1_before = wasserstein1_empirical(sum_d, sum_u);
    const double w1_after = wasserstein1_empirical(sum_c, sum_u);

    std::vector<std::pair<std::string, double>> out;
    if (opt.truth) {
      const auto truth = read_coefficients(*opt.truth, geom);
      const auto mask = central_mask(geom, cfg.train.mask_half_width);
      std::vector<double> pred_m;
      std::vector<double> truth_m;
      for (auto i : mask) {
        pred_m.push_back(coeffs.a[i]);
        truth_m.push_back(truth.a[i]);
      }
      out.emplace_back("mae", mae(pred_m, truth_m));
      const auto [lo, hi] = std::minmax_element(truth_m.begin(), truth_m.end());
      out.emplace_back("r2", *lo != *hi ? r_squared(pred_m, truth_m)
                                        : std::numeric_limits<double>::quiet_NaN());
      out.emplace_back("mae_all_cells", mae(coeffs.a, truth.a));

      // Trivial estimator on well-populated cells, for comparison.
      const auto baseline = ratio_of_means_baseline(undamaged, damaged);
      const auto dose = integrated_dose(undamaged);
      const auto n = static_cast<double>(undamaged.n_events());
      std::vector<double> base_sel;
      std::vector<double> truth_sel;
      for (std::size_t i = 0; i < geom.cells(); ++i) {
        if (dose[i] / n >= cfg.metrics.baseline_min_mean_mev) {
          base_sel.push_back(baseline[i]);
          truth_sel.push_back(truth.a[i]);
        }
      }
      if (!base_sel.empty()) out.emplace_back("baseline_mae", mae(base_sel, truth_sel));
    }
    out.emplace_back("w1_before", w1_before);
    out.emplace_back("w1_after", w1_after);
    out.emplace_back("w1_ratio", w1_before > 0.0 ? w1_after / w1_before
                                                 : std::numeric_limits<double>::quiet_NaN());
    write_file_atomic(opt.out, flat_json(out));
    log << "w1 before " << w1_before << ", after " << w1_after << "\n";
  });
}

int cmd_report(const ReportOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = resolve(opt.config);
    const auto loaded = train_report_from_jsonl(read_file(opt.report));
    const auto& rep = loaded.report;
    const auto& geom = loaded.geometry;

    std::vector<double> predicted(geom.cells(), 1.0);
    for (std::size_t j = 0; j < rep.mask.size(); ++j) {
      if (rep.mask[j] >= geom.cells()) throw FormatError("report mask index out of grid");
      predicted[rep.mask[j]] = rep.final_coefficients[j];
    }
    for (std::size_t j = 0; j < rep.border_cells.size(); ++j) {
      if (rep.border_cells[j] >= geom.cells()) throw FormatError("report border index out of grid");
      predicted[rep.border_cells[j]] = rep.border_coefficients[j];
    }

    std::optional<AgingProfile> truth;
    if (opt.truth) truth = read_coefficients(*opt.truth, geom);
    std::optional<EventSet> undamaged;
    std::optional<EventSet> damaged;
    if (opt.undamaged) undamaged = read_events(*opt.undamaged);
    if (opt.damaged) damaged = read_events(*opt.damaged);

    std::error_code ec;
    std::filesystem::create_directories(opt.figures_dir, ec);
    if (ec) throw IoError("cannot create " + opt.figures_dir.string() + ": " + ec.message());
    const int bins = cfg.metrics.n_bins;
    OutputTransaction tx;

    std::string curve = "epoch,mae,r2,critic_loss,generator_loss,wasserstein_estimate\n";
    for (const auto& e : rep.epochs) {
      curve += std::to_string(e.epoch) + "," + (e.mae ? fmt9(*e.mae) : "") + "," +
               (e.r2 ? fmt9(*e.r2) : "") + "," + fmt9(e.critic_loss) + "," +
               fmt9(e.generator_loss) + "," + fmt9(e.wasserstein_estimate) + "\n";
    }
    tx.stage(opt.figures_dir / "mae_per_epoch.csv", curve);

    {
      const auto [lo, hi] = truth ? auto_range(predicted, truth->a) : auto_range(predicted);
      tx.stage(opt.figures_dir / "coefficients_predicted_hist.csv",
               histogram_to_csv(histogram(predicted, bins, lo, hi)));
      if (truth) {
        tx.stage(opt.figures_dir / "coefficients_truth_hist.csv",
                 histogram_to_csv(histogram(truth->a, bins, lo, hi)));
        std::string scatter = "row,col,truth,predicted\n";
        for (std::size_t j = 0; j < rep.mask.size(); ++j) {
          const auto i = rep.mask[j];
          scatter += std::to_string(i / geom.n_cols) + "," + std::to_string(i % geom.n_cols) +
                     "," + fmt9(truth->a[i]) + "," + fmt9(rep.final_coefficients[j]) + "\n";
        }
        tx.stage(opt.figures_dir / "scatter_truth_vs_predicted.csv", scatter);
      }
    }

    if (undamaged && damaged) {
      if (!(undamaged->geometry == geom) || !(damaged->geometry == geom))
        throw FormatError("event files do not match the report grid");
      const auto su = energy_sum(*undamaged);
      const auto sd = energy_sum(*damaged);
      const auto sc = energy_sum(calibrate(*damaged, predicted));
      std::vector<double> pooled = su;
      pooled.insert(pooled.end(), sd.begin(), sd.end());
      pooled.insert(pooled.end(), sc.begin(), sc.end());
      const auto [lo, hi] = auto_range(pooled);
      tx.stage(opt.figures_dir / "energy_sum_undamaged.csv", histogram_to_csv(histogram(su, bins, lo, hi)));
      tx.stage(opt.figures_dir / "energy_sum_damaged.csv", histogram_to_csv(histogram(sd, bins, lo, hi)));
      tx.stage(opt.figures_dir / "energy_sum_calibrated.csv", histogram_to_csv(histogram(sc, bins, lo, hi)));
    } else if (undamaged || damaged) {
      log << "note: energy-sum histograms need both --undamaged and --damaged\n";
    }
    tx.commit();
    log << "figure data written to " << opt.figures_dir.string() << "\n";
  });
}

}  // namespace calocal
