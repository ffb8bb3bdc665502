#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "calocal/aging.hpp"
#include "calocal/events.hpp"
#include "calocal/mlp.hpp"

namespace calocal {

struct TrainConfig {
  int epochs = 100;
  int batch_size = 64;
  int n_critic = 5;
  double clip = 0.01;
  std::vector<int> hidden{128, 64};
  double lr_critic = 5e-5;
  double lr_generator = 1e-3;
  int mask_half_width = 6;
  std::optional<double> scale;  // empty selects the automatic input scale
  std::uint64_t seed = 0;
  double rho = 0.9;
  double epsilon = 1e-8;
  double leaky_slope = 0.2;
  double init_range = 0.01;

  void validate() const;
};

/// Diagonal multiplicative generator. Cell mask[j] is scaled by exp(u[j]),
/// so every predicted coefficient is strictly positive.
struct GeneratorParams {
  std::vector<std::size_t> mask;
  std::vector<double> u;

  static GeneratorParams identity(std::vector<std::size_t> mask);
  std::vector<double> coefficients() const;
};

struct EpochRecord {
  int epoch = 0;
  double critic_loss = 0.0;
  double generator_loss = 0.0;
  double wasserstein_estimate = 0.0;
  std::optional<double> mae;
  std::optional<double> r2;
};

struct TrainReport {
  TrainConfig config;
  double scale = 1.0;
  std::vector<EpochRecord> epochs;
  std::vector<std::size_t> mask;
  std::vector<double> final_coefficients;  // aligned with mask
  std::vector<std::size_t> border_cells;
  std::vector<double> border_coefficients;  // ratio-of-means fallback
  double wall_seconds = 0.0;
};

struct CalibrationResult {
  std::vector<double> coefficients;  // full grid, predicted a_i
  TrainReport report;
};

struct CriticStep {
  double loss = 0.0;
  MlpGradients grads;
};

struct GeneratorStep {
  double loss = 0.0;
  std::vector<double> grad_u;
};

/// Row-major indices of the centred (2h x 2h) block.
std::vector<std::size_t> central_mask(const DetectorGeometry& geom, int half_width);

/// Gathers the masked cells of every event into a (mask x n_events) matrix
/// divided by `scale`.
Eigen::MatrixXd gather_masked(const EventSet& e, std::span<const std::size_t> mask, double scale);

/// Mean of the non-zero cell energies over the whole set.
double mean_nonzero_energy(const EventSet& e);

/// y = exp(u) * x per cell; `batch` holds one event per column.
Eigen::MatrixXd generator_apply(const GeneratorParams& g, const Eigen::MatrixXd& batch);

/// loss = mean C(fake) - mean C(real). Minimising it maximises the critic's
/// Wasserstein estimate.
CriticStep critic_loss_and_grads(const MlpParams& critic, const Eigen::MatrixXd& real_batch,
                                 const Eigen::MatrixXd& fake_batch);

/// loss = -mean C(G(x)); gradient with respect to the log-coefficients u.
GeneratorStep generator_loss_and_grads(const MlpParams& critic, const GeneratorParams& g,
                                       const Eigen::MatrixXd& undamaged_batch);

/// coeff_i = mean_i(damaged) / mean_i(undamaged); cells whose undamaged mean
/// is at most 1e-9 MeV get 1.
std::vector<double> ratio_of_means_baseline(const EventSet& undamaged, const EventSet& damaged);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Adversarial calibration. Masked cells come from the trained generator,
/// the rest from ratio_of_means_baseline. Per-epoch MAE and R2 are recorded
/// on the masked cells when `truth` is supplied.
CalibrationResult train_calibration(const EventSet& undamaged, const EventSet& damaged,
                                    const TrainConfig& cfg,
                                    const AgingProfile* truth = nullptr,
                                    const EpochCallback& on_epoch = {});

}  // namespace calocal
