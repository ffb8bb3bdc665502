#include "calocal/wgan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "calocal/errors.hpp"
#include "calocal/metrics.hpp"
#include "calocal/rmsprop.hpp"

namespace calocal {

void TrainConfig::validate() const {
  if (epochs < 1) throw ArgumentError("epochs must be at least 1");
  if (batch_size < 1) throw ArgumentError("batch_size must be at least 1");
  if (n_critic < 1) throw ArgumentError("n_critic must be at least 1");
  if (!(clip > 0.0)) throw ArgumentError("clip must be positive");
  if (mask_half_width < 1) throw ArgumentError("mask_half_width must be at least 1");
  for (int h : hidden)
    if (h < 1) throw ArgumentError("hidden layer widths must be positive");
  if (scale && !(*scale > 0.0 && std::isfinite(*scale)))
    throw ArgumentError("input scale must be positive");
  if (!(init_range > 0.0)) throw ArgumentError("init_range must be positive");
  if (!(leaky_slope >= 0.0 && leaky_slope <= 1.0))
    throw ArgumentError("leaky_slope must lie in [0, 1]");
  RmsPropConfig{lr_critic, rho, epsilon}.validate();
  RmsPropConfig{lr_generator, rho, epsilon}.validate();
}

GeneratorParams GeneratorParams::identity(std::vector<std::size_t> mask) {
  GeneratorParams g;
  g.u.assign(mask.size(), 0.0);
  g.mask = std::move(mask);
  return g;
}

std::vector<double> GeneratorParams::coefficients() const {
  std::vector<double> out(u.size());
  std::transform(u.begin(), u.end(), out.begin(), [](double v) { return std::exp(v); });
  return out;
}

std::vector<std::size_t> central_mask(const DetectorGeometry& geom, int half_width) {
  if (half_width < 1) throw ArgumentError("mask half width must be at least 1");
  const int side = 2 * half_width;
  if (side > geom.n_rows || side > geom.n_cols)
    throw ArgumentError("central block " + std::to_string(side) + "x" + std::to_string(side) +
                        " exceeds the " + std::to_string(geom.n_rows) + "x" +
                        std::to_string(geom.n_cols) + " grid");
  const int r0 = (geom.n_rows - side) / 2;
  const int c0 = (geom.n_cols - side) / 2;
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(side * side));
  for (int r = r0; r < r0 + side; ++r)
    for (int c = c0; c < c0 + side; ++c) out.push_back(geom.index(r, c));
  return out;
}

Eigen::MatrixXd gather_masked(const EventSet& e, std::span<const std::size_t> mask, double scale) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(mask.size()),
                    static_cast<Eigen::Index>(e.n_events()));
  for (std::size_t k = 0; k < e.n_events(); ++k) {
    const auto ev = e.event(k);
    for (std::size_t j = 0; j < mask.size(); ++j)
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = ev[mask[j]] / scale;
  }
  return m;
}

double mean_nonzero_energy(const EventSet& e) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : e.energies) {
    if (v > 0.0) {
      sum += v;
      ++n;
    }
  }
  if (n == 0) throw ArgumentError("event set has no non-zero cells");
  return sum / static_cast<double>(n);
}

Eigen::MatrixXd generator_apply(const GeneratorParams& g, const Eigen::MatrixXd& batch) {
  if (batch.rows() != static_cast<Eigen::Index>(g.u.size()))
    throw ArgumentError("batch has " + std::to_string(batch.rows()) + " cells, generator has " +
                        std::to_string(g.u.size()));
  const Eigen::Map<const Eigen::ArrayXd> u(g.u.data(), static_cast<Eigen::Index>(g.u.size()));
  const Eigen::VectorXd factor = u.exp().matrix();
  return factor.asDiagonal() * batch;
}

CriticStep critic_loss_and_grads(const MlpParams& critic, const Eigen::MatrixXd& real_batch,
                                 const Eigen::MatrixXd& fake_batch) {
  if (real_batch.cols() == 0 || fake_batch.cols() == 0)
    throw ArgumentError("critic batches must be non-empty");
  if (real_batch.rows() != fake_batch.rows())
    throw ArgumentError("real and fake batches differ in width");
  const Eigen::Index nr = real_batch.cols();
  const Eigen::Index nf = fake_batch.cols();

  Eigen::MatrixXd both(real_batch.rows(), nr + nf);
  both << real_batch, fake_batch;
  auto fwd = mlp_forward_batch(both, critic);

  const double mean_real = fwd.scores.head(nr).mean();
  const double mean_fake = fwd.scores.tail(nf).mean();
  Eigen::RowVectorXd upstream(nr + nf);
  upstream.head(nr).setConstant(-1.0 / static_cast<double>(nr));
  upstream.tail(nf).setConstant(1.0 / static_cast<double>(nf));
  auto back = mlp_backward_batch(fwd.cache, critic, upstream);
  return {mean_fake - mean_real, std::move(back.params)};
}

GeneratorStep generator_loss_and_grads(const MlpParams& critic, const GeneratorParams& g,
                                       const Eigen::MatrixXd& undamaged_batch) {
  if (undamaged_batch.cols() == 0) throw ArgumentError("generator batch must be non-empty");
  const Eigen::MatrixXd y = generator_apply(g, undamaged_batch);
  auto fwd = mlp_forward_batch(y, critic);
  const auto b = static_cast<double>(y.cols());
  Eigen::RowVectorXd upstream = Eigen::RowVectorXd::Constant(y.cols(), -1.0 / b);
  auto back = mlp_backward_batch(fwd.cache, critic, upstream);
  // d y_ib / d u_i = y_ib
  const Eigen::VectorXd gu = back.input_grad.cwiseProduct(y).rowwise().sum();
  GeneratorStep out;
  out.loss = -fwd.scores.mean();
  out.grad_u.assign(gu.data(), gu.data() + gu.size());
  return out;
}

std::vector<double> ratio_of_means_baseline(const EventSet& undamaged, const EventSet& damaged) {
  if (!(undamaged.geometry == damaged.geometry))
    throw ArgumentError("undamaged and damaged sets have different geometry");
  if (undamaged.n_events() == 0 || damaged.n_events() == 0)
    throw ArgumentError("baseline needs non-empty event sets");
  constexpr double kMinMean = 1e-9;
  const auto cells = undamaged.geometry.cells();
  std::vector<double> su(cells, 0.0);
  std::vector<double> sd(cells, 0.0);
  for (std::size_t k = 0; k < undamaged.n_events(); ++k) {
    const auto ev = undamaged.event(k);
    for (std::size_t i = 0; i < cells; ++i) su[i] += ev[i];
  }
  for (std::size_t k = 0; k < damaged.n_events(); ++k) {
    const auto ev = damaged.event(k);
    for (std::size_t i = 0; i < cells; ++i) sd[i] += ev[i];
  }
  const auto nu = static_cast<double>(undamaged.n_events());
  const auto nd = static_cast<double>(damaged.n_events());
  std::vector<double> out(cells, 1.0);
  for (std::size_t i = 0; i < cells; ++i) {
    const double mu = su[i] / nu;
    if (mu > kMinMean) out[i] = (sd[i] / nd) / mu;
  }
  return out;
}

namespace {

// Cycles through a shuffled permutation of [0, n), reshuffling on wrap.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::mt19937_64& rng) : order_(n), rng_(rng) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  Eigen::MatrixXd next(const Eigen::MatrixXd& source, int batch) {
    Eigen::MatrixXd out(source.rows(), batch);
    for (int b = 0; b < batch; ++b) {
      if (pos_ == order_.size()) {
        std::shuffle(order_.begin(), order_.end(), rng_);
        pos_ = 0;
      }
      out.col(b) = source.col(static_cast<Eigen::Index>(order_[pos_++]));
    }
    return out;
  }

 private:
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  std::mt19937_64& rng_;
};

}  // namespace

CalibrationResult train_calibration(const EventSet& undamaged, const EventSet& damaged,
                                    const TrainConfig& cfg, const AgingProfile* truth,
                                    const EpochCallback& on_epoch) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  if (!(undamaged.geometry == damaged.geometry))
    throw ArgumentError("undamaged and damaged sets have different geometry");
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  if (undamaged.n_events() < batch || damaged.n_events() < batch)
    throw ArgumentError("each event set needs at least batch_size = " +
                        std::to_string(cfg.batch_size) + " events");
  const auto& geom = undamaged.geometry;
  if (truth && truth->size() != geom.cells())
    throw ArgumentError("truth profile does not match the geometry");

  CalibrationResult result;
  TrainReport& report = result.report;
  report.config = cfg;
  report.mask = central_mask(geom, cfg.mask_half_width);
  report.scale = cfg.scale ? *cfg.scale : mean_nonzero_energy(undamaged);

  std::vector<double> truth_masked;
  if (truth) {
    for (auto i : report.mask) truth_masked.push_back(truth->a[i]);
  }

  const Eigen::MatrixXd u_data = gather_masked(undamaged, report.mask, report.scale);
  const Eigen::MatrixXd d_data = gather_masked(damaged, report.mask, report.scale);

  std::mt19937_64 rng(cfg.seed);
  MlpParams critic = make_mlp(static_cast<Eigen::Index>(report.mask.size()), cfg.hidden,
                              cfg.leaky_slope, cfg.init_range, rng);
  clip_weights_inplace(critic, cfg.clip);
  OptState critic_opt = OptState::like(critic, {cfg.lr_critic, cfg.rho, cfg.epsilon});
  GeneratorParams gen = GeneratorParams::identity(report.mask);
  OptState gen_opt = OptState::like(gen.u, {cfg.lr_generator, cfg.rho, cfg.epsilon});

  BatchSampler real_sampler(damaged.n_events(), rng);
  BatchSampler fake_sampler(undamaged.n_events(), rng);
  const std::size_t steps = undamaged.n_events() / batch;

  // One generator update per batch of undamaged events, each preceded by
  // n_critic critic updates on fresh batches.
  auto run_epoch = [&](double& critic_sum, double& gen_sum) {
    for (std::size_t s = 0; s < steps; ++s) {
      for (int c = 0; c < cfg.n_critic; ++c) {
        const Eigen::MatrixXd real = real_sampler.next(d_data, cfg.batch_size);
        const Eigen::MatrixXd fake =
            generator_apply(gen, fake_sampler.next(u_data, cfg.batch_size));
        auto step = critic_loss_and_grads(critic, real, fake);
        if (!std::isfinite(step.loss)) throw NumericError("critic loss is not finite");
        rmsprop_step(critic, step.grads, critic_opt);
        clip_weights_inplace(critic, cfg.clip);
        critic_sum += step.loss;
      }
      const Eigen::MatrixXd x = fake_sampler.next(u_data, cfg.batch_size);
      auto step = generator_loss_and_grads(critic, gen, x);
      if (!std::isfinite(step.loss)) throw NumericError("generator loss is not finite");
      rmsprop_step(gen.u, step.grad_u, gen_opt);
      gen_sum += step.loss;
    }
  };

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double critic_sum = 0.0;
    double gen_sum = 0.0;
    try {
      run_epoch(critic_sum, gen_sum);
    } catch (const NumericError& e) {
      throw TrainingError(epoch, e.what());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.critic_loss = critic_sum / static_cast<double>(steps * static_cast<std::size_t>(cfg.n_critic));
    rec.generator_loss = gen_sum / static_cast<double>(steps);
    rec.wasserstein_estimate = -rec.critic_loss;
    if (truth) {
      const auto coeffs = gen.coefficients();
      rec.mae = mae(coeffs, truth_masked);
      // R2 is undefined for a constant truth (e.g. no aging); leave it unset.
      const auto [lo, hi] = std::minmax_element(truth_masked.begin(), truth_masked.end());
      if (truth_masked.size() >= 2 && *lo != *hi) rec.r2 = r_squared(coeffs, truth_masked);
    }
    report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }

  report.final_coefficients = gen.coefficients();
  const auto baseline = ratio_of_means_baseline(undamaged, damaged);
  result.coefficients = baseline;
  std::vector<bool> in_mask(geom.cells(), false);
  for (std::size_t j = 0; j < report.mask.size(); ++j) {
    in_mask[report.mask[j]] = true;
    result.coefficients[report.mask[j]] = report.final_coefficients[j];
  }
  for (std::size_t i = 0; i < geom.cells(); ++i) {
    if (!in_mask[i]) {
      // A cell seen only in the undamaged set has no usable ratio.
      if (!(result.coefficients[i] > 0.0)) result.coefficients[i] = 1.0;
      report.border_cells.push_back(i);
      report.border_coefficients.push_back(result.coefficients[i]);
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace calocal
