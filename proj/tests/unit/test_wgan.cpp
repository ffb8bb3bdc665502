#include <doctest.h>

#include <cmath>
#include <random>

#include "calocal/aging.hpp"
#include "calocal/errors.hpp"
#include "calocal/metrics.hpp"
#include "calocal/rmsprop.hpp"
#include "calocal/showersim.hpp"
#include "calocal/wgan.hpp"
#include "support/oracles.hpp"

using namespace calocal;
using calocal::testing::central_difference;
using calocal::testing::grad_close;
using calocal::testing::naive_mlp;
using calocal::testing::random_mlp;

namespace {

MlpParams linear_critic(const std::vector<double>& w) {
  MlpParams p;
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = w[i];
  p.layers.push_back({m, Eigen::VectorXd::Zero(1)});
  return p;
}

double naive_mean_score(const MlpParams& p, const Eigen::MatrixXd& batch) {
  double s = 0.0;
  for (Eigen::Index b = 0; b < batch.cols(); ++b) {
    std::vector<double> x(batch.col(b).data(), batch.col(b).data() + batch.rows());
    s += naive_mlp(p, x);
  }
  return s / static_cast<double>(batch.cols());
}

}  // namespace

TEST_CASE("central_mask") {
  const DetectorGeometry g;
  const auto m = central_mask(g, 6);
  REQUIRE(m.size() == 144);
  CHECK(m.front() == g.index(6, 6));
  CHECK(m.back() == g.index(17, 17));
  CHECK(m[12] == g.index(7, 6));
  CHECK(std::is_sorted(m.begin(), m.end()));

  const auto full = central_mask(g, 12);
  CHECK(full.size() == g.cells());

  CHECK_THROWS_AS(central_mask(g, 0), ArgumentError);
  CHECK_THROWS_AS(central_mask(g, 13), ArgumentError);
}

TEST_CASE("generator_apply") {
  auto g = GeneratorParams::identity({0, 1, 2});
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 4);
  CHECK(generator_apply(g, x) == x);

  GeneratorParams half{{5}, {std::log(0.5)}};
  Eigen::MatrixXd four = Eigen::MatrixXd::Constant(1, 1, 4.0);
  CHECK(generator_apply(half, four)(0, 0) == doctest::Approx(2.0));
  CHECK(half.coefficients()[0] == doctest::Approx(0.5));

  CHECK_THROWS_AS(generator_apply(g, Eigen::MatrixXd::Zero(2, 4)), ArgumentError);
}

TEST_CASE("critic loss: identical batches give exactly zero") {
  std::mt19937_64 rng(1);
  const auto critic = random_mlp(5, {4, 3}, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 8);
  CHECK(critic_loss_and_grads(critic, x, x).loss == 0.0);
}

TEST_CASE("critic loss: linear critic") {
  const std::vector<double> w{0.5, -1.0, 2.0};
  const auto critic = linear_critic(w);
  Eigen::MatrixXd real(3, 2), fake(3, 3);
  real << 1, 2, 0, 1, 3, 1;
  fake << 2, 2, 2, 1, 0, 2, 0, 0, 3;
  const Eigen::Vector3d diff = fake.rowwise().mean() - real.rowwise().mean();
  const double expected = w[0] * diff(0) + w[1] * diff(1) + w[2] * diff(2);
  CHECK(critic_loss_and_grads(critic, real, fake).loss == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(critic_loss_and_grads(critic, Eigen::MatrixXd(3, 0), fake), ArgumentError);
}

TEST_CASE("critic gradients match finite differences") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto critic = random_mlp(6, {5, 4}, rng);
    const Eigen::MatrixXd real = Eigen::MatrixXd::Random(6, 7);
    const Eigen::MatrixXd fake = Eigen::MatrixXd::Random(6, 5);
    const auto step = critic_loss_and_grads(critic, real, fake);
    auto f = [&] { return naive_mean_score(critic, fake) - naive_mean_score(critic, real); };
    CHECK(step.loss == doctest::Approx(f()).epsilon(1e-12));
    for (std::size_t k = 0; k < critic.layers.size(); ++k) {
      auto& l = critic.layers[k];
      for (Eigen::Index i = 0; i < l.weight.size(); ++i)
        CHECK(grad_close(step.grads.layers[k].weight.data()[i],
                         central_difference(f, l.weight.data() + i)));
      for (Eigen::Index i = 0; i < l.bias.size(); ++i)
        CHECK(grad_close(step.grads.layers[k].bias(i), central_difference(f, l.bias.data() + i)));
    }
  }
}

TEST_CASE("generator gradient: linear critic closed form") {
  const std::vector<double> w{0.3, -0.2, 1.0};
  const auto critic = linear_critic(w);
  auto g = GeneratorParams::identity({0, 1, 2});
  Eigen::MatrixXd x(3, 4);
  x << 1, 2, 3, 4, 0, 0, 1, 1, 2, 2, 2, 2;
  const auto step = generator_loss_and_grads(critic, g, x);
  for (int i = 0; i < 3; ++i)
    CHECK(step.grad_u[static_cast<std::size_t>(i)] ==
          doctest::Approx(-w[static_cast<std::size_t>(i)] * x.row(i).mean()));
}

TEST_CASE("generator gradient matches finite differences on u") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0.0, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto critic = random_mlp(6, {5, 4}, rng);
    GeneratorParams g = GeneratorParams::identity({0, 1, 2, 3, 4, 5});
    for (auto& u : g.u) u = n(rng);
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 9).cwiseAbs();
    const auto step = generator_loss_and_grads(critic, g, x);
    auto f = [&] {
      Eigen::MatrixXd y = x;
      for (Eigen::Index i = 0; i < y.rows(); ++i) y.row(i) *= std::exp(g.u[static_cast<std::size_t>(i)]);
      return -naive_mean_score(critic, y);
    };
    CHECK(step.loss == doctest::Approx(f()).epsilon(1e-12));
    for (std::size_t i = 0; i < g.u.size(); ++i)
      CHECK(grad_close(step.grad_u[i], central_difference(f, &g.u[i])));
  }
}

TEST_CASE("generator gradient vanishes on all-zero events") {
  std::mt19937_64 rng(2);
  const auto critic = random_mlp(4, {3}, rng);
  auto g = GeneratorParams::identity({0, 1, 2, 3});
  g.u = {0.1, -0.2, 0.3, 0.0};
  const auto step = generator_loss_and_grads(critic, g, Eigen::MatrixXd::Zero(4, 5));
  for (double v : step.grad_u) CHECK(v == 0.0);
}

TEST_CASE("ratio_of_means_baseline") {
  const DetectorGeometry g;
  const auto u = simulate_events(g, ShowerModel{}, 500, 10.0, 3);
  const auto truth = make_linear_profile(integrated_dose(u), 0.3, 0.5);
  const auto shared = ratio_of_means_baseline(u, apply_damage(u, truth));
  const auto dose = integrated_dose(u);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    if (dose[i] > 1e-9 * 500) CHECK(shared[i] == doctest::Approx(truth.a[i]).epsilon(1e-12));
    else CHECK(shared[i] == 1.0);
  }

  EventSet z = u;
  for (std::size_t k = 0; k < z.n_events(); ++k) z.event(k)[0] = 0.0;
  CHECK(ratio_of_means_baseline(z, u)[0] == 1.0);
}

TEST_CASE("baseline error shrinks with more events") {
  const DetectorGeometry g;
  const ShowerModel m;
  const auto ref = simulate_events(g, m, 5000, 10.0, 100);
  const auto truth = make_linear_profile(integrated_dose(ref), 0.3, 0.5);
  const auto mask = central_mask(g, 6);
  std::vector<double> errs;
  for (std::size_t n : {500u, 5000u, 50000u}) {
    const auto u = simulate_events(g, m, n, 10.0, 200 + n);
    const auto d = apply_damage(simulate_events(g, m, n, 10.0, 300 + n), truth);
    const auto b = ratio_of_means_baseline(u, d);
    std::vector<double> pm, tm;
    for (auto i : mask) pm.push_back(b[i]), tm.push_back(truth.a[i]);
    errs.push_back(mae(pm, tm));
  }
  CHECK(errs[0] > errs[1]);
  CHECK(errs[1] > errs[2]);
}

TEST_CASE("baseline on independent 5000-event draws") {
  const DetectorGeometry g;
  const ShowerModel m;
  const auto u = simulate_events(g, m, 5000, 10.0, 7);
  const auto truth = make_linear_profile(integrated_dose(u), 0.3, 0.5);
  const auto d = apply_damage(simulate_events(g, m, 5000, 10.0, 8), truth);
  const auto b = ratio_of_means_baseline(u, d);
  const auto dose = integrated_dose(u);
  std::vector<double> pm, tm;
  for (std::size_t i = 0; i < g.cells(); ++i)
    if (dose[i] / 5000.0 >= 1.0) pm.push_back(b[i]), tm.push_back(truth.a[i]);
  REQUIRE(!pm.empty());
  CHECK(mae(pm, tm) <= 0.03);
}

TEST_CASE("critic stays clipped and generator stays positive through manual steps") {
  const DetectorGeometry g;
  const auto u = simulate_events(g, ShowerModel{}, 256, 10.0, 1);
  const auto d = apply_damage(simulate_events(g, ShowerModel{}, 256, 10.0, 2),
                              make_linear_profile(integrated_dose(u), 0.3, 0.5));
  const auto mask = central_mask(g, 6);
  const double scale = mean_nonzero_energy(u);
  const auto ud = gather_masked(u, mask, scale);
  const auto dd = gather_masked(d, mask, scale);

  std::mt19937_64 rng(5);
  const std::vector<int> hidden{16, 8};
  auto critic = make_mlp(static_cast<Eigen::Index>(mask.size()), hidden, 0.2, 0.01, rng);
  auto copt = OptState::like(critic, {5e-3, 0.9, 1e-8});
  auto gen = GeneratorParams::identity(mask);
  auto gopt = OptState::like(gen.u, {0.05, 0.9, 1e-8});

  CHECK(generator_apply(gen, ud) == ud);
  for (int step = 0; step < 30; ++step) {
    const auto cs = critic_loss_and_grads(critic, dd.leftCols(64), generator_apply(gen, ud.leftCols(64)));
    rmsprop_step(critic, cs.grads, copt);
    clip_weights_inplace(critic, 0.01);
    CHECK(max_abs_entry(critic) <= 0.01);
    const auto gs = generator_loss_and_grads(critic, gen, ud.rightCols(64));
    rmsprop_step(gen.u, gs.grad_u, gopt);
    for (double c : gen.coefficients()) CHECK(c > 0.0);
  }
}

namespace {

struct SmallRun {
  EventSet undamaged;
  EventSet damaged;
  AgingProfile truth;
};

SmallRun small_run(std::size_t n) {
  const DetectorGeometry g{12, 12, 30.0};
  const ShowerModel m;
  SmallRun r;
  r.undamaged = simulate_events(g, m, n, 10.0, 21);
  r.truth = make_linear_profile(integrated_dose(r.undamaged), 0.3, 0.5);
  r.damaged = apply_damage(simulate_events(g, m, n, 10.0, 22), r.truth);
  return r;
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.hidden = {16, 8};
  cfg.mask_half_width = 3;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("train_calibration: report contract and determinism") {
  const auto r = small_run(300);
  const auto cfg = small_config();
  const auto a = train_calibration(r.undamaged, r.damaged, cfg, &r.truth);
  const auto b = train_calibration(r.undamaged, r.damaged, cfg, &r.truth);

  CHECK(a.report.epochs.size() == 3);
  CHECK(a.report.mask.size() == 36);
  CHECK(a.report.final_coefficients.size() == 36);
  CHECK(a.report.border_cells.size() == 144 - 36);
  CHECK(a.coefficients.size() == 144);
  CHECK(a.report.scale == doctest::Approx(mean_nonzero_energy(r.undamaged)));
  for (const auto& e : a.report.epochs) {
    CHECK(e.mae.has_value());
    CHECK(e.r2.has_value());
    CHECK(std::isfinite(e.critic_loss));
    CHECK(e.wasserstein_estimate == -e.critic_loss);
  }
  for (double c : a.coefficients) CHECK(c > 0.0);

  CHECK(a.coefficients == b.coefficients);
  for (std::size_t k = 0; k < a.report.epochs.size(); ++k) {
    CHECK(a.report.epochs[k].critic_loss == b.report.epochs[k].critic_loss);
    CHECK(a.report.epochs[k].generator_loss == b.report.epochs[k].generator_loss);
    CHECK(*a.report.epochs[k].mae == *b.report.epochs[k].mae);
  }

  const auto base = ratio_of_means_baseline(r.undamaged, r.damaged);
  for (std::size_t j = 0; j < a.report.border_cells.size(); ++j) {
    const auto i = a.report.border_cells[j];
    if (base[i] > 0.0) CHECK(a.coefficients[i] == base[i]);
  }

  auto other = cfg;
  other.seed = 6;
  CHECK(train_calibration(r.undamaged, r.damaged, other).coefficients != a.coefficients);
}

TEST_CASE("train_calibration: without truth no metrics are recorded") {
  const auto r = small_run(200);
  const auto res = train_calibration(r.undamaged, r.damaged, small_config());
  for (const auto& e : res.report.epochs) {
    CHECK_FALSE(e.mae.has_value());
    CHECK_FALSE(e.r2.has_value());
  }
}

TEST_CASE("train_calibration: argument errors") {
  const auto r = small_run(100);
  auto cfg = small_config();
  cfg.batch_size = 128;
  CHECK_THROWS_AS(train_calibration(r.undamaged, r.damaged, cfg), ArgumentError);

  cfg = small_config();
  EventSet other = simulate_events(DetectorGeometry{}, ShowerModel{}, 100, 10.0, 1);
  CHECK_THROWS_AS(train_calibration(r.undamaged, other, cfg), ArgumentError);

  cfg.clip = 0.0;
  CHECK_THROWS_AS(train_calibration(r.undamaged, r.damaged, cfg), ArgumentError);
}

TEST_CASE("train_calibration: divergence is reported with its epoch") {
  const auto r = small_run(200);
  auto cfg = small_config();
  cfg.lr_generator = 1e4;
  try {
    train_calibration(r.undamaged, r.damaged, cfg);
    FAIL("expected TrainingError");
  } catch (const TrainingError& e) {
    CHECK(e.epoch() >= 1);
  }
}
