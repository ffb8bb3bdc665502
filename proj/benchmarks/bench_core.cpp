#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "calocal/metrics.hpp"
#include "calocal/mlp.hpp"
#include "calocal/showersim.hpp"
#include "calocal/wgan.hpp"

namespace {

using namespace calocal;

MlpParams bench_critic(std::mt19937_64& rng) {
  const std::vector<int> hidden{128, 64};
  return make_mlp(144, hidden, 0.2, 0.01, rng);
}

void BM_CriticForwardBatch(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto critic = bench_critic(rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(144, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mlp_forward_batch(x, critic));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CriticForwardBatch)->Arg(64)->Arg(128);

void BM_CriticStep(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto critic = bench_critic(rng);
  const Eigen::MatrixXd real = Eigen::MatrixXd::Random(144, 64);
  const Eigen::MatrixXd fake = Eigen::MatrixXd::Random(144, 64);
  for (auto _ : state) benchmark::DoNotOptimize(critic_loss_and_grads(critic, real, fake));
}
BENCHMARK(BM_CriticStep);

void BM_GeneratorStep(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto critic = bench_critic(rng);
  const auto g = GeneratorParams::identity(central_mask(DetectorGeometry{}, 6));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(144, 64).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(generator_loss_and_grads(critic, g, x));
}
BENCHMARK(BM_GeneratorStep);

void BM_SimulateEvents(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        simulate_events(DetectorGeometry{}, ShowerModel{}, static_cast<std::size_t>(state.range(0)), 10.0, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateEvents)->Arg(100)->Arg(1000);

void BM_Wasserstein1(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(8000.0, 300.0);
  std::vector<double> a(static_cast<std::size_t>(state.range(0)));
  std::vector<double> b(a.size() + 1);
  for (auto& v : a) v = n(rng);
  for (auto& v : b) v = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein1_empirical(a, b));
}
BENCHMARK(BM_Wasserstein1)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
