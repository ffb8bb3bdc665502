#include "calocal/rmsprop.hpp"

#include <cmath>
#include <string>

#include "calocal/errors.hpp"

namespace calocal {

void RmsPropConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ArgumentError("learning rate must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw ArgumentError("rho must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
}

OptState OptState::like(const MlpParams& p, const RmsPropConfig& cfg) {
  cfg.validate();
  OptState s{cfg, {}};
  for (const auto& l : p.layers) {
    s.accumulators.emplace_back(static_cast<std::size_t>(l.weight.size()), 0.0);
    s.accumulators.emplace_back(static_cast<std::size_t>(l.bias.size()), 0.0);
  }
  return s;
}

OptState OptState::like(std::span<const double> params, const RmsPropConfig& cfg) {
  cfg.validate();
  return OptState{cfg, {std::vector<double>(params.size(), 0.0)}};
}

namespace {

void check_finite(std::span<const double> g, std::size_t block) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!std::isfinite(g[i]))
      throw NumericError("non-finite gradient at block " + std::to_string(block) + ", index " +
                         std::to_string(i));
}

void update_block(std::span<double> params, std::span<const double> grads,
                  std::vector<double>& acc, const RmsPropConfig& cfg) {
  const double rho = cfg.rho;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    acc[i] = rho * acc[i] + (1.0 - rho) * g * g;
    params[i] -= cfg.learning_rate * g / (std::sqrt(acc[i]) + cfg.epsilon);
  }
}

}  // namespace

void rmsprop_step(std::span<double> params, std::span<const double> grads, OptState& state) {
  if (state.accumulators.size() != 1 || state.accumulators[0].size() != params.size() ||
      grads.size() != params.size())
    throw ShapeError("rmsprop: params, grads and state disagree in shape");
  check_finite(grads, 0);
  update_block(params, grads, state.accumulators[0], state.config);
}

void rmsprop_step(MlpParams& params, const MlpGradients& grads, OptState& state) {
  const std::size_t n = params.layers.size();
  if (grads.layers.size() != n || state.accumulators.size() != 2 * n)
    throw ShapeError("rmsprop: layer count mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = params.layers[k];
    const auto& g = grads.layers[k];
    if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() ||
        g.bias.size() != p.bias.size() ||
        state.accumulators[2 * k].size() != static_cast<std::size_t>(p.weight.size()) ||
        state.accumulators[2 * k + 1].size() != static_cast<std::size_t>(p.bias.size()))
      throw ShapeError("rmsprop: layer " + std::to_string(k) + " shape mismatch");
    check_finite({g.weight.data(), static_cast<std::size_t>(g.weight.size())}, 2 * k);
    check_finite({g.bias.data(), static_cast<std::size_t>(g.bias.size())}, 2 * k + 1);
  }
  for (std::size_t k = 0; k < n; ++k) {
    auto& p = params.layers[k];
    const auto& g = grads.layers[k];
    update_block({p.weight.data(), static_cast<std::size_t>(p.weight.size())},
                 {g.weight.data(), static_cast<std::size_t>(g.weight.size())},
                 state.accumulators[2 * k], state.config);
    update_block({p.bias.data(), static_cast<std::size_t>(p.bias.size())},
                 {g.bias.data(), static_cast<std::size_t>(g.bias.size())},
                 state.accumulators[2 * k + 1], state.config);
  }
}

}  // namespace calocal
