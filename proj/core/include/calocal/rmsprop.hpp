#pragma once

#include <span>
#include <vector>

#include "calocal/mlp.hpp"

namespace calocal {

struct RmsPropConfig {
  double learning_rate = 5e-5;
  double rho = 0.9;
  double epsilon = 1e-8;

  void validate() const;
};

/// Running second-moment accumulators, one block per parameter block.
struct OptState {
  RmsPropConfig config;
  std::vector<std::vector<double>> accumulators;

  static OptState like(const MlpParams& p, const RmsPropConfig& cfg);
  static OptState like(std::span<const double> params, const RmsPropConfig& cfg);
};

// s <- rho*s + (1-rho)*g^2 ; theta <- theta - lr*g/(sqrt(s)+eps)
//
// Gradients are checked for finiteness before anything is modified, so a
// NumericError leaves params and state untouched.
void rmsprop_step(std::span<double> params, std::span<const double> grads, OptState& state);
void rmsprop_step(MlpParams& params, const MlpGradients& grads, OptState& state);

}  // namespace calocal
