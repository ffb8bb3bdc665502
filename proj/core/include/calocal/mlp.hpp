#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace calocal {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Fully connected network with leaky-rectifier hidden activations and a raw
/// scalar output. Used as the WGAN critic.
struct MlpParams {
  std::vector<DenseLayer> layers;
  double alpha = 0.2;  // negative slope of the leaky rectifier

  Eigen::Index input_dim() const { return layers.empty() ? 0 : layers.front().weight.cols(); }
  std::size_t parameter_count() const;

  /// Layer chaining, scalar output, finite entries. Throws ShapeError/NumericError.
  void validate() const;
};

/// Gradients with the same layout as MlpParams::layers.
struct MlpGradients {
  std::vector<DenseLayer> layers;
};

/// Activations saved by the forward pass. Column b of each matrix belongs to
/// sample b of the batch.
struct MlpCache {
  std::vector<Eigen::MatrixXd> inputs;       // input of every layer
  std::vector<Eigen::MatrixXd> preactivations;  // hidden layers only
};

struct MlpBatchOutput {
  Eigen::RowVectorXd scores;
  MlpCache cache;
};

struct MlpOutput {
  double score = 0.0;
  MlpCache cache;
};

struct MlpBackward {
  MlpGradients params;
  Eigen::MatrixXd input_grad;  // in x batch
};

struct MlpBackwardSingle {
  MlpGradients params;
  Eigen::VectorXd input_grad;
};

/// Builds a network with `input_dim -> hidden... -> 1`, weights and biases
/// drawn uniformly from [-init_range, init_range].
MlpParams make_mlp(Eigen::Index input_dim, std::span<const int> hidden, double alpha,
                   double init_range, std::mt19937_64& rng);

MlpOutput mlp_forward(std::span<const double> x, const MlpParams& p);
MlpBatchOutput mlp_forward_batch(const Eigen::MatrixXd& x, const MlpParams& p);

/// Gradients of `upstream * score` for a single sample.
MlpBackwardSingle mlp_backward(const MlpCache& cache, const MlpParams& p, double upstream);

/// Parameter gradients of sum_b upstream[b] * score_b, and per-sample input
/// gradients scaled by upstream[b].
MlpBackward mlp_backward_batch(const MlpCache& cache, const MlpParams& p,
                               const Eigen::RowVectorXd& upstream);

/// Clamps every weight and bias into [-c, c].
MlpParams clip_weights(const MlpParams& p, double c);
void clip_weights_inplace(MlpParams& p, double c);

/// Largest absolute weight or bias entry.
double max_abs_entry(const MlpParams& p);

}  // namespace calocal
