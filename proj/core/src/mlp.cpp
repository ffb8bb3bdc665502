#include "calocal/mlp.hpp"

#include <algorithm>
#include <string>

#include "calocal/errors.hpp"

namespace calocal {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void leaky_inplace(Eigen::MatrixXd& z, double alpha) {
  z = z.unaryExpr([alpha](double v) { return v > 0.0 ? v : alpha * v; });
}

}  // namespace

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

void MlpParams::validate() const {
  if (layers.empty()) throw ShapeError("mlp has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    if (l.weight.rows() != l.bias.size())
      throw ShapeError("layer " + std::to_string(k) + ": weight " +
                       dims(l.weight.rows(), l.weight.cols()) + " vs bias " +
                       std::to_string(l.bias.size()));
    if (k + 1 < layers.size() && layers[k + 1].weight.cols() != l.weight.rows())
      throw ShapeError("layer " + std::to_string(k + 1) + " expects input dim " +
                       std::to_string(layers[k + 1].weight.cols()) + ", previous layer emits " +
                       std::to_string(l.weight.rows()));
    if (!l.weight.allFinite() || !l.bias.allFinite())
      throw NumericError("layer " + std::to_string(k) + " has non-finite parameters");
  }
  if (layers.back().weight.rows() != 1) throw ShapeError("final layer must have one output");
}

MlpParams make_mlp(Eigen::Index input_dim, std::span<const int> hidden, double alpha,
                   double init_range, std::mt19937_64& rng) {
  if (input_dim < 1) throw ArgumentError("mlp input dim must be positive");
  std::uniform_real_distribution<double> unif(-init_range, init_range);
  MlpParams p;
  p.alpha = alpha;
  Eigen::Index in = input_dim;
  auto add_layer = [&](Eigen::Index out) {
    DenseLayer l;
    l.weight.resize(out, in);
    l.bias.resize(out);
    // Explicit loops fix the draw order independently of Eigen internals.
    for (Eigen::Index c = 0; c < in; ++c)
      for (Eigen::Index r = 0; r < out; ++r) l.weight(r, c) = unif(rng);
    for (Eigen::Index r = 0; r < out; ++r) l.bias(r) = unif(rng);
    p.layers.push_back(std::move(l));
    in = out;
  };
  for (int h : hidden) {
    if (h < 1) throw ArgumentError("hidden layer widths must be positive");
    add_layer(h);
  }
  add_layer(1);
  return p;
}

MlpBatchOutput mlp_forward_batch(const Eigen::MatrixXd& x, const MlpParams& p) {
  if (p.layers.empty()) throw ShapeError("mlp has no layers");
  if (x.rows() != p.input_dim())
    throw ShapeError("input dim " + std::to_string(x.rows()) + " != mlp input dim " +
                     std::to_string(p.input_dim()));
  if (!x.allFinite()) throw NumericError("non-finite mlp input");

  MlpBatchOutput out;
  out.cache.inputs.reserve(p.layers.size());
  out.cache.preactivations.reserve(p.layers.size() - 1);
  Eigen::MatrixXd a = x;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const auto& l = p.layers[k];
    Eigen::MatrixXd z = l.weight * a;
    z.colwise() += l.bias;
    out.cache.inputs.push_back(std::move(a));
    if (k + 1 == p.layers.size()) {
      out.scores = z.row(0);
    } else {
      out.cache.preactivations.push_back(z);
      leaky_inplace(z, p.alpha);
      a = std::move(z);
    }
  }
  return out;
}

MlpOutput mlp_forward(std::span<const double> x, const MlpParams& p) {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  auto batch = mlp_forward_batch(Eigen::MatrixXd(xv), p);
  return {batch.scores(0), std::move(batch.cache)};
}

MlpBackward mlp_backward_batch(const MlpCache& cache, const MlpParams& p,
                               const Eigen::RowVectorXd& upstream) {
  const std::size_t n = p.layers.size();
  if (n == 0 || cache.inputs.size() != n || cache.preactivations.size() != n - 1)
    throw ShapeError("cache does not match network depth");
  const Eigen::Index batch = upstream.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (cache.inputs[k].rows() != p.layers[k].weight.cols() || cache.inputs[k].cols() != batch)
      throw ShapeError("cache layer " + std::to_string(k) + " is " +
                       dims(cache.inputs[k].rows(), cache.inputs[k].cols()) + ", expected " +
                       dims(p.layers[k].weight.cols(), batch));
    if (k + 1 < n && (cache.preactivations[k].rows() != p.layers[k].weight.rows() ||
                      cache.preactivations[k].cols() != batch))
      throw ShapeError("cache preactivation " + std::to_string(k) + " has wrong shape");
  }

  MlpBackward out;
  out.params.layers.resize(n);
  Eigen::MatrixXd delta = upstream;  // 1 x batch
  for (std::size_t k = n; k-- > 0;) {
    const auto& l = p.layers[k];
    auto& g = out.params.layers[k];
    g.weight = delta * cache.inputs[k].transpose();
    g.bias = delta.rowwise().sum();
    Eigen::MatrixXd back = l.weight.transpose() * delta;
    if (k > 0) {
      const auto& z = cache.preactivations[k - 1];
      const double alpha = p.alpha;
      back = back.binaryExpr(z, [alpha](double d, double zv) { return zv > 0.0 ? d : alpha * d; });
    }
    delta = std::move(back);
  }
  out.input_grad = std::move(delta);
  return out;
}

MlpBackwardSingle mlp_backward(const MlpCache& cache, const MlpParams& p, double upstream) {
  Eigen::RowVectorXd up(1);
  up(0) = upstream;
  auto b = mlp_backward_batch(cache, p, up);
  return {std::move(b.params), b.input_grad.col(0)};
}

void clip_weights_inplace(MlpParams& p, double c) {
  if (!(c > 0.0)) throw ArgumentError("clip range must be positive");
  for (auto& l : p.layers) {
    l.weight = l.weight.cwiseMax(-c).cwiseMin(c);
    l.bias = l.bias.cwiseMax(-c).cwiseMin(c);
  }
}

MlpParams clip_weights(const MlpParams& p, double c) {
  MlpParams out = p;
  clip_weights_inplace(out, c);
  return out;
}

double max_abs_entry(const MlpParams& p) {
  double m = 0.0;
  for (const auto& l : p.layers) {
    if (l.weight.size() > 0) m = std::max(m, l.weight.cwiseAbs().maxCoeff());
    if (l.bias.size() > 0) m = std::max(m, l.bias.cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace calocal
