#pragma once

#include "geco/common.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace geco {

enum class HiddenActivation { squared, relu, sigmoid, identity };

HiddenActivation parse_activation(const std::string& name);
std::string to_string(HiddenActivation a);
double activate(HiddenActivation a, double z);
double activate_derivative(HiddenActivation a, double z);

struct DenseLayer {
  Matrix W;  // out x in
  Vector b;
};

// Fully connected net with scalar linear output. hidden_ holds one activation
// per hidden layer; layers_.back() is the output layer.
class MlpNet {
 public:
  MlpNet(std::vector<DenseLayer> layers, std::vector<HiddenActivation> activations);

  // Gaussian init with standard deviation init_scale / sqrt(fan_in); biases zero.
  static MlpNet random(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                       HiddenActivation activation, std::uint64_t seed, double init_scale = 1.0);

  std::size_t input_dim() const { return static_cast<std::size_t>(layers_.front().W.cols()); }
  std::size_t parameter_count() const;
  const std::vector<DenseLayer>& layers() const { return layers_; }
  const std::vector<HiddenActivation>& activations() const { return activations_; }
  std::vector<std::size_t> hidden_widths() const;

  double forward(const VectorRef& x) const;
  Vector forward_rows(const RowMatrix& X) const;

  // Flat parameter vector: for each layer W (row-major) then b.
  Vector parameters() const;
  void set_parameters(const VectorRef& theta);

  // Gradient of (1/B) sum_i l(f(x_i), y_i) over the rows of X, via backprop.
  // `dloss` maps (prediction, label) to the loss derivative.
  template <class DLoss>
  Vector gradient(const RowMatrix& X, const Vector& y, DLoss&& dloss) const;

 private:
  Vector backprop(const RowMatrix& X, const Vector& output_delta, const std::vector<Matrix>& pre,
                  const std::vector<Matrix>& post) const;
  void forward_cache(const RowMatrix& X, std::vector<Matrix>& pre, std::vector<Matrix>& post) const;

  std::vector<DenseLayer> layers_;
  std::vector<HiddenActivation> activations_;
};

template <class DLoss>
Vector MlpNet::gradient(const RowMatrix& X, const Vector& y, DLoss&& dloss) const {
  std::vector<Matrix> pre;
  std::vector<Matrix> post;
  forward_cache(X, pre, post);
  const Matrix& out = post.back();
  Vector delta(X.rows());
  const double inv_b = 1.0 / static_cast<double>(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) delta[i] = dloss(out(i, 0), y[i]) * inv_b;
  return backprop(X, delta, pre, post);
}

nlohmann::json to_json(const MlpNet& net);
MlpNet mlpnet_from_json(const nlohmann::json& j);

}  // namespace geco
