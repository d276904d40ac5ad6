#include "geco/mlp.hpp"

#include <cmath>
#include <random>

namespace geco {

HiddenActivation parse_activation(const std::string& name) {
  if (name == "squared") return HiddenActivation::squared;
  if (name == "relu") return HiddenActivation::relu;
  if (name == "sigmoid") return HiddenActivation::sigmoid;
  if (name == "identity") return HiddenActivation::identity;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string to_string(HiddenActivation a) {
  switch (a) {
    case HiddenActivation::squared:
      return "squared";
    case HiddenActivation::relu:
      return "relu";
    case HiddenActivation::sigmoid:
      return "sigmoid";
    case HiddenActivation::identity:
      return "identity";
  }
  return "unknown";
}

double activate(HiddenActivation a, double z) {
  switch (a) {
    case HiddenActivation::squared:
      return z * z;
    case HiddenActivation::relu:
      return z > 0.0 ? z : 0.0;
    case HiddenActivation::sigmoid:
      return 1.0 / (1.0 + std::exp(-z));
    case HiddenActivation::identity:
      return z;
  }
  return z;
}

double activate_derivative(HiddenActivation a, double z) {
  switch (a) {
    case HiddenActivation::squared:
      return 2.0 * z;
    case HiddenActivation::relu:
      return z > 0.0 ? 1.0 : 0.0;
    case HiddenActivation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case HiddenActivation::identity:
      return 1.0;
  }
  return 1.0;
}

MlpNet::MlpNet(std::vector<DenseLayer> layers, std::vector<HiddenActivation> activations)
    : layers_(std::move(layers)), activations_(std::move(activations)) {
  require(!layers_.empty(), "MlpNet: needs an output layer");
  require(activations_.size() + 1 == layers_.size(), "MlpNet: one activation per hidden layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    require(layers_[l].W.rows() == layers_[l].b.size(), "MlpNet: bias length differs from layer width");
    if (l > 0) require(layers_[l].W.cols() == layers_[l - 1].W.rows(), "MlpNet: layer shapes do not chain");
  }
  require(layers_.back().W.rows() == 1, "MlpNet: output must be scalar");
}

MlpNet MlpNet::random(std::size_t input_dim, const std::vector<std::size_t>& hidden, HiddenActivation activation,
                      std::uint64_t seed, double init_scale) {
  require(input_dim >= 1, "MlpNet::random: input dimension must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<DenseLayer> layers;
  std::size_t fan_in = input_dim;
  auto make = [&](std::size_t out) {
    require(out >= 1, "MlpNet::random: layer width must be positive");
    DenseLayer L{Matrix(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(fan_in)),
                 Vector::Zero(static_cast<Eigen::Index>(out))};
    const double sd = init_scale / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
      for (Eigen::Index j = 0; j < L.W.cols(); ++j) L.W(i, j) = sd * normal(rng);
    }
    fan_in = out;
    return L;
  };
  for (std::size_t w : hidden) layers.push_back(make(w));
  layers.push_back(make(1));
  return MlpNet(std::move(layers), std::vector<HiddenActivation>(hidden.size(), activation));
}

std::size_t MlpNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& L : layers_) n += static_cast<std::size_t>(L.W.size() + L.b.size());
  return n;
}

std::vector<std::size_t> MlpNet::hidden_widths() const {
  std::vector<std::size_t> w;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) w.push_back(static_cast<std::size_t>(layers_[l].W.rows()));
  return w;
}

double MlpNet::forward(const VectorRef& x) const {
  require(static_cast<std::size_t>(x.size()) == input_dim(), "MlpNet::forward: dimension mismatch");
  Vector a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Vector z = layers_[l].W * a + layers_[l].b;
    if (l + 1 < layers_.size()) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = activate(activations_[l], z[i]);
    }
    a = std::move(z);
  }
  return a[0];
}

void MlpNet::forward_cache(const RowMatrix& X, std::vector<Matrix>& pre, std::vector<Matrix>& post) const {
  require(static_cast<std::size_t>(X.cols()) == input_dim(), "MlpNet: input dimension mismatch");
  pre.clear();
  post.clear();
  Matrix a = X;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = a * layers_[l].W.transpose();
    z.rowwise() += layers_[l].b.transpose();
    pre.push_back(z);
    if (l + 1 < layers_.size()) {
      const HiddenActivation act = activations_[l];
      z = z.unaryExpr([act](double v) { return activate(act, v); });
    }
    post.push_back(z);
    a = std::move(z);
  }
}

Vector MlpNet::forward_rows(const RowMatrix& X) const {
  std::vector<Matrix> pre;
  std::vector<Matrix> post;
  forward_cache(X, pre, post);
  return post.back().col(0);
}

Vector MlpNet::parameters() const {
  Vector theta(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index k = 0;
  for (const auto& L : layers_) {
    for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
      for (Eigen::Index j = 0; j < L.W.cols(); ++j) theta[k++] = L.W(i, j);
    }
    for (Eigen::Index i = 0; i < L.b.size(); ++i) theta[k++] = L.b[i];
  }
  return theta;
}

void MlpNet::set_parameters(const VectorRef& theta) {
  require(static_cast<std::size_t>(theta.size()) == parameter_count(), "MlpNet::set_parameters: size mismatch");
  Eigen::Index k = 0;
  for (auto& L : layers_) {
    for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
      for (Eigen::Index j = 0; j < L.W.cols(); ++j) L.W(i, j) = theta[k++];
    }
    for (Eigen::Index i = 0; i < L.b.size(); ++i) L.b[i] = theta[k++];
  }
}

Vector MlpNet::backprop(const RowMatrix& X, const Vector& output_delta, const std::vector<Matrix>& pre,
                        const std::vector<Matrix>& post) const {
  std::vector<Matrix> gW(layers_.size());
  std::vector<Vector> gb(layers_.size());
  Matrix delta = output_delta;  // B x 1
  for (std::size_t l = layers_.size(); l-- > 0;) {
    if (l == 0) {
      gW[l] = delta.transpose() * X;
    } else {
      gW[l] = delta.transpose() * post[l - 1];
    }
    gb[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix back = delta * layers_[l].W;  // B x width(l-1)
    const HiddenActivation act = activations_[l - 1];
    back.array() *= pre[l - 1].unaryExpr([act](double v) { return activate_derivative(act, v); }).array();
    delta = std::move(back);
  }
  Vector g(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (Eigen::Index i = 0; i < gW[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < gW[l].cols(); ++j) g[k++] = gW[l](i, j);
    }
    for (Eigen::Index i = 0; i < gb[l].size(); ++i) g[k++] = gb[l][i];
  }
  return g;
}

nlohmann::json to_json(const MlpNet& net) {
  using nlohmann::json;
  json layers = json::array();
  for (const auto& L : net.layers()) {
    json W = json::array();
    for (Eigen::Index i = 0; i < L.W.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < L.W.cols(); ++j) row.push_back(L.W(i, j));
      W.push_back(row);
    }
    json b = json::array();
    for (Eigen::Index i = 0; i < L.b.size(); ++i) b.push_back(L.b[i]);
    layers.push_back({{"W", W}, {"b", b}});
  }
  json acts = json::array();
  for (auto a : net.activations()) acts.push_back(to_string(a));
  return {{"type", "mlp"}, {"activations", acts}, {"layers", layers}};
}

MlpNet mlpnet_from_json(const nlohmann::json& j) {
  std::vector<DenseLayer> layers;
  for (const auto& L : j.at("layers")) {
    const auto& W = L.at("W");
    require(!W.empty(), "MLP JSON: empty weight matrix");
    Matrix M(static_cast<Eigen::Index>(W.size()), static_cast<Eigen::Index>(W[0].size()));
    for (std::size_t i = 0; i < W.size(); ++i) {
      require(W[i].size() == W[0].size(), "MLP JSON: ragged weight matrix");
      for (std::size_t c = 0; c < W[i].size(); ++c) {
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = W[i][c].get<double>();
      }
    }
    const auto& b = L.at("b");
    Vector bv(static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i) bv[static_cast<Eigen::Index>(i)] = b[i].get<double>();
    layers.push_back({std::move(M), std::move(bv)});
  }
  std::vector<HiddenActivation> acts;
  for (const auto& a : j.at("activations")) acts.push_back(parse_activation(a.get<std::string>()));
  return MlpNet(std::move(layers), std::move(acts));
}

}  // namespace geco
