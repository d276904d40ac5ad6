#include "geco/net.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace geco {

namespace {

Vector normalized(Vector w) {
  require(w.size() > 0, "basis direction must be non-empty");
  require(w.allFinite(), "basis direction must be finite");
  const double n = w.norm();
  require(n > 0.0, "basis direction must be nonzero");
  // Keep already-normalized vectors bit-identical so serialized models round-trip.
  if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) return w;
  return w / n;
}

}  // namespace

BasisFunction BasisFunction::linear(Vector w) { return BasisFunction(1, {normalized(std::move(w))}); }

BasisFunction BasisFunction::square(Vector w) { return BasisFunction(2, {normalized(std::move(w))}); }

BasisFunction BasisFunction::cubic(Vector w, Vector u, Vector v) {
  require(w.size() == u.size() && u.size() == v.size(), "cubic basis: direction dimensions differ");
  return BasisFunction(3, {normalized(std::move(w)), normalized(std::move(u)), normalized(std::move(v))});
}

BasisFunction BasisFunction::from_directions(int degree, std::vector<Vector> dirs) {
  switch (degree) {
    case 1:
      require(dirs.size() == 1, "degree-1 basis needs one direction");
      return linear(std::move(dirs[0]));
    case 2: {
      require(dirs.size() == 1 || dirs.size() == 2, "degree-2 basis needs one or two directions");
      if (dirs.size() == 2) {
        Vector a = normalized(dirs[0]);
        Vector b = normalized(dirs[1]);
        require(a.size() == b.size() && (a - b).norm() <= 1e-9,
                "degree-2 basis directions must coincide");
      }
      return square(std::move(dirs[0]));
    }
    case 3:
      require(dirs.size() == 3, "degree-3 basis needs three directions");
      return cubic(std::move(dirs[0]), std::move(dirs[1]), std::move(dirs[2]));
    default:
      throw std::invalid_argument("basis degree must be 1, 2 or 3, got " + std::to_string(degree));
  }
}

std::vector<Vector> BasisFunction::directions() const {
  if (degree_ == 2) return {dirs_[0], dirs_[0]};
  return dirs_;
}

const Vector& BasisFunction::direction(int j) const {
  if (degree_ == 2) return dirs_[0];
  return dirs_.at(static_cast<std::size_t>(j));
}

double BasisFunction::operator()(const VectorRef& x) const {
  require(x.size() == dirs_[0].size(), "basis evaluation: dimension mismatch");
  switch (degree_) {
    case 1:
      return dirs_[0].dot(x);
    case 2: {
      const double p = dirs_[0].dot(x);
      return p * p;
    }
    default:
      return dirs_[0].dot(x) * dirs_[1].dot(x) * dirs_[2].dot(x);
  }
}

Vector BasisFunction::evaluate_rows(const RowMatrix& X) const {
  require(X.cols() == dirs_[0].size(), "basis evaluation: dimension mismatch");
  Vector p = X * dirs_[0];
  switch (degree_) {
    case 1:
      return p;
    case 2:
      return p.array().square().matrix();
    default: {
      Vector q = X * dirs_[1];
      Vector r = X * dirs_[2];
      return (p.array() * q.array() * r.array()).matrix();
    }
  }
}

PolyNet::PolyNet(double bias, Vector direct, std::vector<Neuron> neurons)
    : bias_(bias), direct_(std::move(direct)), neurons_(std::move(neurons)) {
  for (const auto& n : neurons_) {
    require(n.basis.dim() == dim(), "PolyNet: neuron dimension differs from direct term");
  }
}

void PolyNet::set_direct_term(Vector w0) {
  require(w0.size() == direct_.size(), "PolyNet: direct term dimension mismatch");
  direct_ = std::move(w0);
}

void PolyNet::add_neuron(double alpha, BasisFunction g) {
  require(g.dim() == dim(), "PolyNet: neuron dimension mismatch");
  neurons_.push_back(Neuron{alpha, std::move(g)});
}

double PolyNet::evaluate(const VectorRef& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw std::invalid_argument("PolyNet::evaluate: expected dimension " + std::to_string(dim()) +
                                ", got " + std::to_string(x.size()));
  }
  CompensatedSum s;
  s.add(bias_);
  for (Eigen::Index j = 0; j < x.size(); ++j) s.add(direct_[j] * x[j]);
  for (const auto& n : neurons_) s.add(n.alpha * n.basis(x));
  return s.value();
}

Vector PolyNet::evaluate_rows(const RowMatrix& X) const {
  require(static_cast<std::size_t>(X.cols()) == dim(), "PolyNet::evaluate_rows: dimension mismatch");
  Vector out = (X * direct_).array() + bias_;
  for (const auto& n : neurons_) out += n.alpha * n.basis.evaluate_rows(X);
  return out;
}

bool PolyNet::in_p2k(std::size_t k) const {
  if (neurons_.size() > k) return false;
  for (const auto& n : neurons_) {
    if (n.basis.degree() != 2 || std::abs(n.alpha) > 1.0) return false;
  }
  return true;
}

nlohmann::json to_json(const PolyNet& net) {
  using nlohmann::json;
  auto vec = [](const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
  };
  json neurons = json::array();
  for (const auto& n : net.neurons()) {
    json dirs = json::array();
    for (const auto& w : n.basis.directions()) dirs.push_back(vec(w));
    neurons.push_back({{"alpha", n.alpha}, {"degree", n.basis.degree()}, {"directions", dirs}});
  }
  return {{"d", net.dim()},
          {"bias", net.bias()},
          {"direct_term", vec(net.direct_term())},
          {"neurons", neurons}};
}

PolyNet polynet_from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) {
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
  };
  const auto d = j.at("d").get<std::size_t>();
  Vector w0 = vec(j.at("direct_term"));
  require(static_cast<std::size_t>(w0.size()) == d, "model JSON: direct_term length differs from d");
  std::vector<Neuron> neurons;
  for (const auto& n : j.at("neurons")) {
    std::vector<Vector> dirs;
    for (const auto& w : n.at("directions")) dirs.push_back(vec(w));
    neurons.push_back(Neuron{n.at("alpha").get<double>(),
                             BasisFunction::from_directions(n.at("degree").get<int>(), std::move(dirs))});
  }
  return PolyNet(j.at("bias").get<double>(), std::move(w0), std::move(neurons));
}

}  // namespace geco
