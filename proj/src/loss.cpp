#include "geco/loss.hpp"

#include "geco/data.hpp"

#include <cmath>

namespace geco {

namespace {
// Beyond this margin log1p(exp(-z)) and the sigmoid are replaced by their
// asymptotes; the error is below 1e-15.
constexpr double kLogisticCutoff = 35.0;
}  // namespace

LossFn LossFn::parse(const std::string& name) {
  if (name == "squared") return squared();
  if (name == "logistic") return logistic();
  throw std::invalid_argument("unknown loss '" + name + "' (expected squared or logistic)");
}

std::string LossFn::name() const { return kind_ == LossKind::squared ? "squared" : "logistic"; }

double LossFn::value(double p, double y) const {
  if (kind_ == LossKind::squared) {
    const double r = p - y;
    return 0.5 * r * r;
  }
  const double z = y * p;
  if (z > kLogisticCutoff) return std::exp(-z);
  if (z < -kLogisticCutoff) return -z;
  return std::log1p(std::exp(-z));
}

double LossFn::derivative(double p, double y) const {
  if (kind_ == LossKind::squared) return p - y;
  const double z = y * p;
  if (z > kLogisticCutoff) return -y * std::exp(-z);
  if (z < -kLogisticCutoff) return -y;
  return -y / (1.0 + std::exp(z));
}

double empirical_risk(const Vector& predictions, const Vector& labels, const LossFn& loss) {
  require(predictions.size() == labels.size(), "empirical_risk: prediction/label count mismatch");
  require(labels.size() > 0, "empirical_risk: empty dataset");
  CompensatedSum s;
  for (Eigen::Index i = 0; i < labels.size(); ++i) s.add(loss.value(predictions[i], labels[i]));
  return s.value() / static_cast<double>(labels.size());
}

double empirical_risk(const PolyNet& net, const Dataset& data, const LossFn& loss) {
  require(data.size() > 0, "empirical_risk: empty dataset");
  return empirical_risk(net.evaluate_rows(data.X), data.y, loss);
}

Vector risk_gradient_weights(const Vector& predictions, const Vector& labels, const LossFn& loss) {
  require(predictions.size() == labels.size(), "risk_gradient_weights: prediction/label count mismatch");
  require(labels.size() > 0, "risk_gradient_weights: empty dataset");
  Vector c(labels.size());
  for (Eigen::Index i = 0; i < labels.size(); ++i) c[i] = loss.derivative(predictions[i], labels[i]);
  return c;
}

Vector risk_gradient_weights(const PolyNet& net, const Dataset& data, const LossFn& loss) {
  return risk_gradient_weights(net.evaluate_rows(data.X), data.y, loss);
}

}  // namespace geco
