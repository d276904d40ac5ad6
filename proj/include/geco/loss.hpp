#pragma once

#include "geco/common.hpp"
#include "geco/net.hpp"

#include <string>

namespace geco {

struct Dataset;

enum class LossKind { squared, logistic };

// Smooth convex loss l(p, y) with derivative in p and smoothness constant beta.
//   squared:  l = (p - y)^2 / 2,      beta = 1
//   logistic: l = log(1 + exp(-y p)), beta = 1/4, y in {-1, +1}
class LossFn {
 public:
  explicit LossFn(LossKind kind) : kind_(kind) {}
  static LossFn squared() { return LossFn(LossKind::squared); }
  static LossFn logistic() { return LossFn(LossKind::logistic); }
  static LossFn parse(const std::string& name);

  LossKind kind() const { return kind_; }
  std::string name() const;
  double beta() const { return kind_ == LossKind::squared ? 1.0 : 0.25; }

  double value(double p, double y) const;
  double derivative(double p, double y) const;

 private:
  LossKind kind_;
};

double empirical_risk(const Vector& predictions, const Vector& labels, const LossFn& loss);
double empirical_risk(const PolyNet& net, const Dataset& data, const LossFn& loss);

// l'(f(x_i), y_i) for every example.
Vector risk_gradient_weights(const Vector& predictions, const Vector& labels, const LossFn& loss);
Vector risk_gradient_weights(const PolyNet& net, const Dataset& data, const LossFn& loss);

}  // namespace geco
