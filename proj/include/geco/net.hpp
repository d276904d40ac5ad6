#pragma once

#include "geco/common.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace geco {

// A hidden neuron x -> prod_j <w_j, x> with unit-norm directions.
// Degree 2 neurons store a single direction used twice.
class BasisFunction {
 public:
  static BasisFunction linear(Vector w);
  static BasisFunction square(Vector w);
  static BasisFunction cubic(Vector w, Vector u, Vector v);
  // Generic constructor; normalizes every direction. For degree 2 the
  // directions must coincide (one or two identical vectors).
  static BasisFunction from_directions(int degree, std::vector<Vector> dirs);

  int degree() const { return degree_; }
  std::size_t dim() const { return dirs_.front().size(); }
  // Returns the `degree` factor directions (the degree-2 direction repeated).
  std::vector<Vector> directions() const;
  const Vector& direction(int j) const;

  double operator()(const VectorRef& x) const;
  // Evaluates the neuron on every row of X.
  Vector evaluate_rows(const RowMatrix& X) const;

 private:
  BasisFunction(int degree, std::vector<Vector> dirs) : degree_(degree), dirs_(std::move(dirs)) {}

  int degree_;
  std::vector<Vector> dirs_;  // 1 entry for degree 1 and 2, 3 for degree 3
};

struct Neuron {
  double alpha = 0.0;
  BasisFunction basis;
};

// f(x) = b + <w0, x> + sum_i alpha_i g_i(x)
class PolyNet {
 public:
  explicit PolyNet(std::size_t d) : direct_(Vector::Zero(static_cast<Eigen::Index>(d))) {}
  PolyNet(double bias, Vector direct, std::vector<Neuron> neurons);

  std::size_t dim() const { return static_cast<std::size_t>(direct_.size()); }
  double bias() const { return bias_; }
  const Vector& direct_term() const { return direct_; }
  const std::vector<Neuron>& neurons() const { return neurons_; }

  void set_bias(double b) { bias_ = b; }
  void set_direct_term(Vector w0);
  void add_neuron(double alpha, BasisFunction g);
  void set_alpha(std::size_t i, double a) { neurons_.at(i).alpha = a; }

  double evaluate(const VectorRef& x) const;
  Vector evaluate_rows(const RowMatrix& X) const;

  // Membership in P_{2,k}: degree-2 neurons only, |alpha| <= 1, at most k of them.
  bool in_p2k(std::size_t k) const;

 private:
  double bias_ = 0.0;
  Vector direct_;
  std::vector<Neuron> neurons_;
};

inline double evaluate(const PolyNet& net, const VectorRef& x) { return net.evaluate(x); }

nlohmann::json to_json(const PolyNet& net);
PolyNet polynet_from_json(const nlohmann::json& j);

}  // namespace geco
