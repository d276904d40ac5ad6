#pragma once

#include "geco/common.hpp"
#include "geco/gadget.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace geco {

double sigmoid(double z);

// Smallest integer at least log2(2L^4 + (4L/eps + 3)^(7L)) + 2 log2(8/eps).
std::uint64_t lemma_degree(double epsilon, double L);

// p(x) = sum_j coefficients[j] x^j approximating the sigmoid on |x| <= 4L.
struct SigmoidApprox {
  double L = 3.0;
  double epsilon = 0.1;
  int degree = 0;
  std::vector<double> coefficients;  // a_0 .. a_degree
  double grid_error = 0.0;           // sup |p - sigmoid| over the check grid
  int interpolation_degree = 0;      // degree of the Chebyshev interpolant it was trimmed from

  double operator()(double x) const;
  nlohmann::json to_json() const;
  static SigmoidApprox from_json(const nlohmann::json& j);
};

inline constexpr std::size_t kSigmoidGridPoints = 10'000;

// sup over `points` equispaced x in [-4L, 4L] of |p(x) - sigmoid(x)|.
double sigmoid_grid_error(const std::vector<double>& coefficients, double L, std::size_t points = kSigmoidGridPoints);

// Chebyshev interpolation of x -> sigmoid(4L x) on [-1, 1] at degree
// max(lemma_degree, override), truncated to the lowest degree whose
// monomial form passes the grid check, then rescaled to p(x) = p0(x / 4L).
SigmoidApprox fit_sigmoid_poly(double epsilon, double L, std::optional<int> degree_override = std::nullopt);

struct BoundReport {
  int t = 1;
  double L = 3.0;
  double epsilon = 0.1;
  double T_exact = 0.0;
  double B_t_exact = 0.0;  // evaluated at the integer T
  double B_n_exact = 0.0;
  std::uint64_t T = 0;
  std::uint64_t B_t = 0;
  std::uint64_t B_n = 0;
  // The scales in the soft-O statement: log2(tL + L log2(1/eps)) and tL + L log2(1/eps).
  double depth_scale = 0.0;
  double size_scale = 0.0;

  nlohmann::json to_json() const;
};

// T = log2(2L^4 + ((4L)^t/eps + 3)^(7L)) + 2 log2(8 (4L)^(t-1) / eps),
// B_t = 1 + log2 T + log2 log2 T, B_n = 1 + 2T(2 log2 T + log2 T log2 log2 T).
BoundReport theorem4_bounds(int t, double L, double epsilon);

// f(x) = output_bias + sum_j v_j sigmoid(w_j . x + b_j)
struct SigmoidNet {
  Matrix W;  // n x d
  Vector b;
  Vector v;
  double output_bias = 0.0;

  double evaluate(const VectorRef& x) const;
};

struct CompressionReport {
  double epsilon = 0.0;
  double unit_epsilon = 0.0;  // accuracy demanded of p: epsilon / max(1, ||v||_1)
  int poly_degree = 0;
  std::size_t neurons = 0;
  std::size_t depth = 0;
  double sup_gap = 0.0;  // over the random check points
  std::size_t check_points = 0;
  bool within_epsilon = false;

  nlohmann::json to_json() const;
};

struct CompressionResult {
  GadgetNet net;
  CompressionReport report;
};

inline constexpr std::size_t kDefaultGadgetBudget = 200'000;

// Replaces every sigmoid unit by the polynomial gadget of p applied to its
// pre-activation and checks |f - g| on random points with |x_i| < 1.
CompressionResult compress_sigmoid_net(const SigmoidNet& f, double L, double epsilon, std::uint64_t seed = 0,
                                       std::size_t check_points = 10'000,
                                       std::size_t neuron_budget = kDefaultGadgetBudget);

}  // namespace geco
