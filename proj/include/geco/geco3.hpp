#pragma once

#include "geco/common.hpp"
#include "geco/data.hpp"
#include "geco/geco2.hpp"
#include "geco/linalg.hpp"
#include "geco/loss.hpp"
#include "geco/net.hpp"

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

namespace geco {

struct TensorConfig {
  double tau = 0.5;    // relative gap allowed in each singular-pair solve
  double delta = 0.1;  // failure probability per greedy step
  std::optional<std::size_t> restarts_override;
  std::uint64_t seed = 0;
  double inner_tol = 1e-6;
  int inner_max_iter = 500;

  void validate() const;
  // ceil(2 d ln(1/delta)) unless overridden.
  std::size_t restart_count(std::size_t d) const;
};

struct TensorResult {
  Vector w;
  Vector u;
  Vector v;
  double score = 0.0;  // F(w, u, v)
  std::size_t restart_index = 0;
  double tau_effective = 0.0;  // achieved relative residual of the winning solve
  SolveStatus status = SolveStatus::converged;
};

// F(w, u, v) = (1/m) sum_i c_i (w.x_i)(u.x_i)(v.x_i)
double tensor_score(const RowMatrix& X, const Vector& c, const VectorRef& w, const VectorRef& u, const VectorRef& v);

// Random restarts w_t; for each, the leading singular pair of
// A_t = (1/m) sum_i c_i (w_t.x_i) x_i x_i^T. Returns the best triple,
// ties going to the earliest restart.
TensorResult approx_tensor_max(const RowMatrix& X, const Vector& c, const TensorConfig& cfg);

// max over a grid of unit w (step in degrees; d = 2 or 3) of sigma_max(A_w),
// each from a dense eigendecomposition of the symmetric A_w. Since
// max_{u,v} F(w,u,v) = sigma_max(A_w), this is
// the best score on the grid.
double tensor_grid_max(const RowMatrix& X, const Vector& c, double step_degrees = 1.0);

struct TensorRatioReport {
  std::size_t d = 0;
  std::size_t m = 0;
  double tau = 0.0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_fraction = 0.0;
  double guarantee = 0.0;  // (1 - tau) / sqrt(2d)
  double min_ratio = 0.0;  // min over trials of score / grid max
  std::vector<double> ratios;
};

// Gaussian data and weights per trial; success when the returned score is at
// least (1 - tau)/sqrt(2d) times the grid maximum.
TensorRatioReport tensor_ratio_experiment(std::size_t d, std::size_t m, double tau, double delta, std::size_t trials,
                                          std::uint64_t seed, double step_degrees = 1.0);
nlohmann::json to_json(const TensorRatioReport& r);

// 4 d beta k^2 / (epsilon (1 - tau)^2)
double geco3_theorem_bound(std::size_t d, double beta, std::size_t k, double epsilon, double tau);

// Greedy steps over neurons of degree 1, 2 and 3.
TrainResult geco3_train(const Dataset& data, const LossFn& loss, const TrainConfig& cfg, const TensorConfig& tcfg);

}  // namespace geco
