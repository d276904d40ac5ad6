#pragma once

#include "geco/common.hpp"
#include "geco/data.hpp"
#include "geco/linalg.hpp"
#include "geco/loss.hpp"
#include "geco/net.hpp"

#include <cstdint>
#include <vector>

namespace geco {

struct TrainConfig {
  std::size_t r = 40;     // greedy iterations
  std::size_t k = 1;      // comparator budget, only used to report the theorem bound
  double epsilon = 0.05;  // target excess risk, likewise
  double eigen_tol = 1e-8;
  int eigen_max_iter = 1000;
  double refit_tol = 1e-6;
  int refit_max_iter = 5000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TraceRecord {
  std::size_t iteration = 0;
  double risk = 0.0;     // empirical risk after the refit
  double eig_abs = 0.0;  // |first-order score| of the greedy step (0 for the affine start)
  double seconds = 0.0;  // wall clock since training started
  int degree = 0;        // degree of the neuron added at this iteration (0 for the affine start)
  bool refit_degraded = false;
  SolveStatus step_status = SolveStatus::converged;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  double theorem_bound = 0.0;            // the iteration count the theorem requires r to exceed
  std::size_t theorem_iterations = 0;    // smallest integer r above theorem_bound
  bool stopped_early = false;            // first-order stationarity reached before r steps
};

struct TrainResult {
  PolyNet net;
  TrainTrace trace;
};

// 2 beta k^2 / epsilon
double geco2_theorem_bound(double beta, std::size_t k, double epsilon);
// Smallest integer strictly greater than `bound`; bounds within 1e-9 of an
// integer are taken to be that integer.
std::size_t iterations_exceeding(double bound);

struct RefitResult {
  Vector alpha;
  double bias = 0.0;
  Vector direct_term;
  double risk = 0.0;
  bool degraded = false;
};

// Convex re-minimization of the output layer [1, x, g_1(x), ..., g_j(x)].
// Squared loss: normal equations with 1e-10 Tikhonov jitter. Logistic:
// gradient descent with backtracking until the gradient norm is <= tol.
RefitResult refit_output_weights(const std::vector<BasisFunction>& neurons, const Dataset& data, const LossFn& loss,
                                 double tol = 1e-6, int max_iter = 5000);

// Incremental form of the refit used by the trainers: keeps the design
// matrix, its Gram matrix and the current coefficients between greedy steps.
// Each refit warm-starts from the previous coefficients (new one at 0) and
// never returns a higher risk than they achieve.
class OutputLayerFit {
 public:
  OutputLayerFit(const Dataset& data, const LossFn& loss, double tol, int max_iter);

  void add_feature(const Vector& column);
  // Returns the achieved risk.
  double refit();

  std::size_t feature_count() const { return static_cast<std::size_t>(design_.cols()); }
  const Vector& coefficients() const { return theta_; }
  const Vector& predictions() const { return pred_; }
  double risk() const { return risk_; }
  bool degraded() const { return degraded_; }

 private:
  double refit_squared();
  double refit_logistic();

  const Dataset& data_;
  LossFn loss_;
  double tol_;
  int max_iter_;
  Matrix design_;  // m x p
  Matrix gram_;    // (1/m) Phi^T Phi
  Vector moment_;  // (1/m) Phi^T y
  Vector theta_;
  Vector pred_;
  double risk_ = 0.0;
  bool degraded_ = false;
};

// Builds the net from an OutputLayerFit coefficient vector [b, w0, alpha].
PolyNet assemble_net(const Dataset& data, const std::vector<BasisFunction>& neurons, const Vector& theta);

TrainResult geco2_train(const Dataset& data, const LossFn& loss, const TrainConfig& cfg);

}  // namespace geco
