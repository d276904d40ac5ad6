#pragma once

#include "geco/common.hpp"
#include "geco/data.hpp"
#include "geco/loss.hpp"
#include "geco/mlp.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace geco {

// Mini-batch SGD with Nesterov momentum. The step size at iteration t
// (1-based) is lr / (1 + decay * (t - 1)).
struct SgdConfig {
  double lr = 0.01;
  double decay = 0.0;
  std::size_t batch = 32;
  double momentum = 0.9;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  double init_scale = 1.0;  // used by callers that build the initial net
  std::size_t eval_every = 100;

  void validate() const;
};

struct SgdPoint {
  std::size_t iteration = 0;
  double error = 0.0;
};

struct SgdResult {
  MlpNet net;
  std::vector<SgdPoint> trace;
  std::string error_kind;  // "classification_error" or "mean_loss"
};

// Classification error for binary labels, mean loss otherwise.
double evaluation_error(const MlpNet& net, const Dataset& data, const LossFn& loss);
std::string error_kind(const Dataset& data);

// Trains on `train`; the trace reports the error on `eval` (train when null)
// every eval_every iterations and after the last one.
SgdResult sgd_train(MlpNet net, const Dataset& train, const LossFn& loss, const SgdConfig& cfg,
                    const Dataset* eval = nullptr);

// --- linearization oracle ---

using Exponents = std::vector<int>;

// All monomials in d variables of total degree <= degree, graded
// lexicographic: by degree, then x1 before x2 before ...
std::vector<Exponents> graded_lex_monomials(std::size_t d, int degree);
// binomial(d + degree, degree), saturating at SIZE_MAX.
std::size_t monomial_count(std::size_t d, int degree);
RowMatrix monomial_features(const RowMatrix& X, const std::vector<Exponents>& monomials);
std::string monomial_name(const Exponents& e);

struct LinearizationResult {
  std::vector<Exponents> monomials;
  Vector coefficients;
  double risk = 0.0;

  double coefficient(const Exponents& e) const;
  Vector predict(const RowMatrix& X) const;
  nlohmann::json to_json() const;
};

inline constexpr std::size_t kMaxLinearizationFeatures = 2'000'000;

LinearizationResult linearization_train(const Dataset& data, const LossFn& loss, int degree,
                                        std::size_t max_features = kMaxLinearizationFeatures);

// --- over-specification ---

struct OverspecReport {
  std::size_t rank = 0;
  double risk = 0.0;
  bool rank_deficient = false;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
};

// Random hidden weights V (n_hidden x d, Gaussian), Z = act(V X), random
// Gaussian targets, squared-loss output weights by pseudo-inverse.
OverspecReport overspec_experiment(std::size_t d, std::size_t m, std::size_t n_hidden, HiddenActivation activation,
                                   std::uint64_t seed);
// Same with given features (rows are examples) and targets.
OverspecReport overspec_solve(const Matrix& Z, const Vector& y);

struct OverspecSweepConfig {
  std::size_t d = 150;
  std::size_t teacher_width = 60;
  std::vector<std::size_t> factors{1, 2, 4, 8};
  std::size_t m_train = 4000;
  std::size_t m_test = 1000;
  std::vector<std::uint64_t> seeds{0};
  double threshold_factor = 1.5;  // relative to the widest student's final error
  SgdConfig sgd;
};

struct OverspecSweepRun {
  std::uint64_t seed = 0;
  std::vector<std::vector<SgdPoint>> traces;  // one per factor
  std::vector<std::size_t> iterations_to_threshold;
  double threshold = 0.0;
};

struct OverspecSweepResult {
  std::vector<std::size_t> factors;
  std::vector<std::size_t> widths;
  std::vector<OverspecSweepRun> runs;
  std::vector<double> median_iterations;  // per factor
  std::string error_kind;
};

// Iterations not reaching the threshold count as this value.
inline constexpr std::size_t kNeverReached = std::numeric_limits<std::size_t>::max();

OverspecSweepResult overspec_sweep(const OverspecSweepConfig& cfg);

}  // namespace geco
