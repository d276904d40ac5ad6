#include "geco/geco3.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace geco {

namespace {

constexpr double kStationary = 1e-12;

Vector random_unit(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector w(static_cast<Eigen::Index>(d));
  double n = 0.0;
  while (n == 0.0) {
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = normal(rng);
    n = w.norm();
  }
  return w / n;
}

// A_w = (1/m) sum_i c_i (w.x_i) x_i x_i^T, symmetric, applied to blocks.
LinearOperator slice_operator(const RowMatrix& X, const Vector& weights) {
  const double inv_m = 1.0 / static_cast<double>(X.rows());
  auto apply = [&X, weights, inv_m](const Matrix& V) -> Matrix {
    Matrix P = X * V;
    P.array().colwise() *= weights.array();
    return inv_m * (X.transpose() * P);
  };
  const auto d = static_cast<std::size_t>(X.cols());
  return LinearOperator{d, d, apply, apply};
}

}  // namespace

void TensorConfig::validate() const {
  require(tau > 0.0 && tau < 1.0, "tensor config: tau must lie in (0, 1)");
  require(delta > 0.0 && delta < 1.0, "tensor config: delta must lie in (0, 1)");
  require(!restarts_override || *restarts_override >= 1, "tensor config: restarts must be at least 1");
  require(inner_tol > 0.0 && inner_max_iter >= 1, "tensor config: inner solver settings must be positive");
}

std::size_t TensorConfig::restart_count(std::size_t d) const {
  if (restarts_override) return *restarts_override;
  const double s = std::ceil(2.0 * static_cast<double>(d) * std::log(1.0 / delta));
  return std::max<std::size_t>(1, static_cast<std::size_t>(s));
}

double tensor_score(const RowMatrix& X, const Vector& c, const VectorRef& w, const VectorRef& u, const VectorRef& v) {
  require(X.rows() == c.size(), "tensor_score: weight count must equal example count");
  require(X.cols() == w.size() && X.cols() == u.size() && X.cols() == v.size(), "tensor_score: dimension mismatch");
  const Vector pw = X * w;
  const Vector pu = X * u;
  const Vector pv = X * v;
  CompensatedSum s;
  for (Eigen::Index i = 0; i < X.rows(); ++i) s.add(c[i] * pw[i] * pu[i] * pv[i]);
  return s.value() / static_cast<double>(X.rows());
}

TensorResult approx_tensor_max(const RowMatrix& X, const Vector& c, const TensorConfig& cfg) {
  cfg.validate();
  require(X.rows() >= 1 && X.cols() >= 1, "approx_tensor_max: empty data");
  require(X.rows() == c.size(), "approx_tensor_max: weight count must equal example count");
  require(c.allFinite(), "approx_tensor_max: weights must be finite");
  const auto d = static_cast<std::size_t>(X.cols());

  TensorResult best;
  if (c.lpNorm<Eigen::Infinity>() == 0.0) {
    best.w = random_unit(d, derive_seed(cfg.seed, 0));
    best.u = best.w;
    best.v = best.w;
    best.status = SolveStatus::degenerate;
    return best;
  }

  const std::size_t s = cfg.restart_count(d);
  bool have = false;
  for (std::size_t t = 0; t < s; ++t) {
    const std::uint64_t stream = derive_seed(cfg.seed, t);
    Vector w = random_unit(d, stream);
    const Vector proj = X * w;
    const Vector weights = c.cwiseProduct(proj);
    const SingularResult sv =
        top_singular_pair(slice_operator(X, weights), {cfg.inner_tol, cfg.inner_max_iter, derive_seed(stream, 1), 2});
    Vector u = sv.u;
    Vector v = sv.v;
    if (sv.status == SolveStatus::degenerate) {
      // A_t vanishes: every (u, v) scores zero for this start.
      u = w;
      v = w;
    }
    const double score = tensor_score(X, c, w, u, v);
    if (!have || score > best.score) {
      have = true;
      best.w = std::move(w);
      best.u = std::move(u);
      best.v = std::move(v);
      best.score = score;
      best.restart_index = t;
      best.tau_effective = sv.tau_effective;
      best.status = sv.status;
    }
  }
  return best;
}

namespace {

// A_w = sum_k w_k S_k with S_k = (1/m) sum_i c_i x_ik x_i x_i^T.
std::vector<Matrix> tensor_slices(const RowMatrix& X, const Vector& c) {
  std::vector<Matrix> slices;
  for (Eigen::Index k = 0; k < X.cols(); ++k) {
    const Vector weights = c.cwiseProduct(X.col(k));
    slices.push_back((X.transpose() * weights.asDiagonal() * X) / static_cast<double>(X.rows()));
  }
  return slices;
}

double slice_sigma(const std::vector<Matrix>& slices, const Vector& w) {
  Matrix A = Matrix::Zero(slices[0].rows(), slices[0].cols());
  for (std::size_t k = 0; k < slices.size(); ++k) A += w[static_cast<Eigen::Index>(k)] * slices[k];
  // A is symmetric, so its largest singular value is its largest |eigenvalue|.
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double tensor_grid_max(const RowMatrix& X, const Vector& c, double step_degrees) {
  require(X.cols() == 2 || X.cols() == 3, "tensor_grid_max: only d = 2 or 3");
  require(X.rows() == c.size(), "tensor_grid_max: weight count must equal example count");
  require(step_degrees > 0.0 && step_degrees <= 90.0, "tensor_grid_max: step must lie in (0, 90] degrees");
  const double step = step_degrees * std::numbers::pi / 180.0;
  // sigma_max(A_{-w}) = sigma_max(A_w), so half of each circle suffices.
  const auto n_phi = static_cast<int>(std::ceil(180.0 / step_degrees));
  const std::vector<Matrix> slices = tensor_slices(X, c);
  double best = 0.0;
  if (X.cols() == 2) {
    for (int i = 0; i < n_phi; ++i) {
      const double phi = i * step;
      best = std::max(best, slice_sigma(slices, Vector{{std::cos(phi), std::sin(phi)}}));
    }
    return best;
  }
  const auto n_theta = static_cast<int>(std::ceil(180.0 / step_degrees));
  for (int j = 0; j <= n_theta; ++j) {
    const double theta = std::min(j * step, std::numbers::pi);
    const int n_az = (j == 0 || j == n_theta) ? 1 : 2 * n_phi;
    for (int i = 0; i < n_az; ++i) {
      const double phi = i * step;
      const Vector w{{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)}};
      best = std::max(best, slice_sigma(slices, w));
    }
  }
  return best;
}

TensorRatioReport tensor_ratio_experiment(std::size_t d, std::size_t m, double tau, double delta, std::size_t trials,
                                          std::uint64_t seed, double step_degrees) {
  require(trials >= 1 && m >= 1, "tensor ratio: need at least one trial and one example");
  TensorRatioReport rep;
  rep.d = d;
  rep.m = m;
  rep.tau = tau;
  rep.delta = delta;
  rep.trials = trials;
  rep.guarantee = (1.0 - tau) / std::sqrt(2.0 * static_cast<double>(d));
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trials; ++k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    std::normal_distribution<double> normal(0.0, 1.0);
    RowMatrix X(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    Vector c(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = normal(rng);
      c[i] = normal(rng);
    }
    TensorConfig cfg;
    cfg.tau = tau;
    cfg.delta = delta;
    cfg.seed = rng();
    const TensorResult res = approx_tensor_max(X, c, cfg);
    const double oracle = tensor_grid_max(X, c, step_degrees);
    const double ratio = oracle > 0.0 ? res.score / oracle : 1.0;
    rep.ratios.push_back(ratio);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    if (ratio >= rep.guarantee) ++rep.successes;
  }
  rep.success_fraction = static_cast<double>(rep.successes) / static_cast<double>(trials);
  return rep;
}

nlohmann::json to_json(const TensorRatioReport& r) {
  return {{"d", r.d},
          {"m", r.m},
          {"tau", r.tau},
          {"delta", r.delta},
          {"trials", r.trials},
          {"successes", r.successes},
          {"success_fraction", r.success_fraction},
          {"guarantee", r.guarantee},
          {"min_ratio", r.min_ratio},
          {"ratios", r.ratios}};
}

double geco3_theorem_bound(std::size_t d, double beta, std::size_t k, double epsilon, double tau) {
  require(d >= 1, "theorem bound: d must be positive");
  require(beta > 0.0 && epsilon > 0.0, "theorem bound: beta and epsilon must be positive");
  require(tau > 0.0 && tau < 1.0, "theorem bound: tau must lie in (0, 1)");
  const double kk = static_cast<double>(k);
  const double gap = 1.0 - tau;
  return 4.0 * static_cast<double>(d) * beta * kk * kk / (epsilon * gap * gap);
}

TrainResult geco3_train(const Dataset& data, const LossFn& loss, const TrainConfig& cfg, const TensorConfig& tcfg) {
  cfg.validate();
  tcfg.validate();
  require(data.size() > 0 && data.dim() > 0, "geco3_train: empty dataset");
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  TrainTrace trace;
  trace.theorem_bound = geco3_theorem_bound(data.dim(), loss.beta(), cfg.k, cfg.epsilon, tcfg.tau);
  trace.theorem_iterations = iterations_exceeding(trace.theorem_bound);

  OutputLayerFit fit(data, loss, cfg.refit_tol, cfg.refit_max_iter);
  std::vector<BasisFunction> neurons;
  {
    TraceRecord rec;
    rec.risk = fit.refit();
    rec.refit_degraded = fit.degraded();
    rec.seconds = elapsed();
    trace.records.push_back(rec);
  }

  const double inv_m = 1.0 / static_cast<double>(data.size());
  for (std::size_t t = 1; t <= cfg.r; ++t) {
    const Vector c = risk_gradient_weights(fit.predictions(), data.y, loss);
    if (c.lpNorm<Eigen::Infinity>() <= kStationary) {
      trace.stopped_early = true;
      break;
    }

    // Degree 1: maximize |(1/m) sum c_i w.x_i| over unit w.
    const Vector mean = inv_m * (data.X.transpose() * c);
    double best_score = mean.norm();
    int best_degree = 1;
    SolveStatus best_status = SolveStatus::converged;
    std::optional<BasisFunction> best;
    if (best_score > 0.0) best = BasisFunction::linear(mean);

    const SymmetricOperator M = weighted_gram(data.X, c);
    const EigenResult eig = dominant_eigenpair(M, {cfg.eigen_tol, cfg.eigen_max_iter, derive_seed(cfg.seed, t), 2});
    if (eig.status != SolveStatus::degenerate && std::abs(eig.value) > best_score) {
      best_score = std::abs(eig.value);
      best_degree = 2;
      best_status = eig.status;
      best = BasisFunction::square(eig.vector);
    }

    TensorConfig step_cfg = tcfg;
    step_cfg.seed = derive_seed(tcfg.seed, t);
    const TensorResult tr = approx_tensor_max(data.X, c, step_cfg);
    if (tr.status != SolveStatus::degenerate && std::abs(tr.score) > best_score) {
      best_score = std::abs(tr.score);
      best_degree = 3;
      best_status = tr.status;
      best = BasisFunction::cubic(tr.w, tr.u, tr.v);
    }

    if (!best || best_score <= kStationary) {
      trace.stopped_early = true;
      break;
    }
    fit.add_feature(best->evaluate_rows(data.X));
    neurons.push_back(std::move(*best));

    TraceRecord rec;
    rec.iteration = t;
    rec.risk = fit.refit();
    rec.refit_degraded = fit.degraded();
    rec.eig_abs = best_score;
    rec.degree = best_degree;
    rec.step_status = best_status;
    rec.seconds = elapsed();
    trace.records.push_back(rec);
  }
  return {assemble_net(data, neurons, fit.coefficients()), std::move(trace)};
}

}  // namespace geco
