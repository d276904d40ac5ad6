#include "geco/geco2.hpp"

#include <chrono>
#include <cmath>

namespace geco {

namespace {

constexpr double kJitter = 1e-10;
// Below this the gradient weights or the greedy score vanish: no basis
// function can decrease the first-order approximation of the risk.
constexpr double kStationary = 1e-12;

}  // namespace

void TrainConfig::validate() const {
  require(r >= 1, "train config: r must be at least 1");
  require(k >= 1, "train config: k must be at least 1");
  require(epsilon > 0.0, "train config: epsilon must be positive");
  require(eigen_tol > 0.0 && refit_tol > 0.0, "train config: tolerances must be positive");
  require(eigen_max_iter >= 1 && refit_max_iter >= 1, "train config: iteration caps must be positive");
}

double geco2_theorem_bound(double beta, std::size_t k, double epsilon) {
  require(beta > 0.0 && epsilon > 0.0, "theorem bound: beta and epsilon must be positive");
  const double kk = static_cast<double>(k);
  return 2.0 * beta * kk * kk / epsilon;
}

std::size_t iterations_exceeding(double bound) {
  require(std::isfinite(bound) && bound >= 0.0, "iterations_exceeding: bound must be finite and non-negative");
  const double nearest = std::round(bound);
  const double b = std::abs(bound - nearest) <= 1e-9 * std::max(1.0, bound) ? nearest : std::floor(bound);
  return static_cast<std::size_t>(b) + 1;
}

// ---------------------------------------------------------------------------

OutputLayerFit::OutputLayerFit(const Dataset& data, const LossFn& loss, double tol, int max_iter)
    : data_(data), loss_(loss), tol_(tol), max_iter_(max_iter) {
  require(data.size() > 0, "refit: empty dataset");
  const auto m = static_cast<Eigen::Index>(data.size());
  design_.resize(m, 0);
  gram_.resize(0, 0);
  moment_.resize(0);
  theta_.resize(0);
  pred_ = Vector::Zero(m);
  add_feature(Vector::Ones(m));
  for (Eigen::Index j = 0; j < data.X.cols(); ++j) add_feature(data.X.col(j));
  risk_ = empirical_risk(pred_, data_.y, loss_);
}

void OutputLayerFit::add_feature(const Vector& column) {
  require(column.size() == design_.rows(), "refit: feature length differs from example count");
  require(column.allFinite(), "refit: feature evaluations must be finite");
  const Eigen::Index p = design_.cols();
  const double inv_m = 1.0 / static_cast<double>(design_.rows());
  design_.conservativeResize(Eigen::NoChange, p + 1);
  design_.col(p) = column;
  const Vector cross = inv_m * (design_.transpose() * column);  // includes the new diagonal entry
  gram_.conservativeResize(p + 1, p + 1);
  gram_.row(p) = cross.transpose();
  gram_.col(p) = cross;
  moment_.conservativeResize(p + 1);
  moment_[p] = inv_m * column.dot(data_.y);
  theta_.conservativeResize(p + 1);
  theta_[p] = 0.0;
}

double OutputLayerFit::refit() {
  degraded_ = false;
  return loss_.kind() == LossKind::squared ? refit_squared() : refit_logistic();
}

double OutputLayerFit::refit_squared() {
  const Eigen::Index p = design_.cols();
  const Matrix A = gram_ + kJitter * Matrix::Identity(p, p);
  Eigen::LDLT<Matrix> ldlt(A);
  if (ldlt.info() != Eigen::Success) {
    degraded_ = true;
    return risk_;
  }
  Vector theta = ldlt.solve(moment_);
  theta += ldlt.solve(moment_ - A * theta);  // one step of iterative refinement
  if (!theta.allFinite()) {
    degraded_ = true;
    return risk_;
  }
  Vector pred = design_ * theta;
  const double risk = empirical_risk(pred, data_.y, loss_);
  // The warm start (previous coefficients, new one at 0) is always feasible
  // and pred_/risk_ still describe it; keep it if the jittered solve is worse.
  if (risk <= risk_) {
    theta_ = std::move(theta);
    pred_ = std::move(pred);
    risk_ = risk;
  }
  return risk_;
}

double OutputLayerFit::refit_logistic() {
  const double inv_m = 1.0 / static_cast<double>(design_.rows());
  Vector theta = theta_;
  Vector pred = design_ * theta;
  double risk = empirical_risk(pred, data_.y, loss_);
  double step = 1.0;
  bool converged = false;
  for (int it = 0; it < max_iter_; ++it) {
    const Vector c = risk_gradient_weights(pred, data_.y, loss_);
    const Vector grad = inv_m * (design_.transpose() * c);
    const double gn2 = grad.squaredNorm();
    if (std::sqrt(gn2) <= tol_) {
      converged = true;
      break;
    }
    step *= 2.0;
    bool accepted = false;
    while (step > 1e-20) {
      Vector cand = theta - step * grad;
      Vector cand_pred = design_ * cand;
      const double cand_risk = empirical_risk(cand_pred, data_.y, loss_);
      if (cand_risk <= risk - 0.5 * step * gn2) {
        theta = std::move(cand);
        pred = std::move(cand_pred);
        risk = cand_risk;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  degraded_ = !converged;
  theta_ = std::move(theta);
  pred_ = std::move(pred);
  risk_ = risk;
  return risk_;
}

RefitResult refit_output_weights(const std::vector<BasisFunction>& neurons, const Dataset& data, const LossFn& loss,
                                 double tol, int max_iter) {
  OutputLayerFit fit(data, loss, tol, max_iter);
  for (const auto& g : neurons) fit.add_feature(g.evaluate_rows(data.X));
  RefitResult out;
  out.risk = fit.refit();
  out.degraded = fit.degraded();
  const Vector& th = fit.coefficients();
  const auto d = static_cast<Eigen::Index>(data.dim());
  out.bias = th[0];
  out.direct_term = th.segment(1, d);
  out.alpha = th.tail(static_cast<Eigen::Index>(neurons.size()));
  return out;
}

// ---------------------------------------------------------------------------

PolyNet assemble_net(const Dataset& data, const std::vector<BasisFunction>& neurons, const Vector& theta) {
  const auto d = static_cast<Eigen::Index>(data.dim());
  PolyNet net(data.dim());
  net.set_bias(theta[0]);
  net.set_direct_term(theta.segment(1, d));
  for (std::size_t i = 0; i < neurons.size(); ++i) {
    net.add_neuron(theta[1 + d + static_cast<Eigen::Index>(i)], neurons[i]);
  }
  return net;
}

TrainResult geco2_train(const Dataset& data, const LossFn& loss, const TrainConfig& cfg) {
  cfg.validate();
  require(data.size() > 0 && data.dim() > 0, "geco2_train: empty dataset");
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  TrainTrace trace;
  trace.theorem_bound = geco2_theorem_bound(loss.beta(), cfg.k, cfg.epsilon);
  trace.theorem_iterations = iterations_exceeding(trace.theorem_bound);

  OutputLayerFit fit(data, loss, cfg.refit_tol, cfg.refit_max_iter);
  std::vector<BasisFunction> neurons;
  // Start from the best affine function.
  {
    TraceRecord rec;
    rec.risk = fit.refit();
    rec.refit_degraded = fit.degraded();
    rec.seconds = elapsed();
    trace.records.push_back(rec);
  }

  for (std::size_t t = 1; t <= cfg.r; ++t) {
    const Vector c = risk_gradient_weights(fit.predictions(), data.y, loss);
    if (c.lpNorm<Eigen::Infinity>() <= kStationary) {
      trace.stopped_early = true;
      break;
    }
    const SymmetricOperator M = weighted_gram(data.X, c);
    const EigenResult eig = dominant_eigenpair(M, {cfg.eigen_tol, cfg.eigen_max_iter, derive_seed(cfg.seed, t), 2});
    if (eig.status == SolveStatus::degenerate || std::abs(eig.value) <= kStationary) {
      trace.stopped_early = true;
      break;
    }
    BasisFunction g = BasisFunction::square(eig.vector);
    fit.add_feature(g.evaluate_rows(data.X));
    neurons.push_back(std::move(g));

    TraceRecord rec;
    rec.iteration = t;
    rec.risk = fit.refit();
    rec.refit_degraded = fit.degraded();
    rec.eig_abs = std::abs(eig.value);
    rec.degree = 2;
    rec.step_status = eig.status;
    rec.seconds = elapsed();
    trace.records.push_back(rec);
  }
  return {assemble_net(data, neurons, fit.coefficients()), std::move(trace)};
}

}  // namespace geco
