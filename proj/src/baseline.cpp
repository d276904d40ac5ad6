#include "geco/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace geco {

void SgdConfig::validate() const {
  require(lr > 0.0, "sgd config: learning rate must be positive");
  require(decay >= 0.0, "sgd config: decay must be non-negative");
  require(batch >= 1, "sgd config: batch must be at least 1");
  require(momentum >= 0.0 && momentum < 1.0, "sgd config: momentum must lie in [0, 1)");
  require(eval_every >= 1, "sgd config: eval_every must be at least 1");
}

std::string error_kind(const Dataset& data) {
  return data.kind == LabelKind::binary ? "classification_error" : "mean_loss";
}

double evaluation_error(const MlpNet& net, const Dataset& data, const LossFn& loss) {
  const Vector p = net.forward_rows(data.X);
  if (data.kind == LabelKind::binary) {
    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if ((p[i] >= 0.0 ? 1.0 : -1.0) != data.y[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(p.size());
  }
  return empirical_risk(p, data.y, loss);
}

SgdResult sgd_train(MlpNet net, const Dataset& train, const LossFn& loss, const SgdConfig& cfg, const Dataset* eval) {
  cfg.validate();
  require(train.size() > 0, "sgd_train: empty dataset");
  require(train.dim() == net.input_dim(), "sgd_train: net input dimension differs from data");
  const Dataset& test = eval ? *eval : train;
  require(test.dim() == net.input_dim(), "sgd_train: evaluation data dimension differs from net");

  SgdResult out{net, {}, error_kind(test)};
  if (cfg.iterations == 0) return out;

  const std::size_t m = train.size();
  const std::size_t b = std::min(cfg.batch, m);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = m;  // forces a shuffle on first use unless full batch

  auto dloss = [&loss](double p, double y) { return loss.derivative(p, y); };
  Vector theta = net.parameters();
  Vector velocity = Vector::Zero(theta.size());
  RowMatrix Xb(static_cast<Eigen::Index>(b), train.X.cols());
  Vector yb(static_cast<Eigen::Index>(b));

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    if (b == m) {
      Xb = train.X;
      yb = train.y;
    } else {
      for (std::size_t j = 0; j < b; ++j) {
        if (cursor == m) {
          std::shuffle(order.begin(), order.end(), rng);
          cursor = 0;
        }
        const auto row = static_cast<Eigen::Index>(order[cursor++]);
        Xb.row(static_cast<Eigen::Index>(j)) = train.X.row(row);
        yb[static_cast<Eigen::Index>(j)] = train.y[row];
      }
    }
    const double lr = cfg.lr / (1.0 + cfg.decay * static_cast<double>(t - 1));
    // Nesterov: gradient at the look-ahead point theta + mu v.
    net.set_parameters(theta + cfg.momentum * velocity);
    const Vector g = net.gradient(Xb, yb, dloss);
    if (!g.allFinite()) {
      throw NumericalError("sgd_train: non-finite gradient at iteration " + std::to_string(t) +
                           " (diverged; lower the learning rate)");
    }
    velocity = cfg.momentum * velocity - lr * g;
    theta += velocity;
    if (!theta.allFinite()) {
      throw NumericalError("sgd_train: non-finite parameters at iteration " + std::to_string(t) +
                           " (diverged; lower the learning rate)");
    }
    if (t % cfg.eval_every == 0 || t == cfg.iterations) {
      net.set_parameters(theta);
      const double err = evaluation_error(net, test, loss);
      if (!std::isfinite(err)) {
        throw NumericalError("sgd_train: non-finite error at iteration " + std::to_string(t) +
                             " (diverged; lower the learning rate)");
      }
      out.trace.push_back({t, err});
    }
  }
  net.set_parameters(theta);
  out.net = std::move(net);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void monomials_of_degree(std::size_t d, int degree, std::size_t start, Exponents& cur,
                         std::vector<Exponents>& out) {
  if (degree == 0) {
    out.push_back(cur);
    return;
  }
  for (std::size_t j = start; j < d; ++j) {
    ++cur[j];
    monomials_of_degree(d, degree - 1, j, cur, out);
    --cur[j];
  }
}

}  // namespace

std::vector<Exponents> graded_lex_monomials(std::size_t d, int degree) {
  require(d >= 1, "monomials: d must be positive");
  require(degree >= 0, "monomials: degree must be non-negative");
  std::vector<Exponents> out;
  Exponents cur(d, 0);
  for (int k = 0; k <= degree; ++k) monomials_of_degree(d, k, 0, cur, out);
  return out;
}

std::size_t monomial_count(std::size_t d, int degree) {
  // binomial(d + degree, degree) built incrementally; each partial product is an integer.
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t c = 1;
  for (int k = 1; k <= degree; ++k) {
    const std::size_t num = d + static_cast<std::size_t>(k);
    if (c > kMax / num) return kMax;
    c = c * num / static_cast<std::size_t>(k);
  }
  return c;
}

RowMatrix monomial_features(const RowMatrix& X, const std::vector<Exponents>& monomials) {
  RowMatrix F(X.rows(), static_cast<Eigen::Index>(monomials.size()));
  for (std::size_t k = 0; k < monomials.size(); ++k) {
    const Exponents& e = monomials[k];
    require(e.size() == static_cast<std::size_t>(X.cols()), "monomial_features: exponent length differs from d");
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double v = 1.0;
      for (std::size_t j = 0; j < e.size(); ++j) {
        for (int p = 0; p < e[j]; ++p) v *= X(i, static_cast<Eigen::Index>(j));
      }
      F(i, static_cast<Eigen::Index>(k)) = v;
    }
  }
  return F;
}

std::string monomial_name(const Exponents& e) {
  std::string s;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e[j] == 0) continue;
    if (!s.empty()) s += '*';
    s += 'x' + std::to_string(j + 1);
    if (e[j] > 1) s += '^' + std::to_string(e[j]);
  }
  return s.empty() ? "1" : s;
}

double LinearizationResult::coefficient(const Exponents& e) const {
  for (std::size_t k = 0; k < monomials.size(); ++k) {
    if (monomials[k] == e) return coefficients[static_cast<Eigen::Index>(k)];
  }
  return 0.0;
}

Vector LinearizationResult::predict(const RowMatrix& X) const { return monomial_features(X, monomials) * coefficients; }

nlohmann::json LinearizationResult::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t k = 0; k < monomials.size(); ++k) {
    terms.push_back({{"monomial", monomial_name(monomials[k])},
                     {"exponents", monomials[k]},
                     {"coefficient", coefficients[static_cast<Eigen::Index>(k)]}});
  }
  return {{"type", "linearization"}, {"risk", risk}, {"terms", terms}};
}

LinearizationResult linearization_train(const Dataset& data, const LossFn& loss, int degree,
                                        std::size_t max_features) {
  require(degree >= 1, "linearization: degree must be at least 1");
  require(data.size() > 0, "linearization: empty dataset");
  const std::size_t count = monomial_count(data.dim(), degree);
  if (count > max_features) {
    throw std::invalid_argument("linearization: " + std::to_string(count) + " monomial features exceed the budget of " +
                                std::to_string(max_features));
  }
  LinearizationResult res;
  res.monomials = graded_lex_monomials(data.dim(), degree);
  const Matrix F = monomial_features(data.X, res.monomials);
  if (loss.kind() == LossKind::squared) {
    Eigen::ColPivHouseholderQR<Matrix> qr(F);
    res.coefficients = qr.solve(data.y);
  } else {
    // Convex gradient descent with Armijo backtracking on the mean loss.
    const double inv_m = 1.0 / static_cast<double>(data.size());
    Vector theta = Vector::Zero(F.cols());
    Vector pred = Vector::Zero(F.rows());
    double risk = empirical_risk(pred, data.y, loss);
    double step = 1.0;
    for (int it = 0; it < 20000; ++it) {
      const Vector grad = inv_m * (F.transpose() * risk_gradient_weights(pred, data.y, loss));
      const double gn2 = grad.squaredNorm();
      if (std::sqrt(gn2) <= 1e-8) break;
      step *= 2.0;
      bool accepted = false;
      while (step > 1e-20) {
        const Vector cand = theta - step * grad;
        const Vector cand_pred = F * cand;
        const double cand_risk = empirical_risk(cand_pred, data.y, loss);
        if (cand_risk <= risk - 0.5 * step * gn2) {
          theta = cand;
          pred = cand_pred;
          risk = cand_risk;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    res.coefficients = theta;
  }
  if (!res.coefficients.allFinite()) throw NumericalError("linearization: solve produced non-finite coefficients");
  res.risk = empirical_risk(F * res.coefficients, data.y, loss);
  return res;
}

// ---------------------------------------------------------------------------

OverspecReport overspec_solve(const Matrix& Z, const Vector& y) {
  require(Z.rows() == y.size() && Z.rows() >= 1 && Z.cols() >= 1, "overspec: feature/target shape mismatch");
  Eigen::JacobiSVD<Matrix> svd(Z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  OverspecReport rep;
  rep.sigma_max = s.size() > 0 ? s[0] : 0.0;
  const double cutoff = 1e-8 * rep.sigma_max;
  Vector coef = Vector::Zero(Z.cols());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] > cutoff) {
      ++rep.rank;
      rep.sigma_min = s[k];
      coef += svd.matrixV().col(k) * (svd.matrixU().col(k).dot(y) / s[k]);
    }
  }
  rep.risk = empirical_risk(Z * coef, y, LossFn::squared());
  rep.rank_deficient = rep.rank < static_cast<std::size_t>(Z.rows());
  return rep;
}

OverspecReport overspec_experiment(std::size_t d, std::size_t m, std::size_t n_hidden, HiddenActivation activation,
                                   std::uint64_t seed) {
  require(d >= 1 && m >= 1 && n_hidden >= 1, "overspec: d, m and n_hidden must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
    Matrix A(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) A(i, j) = normal(rng);
    }
    return A;
  };
  const Matrix X = gaussian(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  const Matrix V = gaussian(static_cast<Eigen::Index>(n_hidden), static_cast<Eigen::Index>(d));
  const Vector y = gaussian(static_cast<Eigen::Index>(m), 1).col(0);
  const Matrix Z = (X * V.transpose()).unaryExpr([activation](double z) { return activate(activation, z); });
  return overspec_solve(Z, y);
}

OverspecSweepResult overspec_sweep(const OverspecSweepConfig& cfg) {
  require(!cfg.factors.empty() && !cfg.seeds.empty(), "overspec sweep: need factors and seeds");
  require(cfg.teacher_width >= 1 && cfg.d >= 1, "overspec sweep: widths must be positive");
  require(cfg.threshold_factor >= 1.0, "overspec sweep: threshold factor must be at least 1");
  const LossFn loss = LossFn::squared();
  OverspecSweepResult out;
  out.factors = cfg.factors;
  for (auto f : cfg.factors) {
    require(f >= 1, "overspec sweep: factors must be positive");
    out.widths.push_back(cfg.teacher_width * f);
  }
  const std::size_t widest = static_cast<std::size_t>(
      std::max_element(cfg.factors.begin(), cfg.factors.end()) - cfg.factors.begin());

  for (std::uint64_t seed : cfg.seeds) {
    const MlpTeacherData gen = gen_teacher_mlp(cfg.d, cfg.teacher_width, HiddenActivation::relu,
                                               cfg.m_train + cfg.m_test, derive_seed(seed, 0));
    std::vector<std::size_t> train_idx(cfg.m_train);
    std::vector<std::size_t> test_idx(cfg.m_test);
    std::iota(train_idx.begin(), train_idx.end(), std::size_t{0});
    std::iota(test_idx.begin(), test_idx.end(), cfg.m_train);
    const Dataset train = subset(gen.data, train_idx);
    const Dataset test = subset(gen.data, test_idx);
    out.error_kind = error_kind(test);

    OverspecSweepRun run;
    run.seed = seed;
    for (std::size_t fi = 0; fi < cfg.factors.size(); ++fi) {
      SgdConfig sc = cfg.sgd;
      sc.seed = derive_seed(seed, 2 + fi);
      const MlpNet init =
          MlpNet::random(cfg.d, {out.widths[fi]}, HiddenActivation::relu, derive_seed(seed, 100 + fi), sc.init_scale);
      run.traces.push_back(sgd_train(init, train, loss, sc, &test).trace);
    }
    const auto& ref = run.traces[widest];
    run.threshold = cfg.threshold_factor * (ref.empty() ? 0.0 : ref.back().error);
    for (const auto& tr : run.traces) {
      std::size_t hit = kNeverReached;
      for (const auto& p : tr) {
        if (p.error <= run.threshold) {
          hit = p.iteration;
          break;
        }
      }
      run.iterations_to_threshold.push_back(hit);
    }
    out.runs.push_back(std::move(run));
  }

  for (std::size_t fi = 0; fi < cfg.factors.size(); ++fi) {
    std::vector<double> its;
    for (const auto& run : out.runs) {
      const std::size_t h = run.iterations_to_threshold[fi];
      its.push_back(h == kNeverReached ? std::numeric_limits<double>::infinity() : static_cast<double>(h));
    }
    std::sort(its.begin(), its.end());
    const std::size_t n = its.size();
    out.median_iterations.push_back(n % 2 == 1 ? its[n / 2] : 0.5 * (its[n / 2 - 1] + its[n / 2]));
  }
  return out;
}

}  // namespace geco
