#include "geco/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace geco {

namespace {

using Real = long double;

void check_domain(double epsilon, double L) {
  require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(std::isfinite(L) && L >= 3.0, "L must be at least 3");
}

// log2(2^a + 2^b) without overflow.
double log2_add(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

double t_expression(int t, double L, double epsilon) {
  const double scale = std::pow(4.0 * L, static_cast<double>(t));
  const double big = 7.0 * L * std::log2(scale / epsilon + 3.0);  // log2 of ((4L)^t/eps + 3)^(7L)
  const double first = log2_add(std::log2(2.0 * std::pow(L, 4.0)), big);
  return first + 2.0 * std::log2(8.0 * std::pow(4.0 * L, static_cast<double>(t - 1)) / epsilon);
}

std::uint64_t ceil_u64(double x) { return static_cast<std::uint64_t>(std::ceil(x)); }

// Chebyshev coefficients c_0..c_n of the degree-n interpolant of f at the
// Chebyshev points of the first kind.
std::vector<Real> chebyshev_coefficients(int n, double four_l) {
  const int N = n + 1;
  std::vector<Real> fx(static_cast<std::size_t>(N));
  std::vector<Real> theta(static_cast<std::size_t>(N));
  const Real pi = std::numbers::pi_v<Real>;
  for (int k = 0; k < N; ++k) {
    theta[static_cast<std::size_t>(k)] = pi * (static_cast<Real>(k) + 0.5L) / static_cast<Real>(N);
    const Real x = std::cos(theta[static_cast<std::size_t>(k)]);
    fx[static_cast<std::size_t>(k)] = 1.0L / (1.0L + std::exp(-static_cast<Real>(four_l) * x));
  }
  std::vector<Real> c(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    Real s = 0.0L;
    for (int k = 0; k < N; ++k) s += fx[static_cast<std::size_t>(k)] * std::cos(static_cast<Real>(j) * theta[static_cast<std::size_t>(k)]);
    c[static_cast<std::size_t>(j)] = 2.0L * s / static_cast<Real>(N);
  }
  c[0] *= 0.5L;
  return c;
}

// Monomial coefficients of sum_{j<=n} c_j T_j(x).
std::vector<Real> chebyshev_to_monomial(const std::vector<Real>& c, int n) {
  std::vector<Real> out(static_cast<std::size_t>(n + 1), 0.0L);
  std::vector<Real> prev(static_cast<std::size_t>(n + 1), 0.0L);  // T_{j-1}
  std::vector<Real> cur(static_cast<std::size_t>(n + 1), 0.0L);   // T_j
  prev[0] = 1.0L;
  out[0] += c[0];
  if (n >= 1) {
    cur[1] = 1.0L;
    out[1] += c[1];
  }
  for (int j = 2; j <= n; ++j) {
    std::vector<Real> next(static_cast<std::size_t>(n + 1), 0.0L);
    for (int i = 0; i < j; ++i) next[static_cast<std::size_t>(i + 1)] += 2.0L * cur[static_cast<std::size_t>(i)];
    for (int i = 0; i <= j - 2; ++i) next[static_cast<std::size_t>(i)] -= prev[static_cast<std::size_t>(i)];
    for (int i = 0; i <= j; ++i) out[static_cast<std::size_t>(i)] += c[static_cast<std::size_t>(j)] * next[static_cast<std::size_t>(i)];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

double horner(const std::vector<double>& a, double x) {
  double s = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * x + *it;
  return s;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::uint64_t lemma_degree(double epsilon, double L) {
  check_domain(epsilon, L);
  return ceil_u64(t_expression(1, L, epsilon));
}

double SigmoidApprox::operator()(double x) const { return horner(coefficients, x); }

nlohmann::json SigmoidApprox::to_json() const {
  return {{"L", L},
          {"epsilon", epsilon},
          {"degree", degree},
          {"coefficients", coefficients},
          {"grid_error", grid_error},
          {"interpolation_degree", interpolation_degree}};
}

SigmoidApprox SigmoidApprox::from_json(const nlohmann::json& j) {
  SigmoidApprox s;
  s.L = j.at("L").get<double>();
  s.epsilon = j.at("epsilon").get<double>();
  s.degree = j.at("degree").get<int>();
  s.coefficients = j.at("coefficients").get<std::vector<double>>();
  require(s.coefficients.size() == static_cast<std::size_t>(s.degree + 1),
          "sigmoid approximation JSON: coefficient count differs from degree + 1");
  s.grid_error = j.value("grid_error", sigmoid_grid_error(s.coefficients, s.L));
  s.interpolation_degree = j.value("interpolation_degree", s.degree);
  return s;
}

double sigmoid_grid_error(const std::vector<double>& coefficients, double L, std::size_t points) {
  require(points >= 2, "grid check needs at least two points");
  require(!coefficients.empty(), "grid check: empty polynomial");
  const double half = 4.0 * L;
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
    worst = std::max(worst, std::abs(horner(coefficients, x) - sigmoid(x)));
  }
  return worst;
}

SigmoidApprox fit_sigmoid_poly(double epsilon, double L, std::optional<int> degree_override) {
  check_domain(epsilon, L);
  require(!degree_override || *degree_override >= 0, "degree override must be non-negative");
  const auto T = lemma_degree(epsilon, L);
  require(T <= 100'000, "fit_sigmoid_poly: lemma degree too large to interpolate");
  const int N = std::max(static_cast<int>(T), degree_override.value_or(0));
  const double four_l = 4.0 * L;
  const std::vector<Real> cheb = chebyshev_coefficients(N, four_l);

  double best_err = std::numeric_limits<double>::infinity();
  int best_n = -1;
  // The monomial form of a long Chebyshev series loses all accuracy in
  // double, so the lowest degree that passes is the useful one.
  for (int n = 0; n <= N; ++n) {
    const std::vector<Real> mono = chebyshev_to_monomial(cheb, n);
    std::vector<double> a(mono.size());
    Real scale = 1.0L;
    for (std::size_t j = 0; j < mono.size(); ++j) {
      a[j] = static_cast<double>(mono[j] / scale);
      scale *= static_cast<Real>(four_l);
    }
    const double err = sigmoid_grid_error(a, L);
    if (err < best_err) {
      best_err = err;
      best_n = n;
    }
    if (err <= epsilon) {
      SigmoidApprox out;
      out.L = L;
      out.epsilon = epsilon;
      out.degree = n;
      out.coefficients = std::move(a);
      out.grid_error = err;
      out.interpolation_degree = N;
      return out;
    }
  }
  throw NumericalError("fit_sigmoid_poly: no truncation of the degree-" + std::to_string(N) +
                       " interpolant meets epsilon " + std::to_string(epsilon) + " (best grid error " +
                       std::to_string(best_err) + " at degree " + std::to_string(best_n) + ")");
}

nlohmann::json BoundReport::to_json() const {
  return {{"t", t},
          {"L", L},
          {"epsilon", epsilon},
          {"T", T},
          {"B_t", B_t},
          {"B_n", B_n},
          {"T_exact", T_exact},
          {"B_t_exact", B_t_exact},
          {"B_n_exact", B_n_exact},
          {"depth_scale", depth_scale},
          {"size_scale", size_scale}};
}

BoundReport theorem4_bounds(int t, double L, double epsilon) {
  check_domain(epsilon, L);
  require(t >= 1, "t must be at least 1");
  BoundReport r;
  r.t = t;
  r.L = L;
  r.epsilon = epsilon;
  r.T_exact = t_expression(t, L, epsilon);
  r.T = ceil_u64(r.T_exact);
  const double lt = std::log2(static_cast<double>(r.T));
  const double llt = std::log2(lt);
  r.B_t_exact = 1.0 + lt + llt;
  r.B_n_exact = 1.0 + 2.0 * static_cast<double>(r.T) * (2.0 * lt + lt * llt);
  r.B_t = ceil_u64(r.B_t_exact);
  r.B_n = ceil_u64(r.B_n_exact);
  r.size_scale = static_cast<double>(t) * L + L * std::log2(1.0 / epsilon);
  r.depth_scale = std::log2(r.size_scale);
  return r;
}

double SigmoidNet::evaluate(const VectorRef& x) const {
  const Vector z = W * x + b;
  double s = output_bias;
  for (Eigen::Index j = 0; j < z.size(); ++j) s += v[j] * sigmoid(z[j]);
  return s;
}

nlohmann::json CompressionReport::to_json() const {
  return {{"epsilon", epsilon},   {"unit_epsilon", unit_epsilon}, {"poly_degree", poly_degree},
          {"neurons", neurons},   {"depth", depth},               {"sup_gap", sup_gap},
          {"check_points", check_points}, {"within_epsilon", within_epsilon}};
}

CompressionResult compress_sigmoid_net(const SigmoidNet& f, double L, double epsilon, std::uint64_t seed,
                                       std::size_t check_points, std::size_t neuron_budget) {
  check_domain(epsilon, L);
  const Eigen::Index n = f.W.rows();
  const Eigen::Index d = f.W.cols();
  require(n >= 1 && d >= 1, "compress_sigmoid_net: need at least one unit and one input");
  require(f.b.size() == n && f.v.size() == n, "compress_sigmoid_net: weight shapes do not match");
  for (Eigen::Index j = 0; j < n; ++j) {
    require(f.W.row(j).lpNorm<1>() + std::abs(f.b[j]) <= L * (1.0 + 1e-12),
            "compress_sigmoid_net: unit " + std::to_string(j) + " has ||w||_1 + |b| above L");
  }
  require(check_points >= 1, "compress_sigmoid_net: need at least one check point");

  CompressionReport rep;
  rep.epsilon = epsilon;
  rep.unit_epsilon = epsilon / std::max(1.0, f.v.lpNorm<1>());
  const SigmoidApprox p = fit_sigmoid_poly(rep.unit_epsilon, L);
  rep.poly_degree = p.degree;

  const std::span<const double> tail(p.coefficients.data() + 1, p.coefficients.size() - 1);
  const bool constant_only = std::all_of(tail.begin(), tail.end(), [](double a) { return a == 0.0; });

  auto build = [&]() -> GadgetNet {
    if (constant_only) {
      // Degree 0: g is the constant output_bias + a_0 sum_j v_j.
      GadgetLayer out{GadgetNeuron{Vector::Zero(d), f.output_bias + p.coefficients[0] * f.v.sum(), Activation::identity}};
      return GadgetNet(static_cast<std::size_t>(d), {out});
    }
    const GadgetNet poly = polynomial_gadget(tail, p.coefficients[0]);
    if (poly.neuron_count() * static_cast<std::size_t>(n) > neuron_budget) {
      throw std::invalid_argument("compress_sigmoid_net: construction needs more than " +
                                  std::to_string(neuron_budget) + " neurons");
    }
    std::vector<GadgetNet> units;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Matrix A = f.W.row(j);
      units.push_back(precompose(poly, A, f.b.segment(j, 1)));
    }
    return combine_outputs(stack(units), f.v, f.output_bias);
  };
  GadgetNet g = build();
  rep.neurons = g.neuron_count();
  rep.depth = g.depth();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector x(d);
  for (std::size_t i = 0; i < check_points; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) x[k] = unif(rng);
    rep.sup_gap = std::max(rep.sup_gap, std::abs(f.evaluate(x) - g.evaluate_scalar(x)));
  }
  rep.check_points = check_points;
  rep.within_epsilon = rep.sup_gap <= epsilon;
  return {std::move(g), rep};
}

}  // namespace geco
