#include "geco/approx.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace geco;

namespace {

struct Frozen {
  int t;
  double L;
  double eps;
  double T_exact;
  std::uint64_t T;
  double B_t_exact;
  std::uint64_t B_t;
  double B_n_exact;
  std::uint64_t B_n;
};

// Evaluated independently at 50 significant digits.
const Frozen kFrozen[] = {
    {1, 3.0, 0.5, 107.85263754543284, 108, 10.510819244856936, 11, 6940.169320210327, 6941},
    {1, 3.0, 0.2, 136.16673458327297, 137, 10.925451178326339, 11, 9389.658119003972, 9390},
    {1, 3.0, 0.1, 158.43666080189876, 159, 11.183323226761538, 12, 11327.193167433086, 11328},
    {1, 3.0, 0.9, 90.92870039816519, 91, 10.209963366279595, 11, 5570.336214787655, 5571},
    {2, 3.0, 0.5, 187.05230720251627, 188, 11.47194209246993, 12, 13968.866821716536, 13969},
    {3, 4.0, 0.25, 418.0073959527493, 419, 12.8336127212999, 13, 37395.72258570887, 37396},
};

}  // namespace

TEST_SUITE("approx") {
  TEST_CASE("sigmoid") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(-800.0) == 0.0);
    CHECK(sigmoid(800.0) == 1.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
      const double x = 20.0 * testing::random_vector(1, rng)[0];
      CHECK(std::abs(sigmoid(x) + sigmoid(-x) - 1.0) <= 1e-15);
    }
  }

  TEST_CASE("frozen bound values") {
    for (const Frozen& f : kFrozen) {
      INFO("t = " << f.t << ", L = " << f.L << ", eps = " << f.eps);
      const BoundReport r = theorem4_bounds(f.t, f.L, f.eps);
      CHECK(r.T_exact == doctest::Approx(f.T_exact).epsilon(1e-12));
      CHECK(r.T == f.T);
      CHECK(r.B_t_exact == doctest::Approx(f.B_t_exact).epsilon(1e-12));
      CHECK(r.B_t == f.B_t);
      CHECK(r.B_n_exact == doctest::Approx(f.B_n_exact).epsilon(1e-12));
      CHECK(r.B_n == f.B_n);
      if (f.t == 1) CHECK(lemma_degree(f.eps, f.L) == f.T);
    }
  }

  TEST_CASE("bounds are monotone in 1/epsilon") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> eps(0.001, 0.999);
    std::uniform_real_distribution<double> Ld(3.0, 12.0);
    std::uniform_int_distribution<int> td(1, 5);
    for (int i = 0; i < 200; ++i) {
      double a = eps(rng), b = eps(rng);
      if (a > b) std::swap(a, b);
      const double L = Ld(rng);
      const int t = td(rng);
      CHECK(lemma_degree(a, L) >= lemma_degree(b, L));
      const BoundReport ra = theorem4_bounds(t, L, a);
      const BoundReport rb = theorem4_bounds(t, L, b);
      CHECK(ra.T >= rb.T);
      CHECK(ra.B_t >= rb.B_t);
      CHECK(ra.B_n >= rb.B_n);
      CHECK(ra.size_scale >= rb.size_scale);
      CHECK(theorem4_bounds(t, L, a).T_exact == ra.T_exact);
    }
    CHECK(lemma_degree(0.9, 3.0) <= lemma_degree(0.1, 3.0));
  }

  TEST_CASE("domain checks") {
    CHECK_THROWS_AS(lemma_degree(0.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(lemma_degree(1.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(lemma_degree(0.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(theorem4_bounds(0, 3.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(fit_sigmoid_poly(1.5, 3.0), std::invalid_argument);
  }

  TEST_CASE("polynomial fits the sigmoid") {
    for (const auto& [eps, L] : {std::pair{0.5, 3.0}, std::pair{0.2, 3.0}, std::pair{0.1, 3.0}, std::pair{0.05, 4.0}}) {
      const SigmoidApprox p = fit_sigmoid_poly(eps, L);
      INFO("eps = " << eps << ", L = " << L);
      CHECK(p.grid_error <= eps);
      CHECK(sigmoid_grid_error(p.coefficients, L) == p.grid_error);
      CHECK(p.degree >= 0);
      CHECK(static_cast<std::uint64_t>(p.degree) <= lemma_degree(eps, L));
      CHECK(std::abs(p(0.0) - 0.5) <= eps);
      // Independent dense check, off the construction grid.
      double worst = 0.0;
      for (int i = 0; i <= 7919; ++i) {
        const double x = -4.0 * L + 8.0 * L * i / 7919.0;
        worst = std::max(worst, std::abs(p(x) - sigmoid(x)));
      }
      CHECK(worst <= eps * 1.05);
    }
  }

  TEST_CASE("degree override and JSON") {
    const SigmoidApprox p = fit_sigmoid_poly(0.2, 3.0, 300);
    CHECK(p.interpolation_degree == 300);
    CHECK(p.grid_error <= 0.2);
    const SigmoidApprox q = SigmoidApprox::from_json(nlohmann::json::parse(p.to_json().dump()));
    CHECK(q.coefficients == p.coefficients);
    CHECK(q(1.234) == p(1.234));
  }

  TEST_CASE("single sigmoid unit") {
    SigmoidNet f{Matrix{{1.0, -0.5}}, Vector{{0.5}}, Vector{{1.0}}, 0.0};
    const CompressionResult r = compress_sigmoid_net(f, 3.0, 0.2);
    CHECK(r.report.sup_gap <= 0.2);
    CHECK(r.report.within_epsilon);
    CHECK(r.report.check_points == 10000);
    CHECK(r.report.neurons == r.net.neuron_count());
  }

  TEST_CASE("zero-weight unit is the constant one half") {
    SigmoidNet f{Matrix::Zero(1, 2), Vector::Zero(1), Vector{{1.0}}, 0.0};
    const CompressionResult r = compress_sigmoid_net(f, 3.0, 0.2);
    const double gap = std::abs(r.net.evaluate_scalar(Vector::Zero(2)) - 0.5);
    CHECK(gap <= 0.2);
    CHECK(r.report.sup_gap <= 0.2);
  }

  TEST_CASE("two units") {
    SigmoidNet f{Matrix{{1.0, 0.5, -0.5}, {-1.0, 1.0, 0.25}}, Vector{{0.2, -0.5}}, Vector{{0.6, 0.4}}, 0.1};
    const CompressionResult r = compress_sigmoid_net(f, 3.0, 0.2);
    CHECK(r.report.sup_gap <= 0.2);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
      const Vector x = testing::uniform_vector(3, -1.0, 1.0, rng);
      CHECK(std::abs(r.net.evaluate_scalar(x) - f.evaluate(x)) <= 0.2);
    }
  }

  TEST_CASE("compression rejects out-of-class nets and tiny budgets") {
    SigmoidNet big{Matrix{{3.0, 1.0}}, Vector{{0.5}}, Vector{{1.0}}, 0.0};
    CHECK_THROWS_AS(compress_sigmoid_net(big, 3.0, 0.2), std::invalid_argument);
    SigmoidNet ok{Matrix{{1.0, 1.0}}, Vector{{0.0}}, Vector{{1.0}}, 0.0};
    CHECK_THROWS_AS(compress_sigmoid_net(ok, 3.0, 0.2, 0, 100, 10), std::invalid_argument);
  }
}
