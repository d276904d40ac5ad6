#include "geco/data.hpp"
#include "geco/loss.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace geco;

TEST_SUITE("loss") {
  TEST_CASE("risk of the zero net") {
    PolyNet zero(1);
    const Dataset all_zero = make_dataset(RowMatrix::Ones(3, 1), Vector::Zero(3));
    CHECK(empirical_risk(zero, all_zero, LossFn::squared()) == 0.0);
    const Dataset one = make_dataset(RowMatrix::Ones(1, 1), Vector{{2.0}});
    CHECK(empirical_risk(zero, one, LossFn::squared()) == doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("derivative examples") {
    CHECK(LossFn::squared().derivative(3.0, 1.0) == 2.0);
    CHECK(LossFn::logistic().derivative(0.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(LossFn::squared().beta() == 1.0);
    CHECK(LossFn::logistic().beta() == 0.25);
  }

  TEST_CASE("derivative matches finite differences") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal(0.0, 3.0);
    std::bernoulli_distribution coin(0.5);
    for (const LossFn loss : {LossFn::squared(), LossFn::logistic()}) {
      for (int i = 0; i < 1000; ++i) {
        const double p = normal(rng);
        const double y = loss.kind() == LossKind::logistic ? (coin(rng) ? 1.0 : -1.0) : normal(rng);
        const double h = 1e-6;
        const double fd = (loss.value(p + h, y) - loss.value(p - h, y)) / (2.0 * h);
        const double g = loss.derivative(p, y);
        CHECK(std::abs(fd - g) <= 1e-5 * std::max(std::abs(g), 1e-3));
      }
    }
  }

  TEST_CASE("logistic stays finite for extreme margins") {
    const LossFn l = LossFn::logistic();
    CHECK(l.value(1e4, 1.0) == 0.0);
    CHECK(l.value(-1e4, 1.0) == doctest::Approx(1e4));
    CHECK(l.derivative(-1e4, 1.0) == doctest::Approx(-1.0));
    CHECK(l.derivative(1e4, 1.0) == doctest::Approx(0.0));
    CHECK(l.value(36.0, 1.0) == doctest::Approx(std::log1p(std::exp(-36.0))).epsilon(1e-15));
  }

  TEST_CASE("risk is permutation invariant") {
    std::mt19937_64 rng(4);
    const Vector p = testing::random_vector(500, rng);
    const Vector y = testing::random_vector(500, rng);
    std::vector<int> idx(500);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    Vector p2(500), y2(500);
    for (int i = 0; i < 500; ++i) {
      p2[i] = p[idx[static_cast<std::size_t>(i)]];
      y2[i] = y[idx[static_cast<std::size_t>(i)]];
    }
    const LossFn l = LossFn::squared();
    CHECK(std::abs(empirical_risk(p, y, l) - empirical_risk(p2, y2, l)) <= 1e-12);
  }

  TEST_CASE("gradient weights") {
    const Vector p{{1.0, -2.0}};
    const Vector y{{0.0, 1.0}};
    const Vector c = risk_gradient_weights(p, y, LossFn::squared());
    CHECK(c[0] == 1.0);
    CHECK(c[1] == -3.0);
  }

  TEST_CASE("parse") {
    CHECK(LossFn::parse("squared").kind() == LossKind::squared);
    CHECK(LossFn::parse("logistic").kind() == LossKind::logistic);
    CHECK_THROWS_AS(LossFn::parse("hinge"), std::invalid_argument);
  }
}
