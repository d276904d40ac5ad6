#include "geco/baseline.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace geco;

TEST_SUITE("baseline") {
  TEST_CASE("zero iterations return the initial net") {
    std::mt19937_64 rng(1);
    const Dataset d = make_dataset(testing::random_rows(20, 3, rng), testing::random_vector(20, rng));
    const MlpNet init = MlpNet::random(3, {4}, HiddenActivation::relu, 7);
    SgdConfig cfg;
    cfg.iterations = 0;
    const SgdResult r = sgd_train(init, d, LossFn::squared(), cfg);
    CHECK(r.trace.empty());
    CHECK(r.net.parameters() == init.parameters());
  }

  TEST_CASE("linear net fits realizable linear data") {
    std::mt19937_64 rng(2);
    const RowMatrix X = testing::random_rows(200, 4, rng);
    const Vector w{{1.0, -2.0, 0.5, 0.25}};
    const Dataset d = make_dataset(X, (X * w).array() + 0.3);
    SgdConfig cfg;
    cfg.iterations = 5000;
    cfg.lr = 0.01;
    cfg.eval_every = 1000;
    const SgdResult r = sgd_train(MlpNet::random(4, {}, HiddenActivation::relu, 1), d, LossFn::squared(), cfg);
    CHECK(r.error_kind == "mean_loss");
    REQUIRE(r.trace.size() == 5);
    CHECK(r.trace.back().iteration == 5000);
    CHECK(r.trace.back().error <= 1e-3);
  }

  TEST_CASE("full-batch plain gradient descent is deterministic") {
    std::mt19937_64 rng(3);
    const Dataset d = make_dataset(testing::random_rows(30, 3, rng), testing::random_vector(30, rng));
    SgdConfig cfg;
    cfg.momentum = 0.0;
    cfg.batch = 30;
    cfg.iterations = 50;
    cfg.eval_every = 10;
    const MlpNet init = MlpNet::random(3, {5}, HiddenActivation::squared, 4);
    cfg.seed = 1;
    const SgdResult a = sgd_train(init, d, LossFn::squared(), cfg);
    cfg.seed = 2;
    const SgdResult b = sgd_train(init, d, LossFn::squared(), cfg);
    CHECK(a.net.parameters() == b.net.parameters());
  }

  TEST_CASE("divergence is reported") {
    std::mt19937_64 rng(4);
    const Dataset d = make_dataset(testing::random_rows(30, 3, rng) * 10.0, testing::random_vector(30, rng));
    SgdConfig cfg;
    cfg.lr = 10.0;
    cfg.iterations = 500;
    CHECK_THROWS_AS(sgd_train(MlpNet::random(3, {5}, HiddenActivation::squared, 4), d, LossFn::squared(), cfg),
                    NumericalError);
  }

  TEST_CASE("classification error for binary labels") {
    const Dataset d = make_dataset(RowMatrix{{1.0}, {-1.0}, {2.0}, {-3.0}}, Vector{{1.0, -1.0, -1.0, -1.0}});
    const MlpNet id({DenseLayer{Matrix{{1.0}}, Vector{{0.0}}}}, {});
    CHECK(error_kind(d) == "classification_error");
    CHECK(evaluation_error(id, d, LossFn::squared()) == 0.25);
  }

  TEST_CASE("graded lexicographic monomials") {
    const auto mons = graded_lex_monomials(2, 2);
    REQUIRE(mons.size() == 6);
    CHECK(mons[0] == Exponents{0, 0});
    CHECK(mons[1] == Exponents{1, 0});
    CHECK(mons[2] == Exponents{0, 1});
    CHECK(mons[3] == Exponents{2, 0});
    CHECK(mons[4] == Exponents{1, 1});
    CHECK(mons[5] == Exponents{0, 2});
    CHECK(monomial_count(20, 2) == 231);
    CHECK(graded_lex_monomials(6, 3).size() == monomial_count(6, 3));
    CHECK(monomial_name(Exponents{2, 0, 1}) == "x1^2*x3");
  }

  TEST_CASE("linearization recovers exact polynomials") {
    std::mt19937_64 rng(5);
    const RowMatrix X = testing::random_rows(200, 3, rng);
    SUBCASE("x1^2") {
      const LinearizationResult r =
          linearization_train(make_dataset(X, X.col(0).array().square()), LossFn::squared(), 2);
      for (std::size_t i = 0; i < r.monomials.size(); ++i) {
        const double target = r.monomials[i] == Exponents{2, 0, 0} ? 1.0 : 0.0;
        CHECK(std::abs(r.coefficients[static_cast<Eigen::Index>(i)] - target) <= 1e-8);
      }
      CHECK(r.risk <= 1e-16);
    }
    SUBCASE("zero targets") {
      const LinearizationResult r = linearization_train(make_dataset(X, Vector::Zero(200)), LossFn::squared(), 2);
      CHECK(r.coefficients.isZero());
    }
    SUBCASE("x1 x2 x3") {
      const Vector y = X.col(0).cwiseProduct(X.col(1)).cwiseProduct(X.col(2));
      const LinearizationResult r = linearization_train(make_dataset(X, y), LossFn::squared(), 3);
      CHECK(r.coefficient(Exponents{1, 1, 1}) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(std::abs(r.coefficient(Exponents{2, 1, 0})) <= 1e-6);
      CHECK((r.predict(X) - y).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }

  TEST_CASE("linearization rejects oversized expansions") {
    std::mt19937_64 rng(6);
    const Dataset d = make_dataset(testing::random_rows(10, 200, rng), testing::random_vector(10, rng));
    CHECK_THROWS_AS(linearization_train(d, LossFn::squared(), 3, 1000), std::invalid_argument);
  }

  TEST_CASE("over-specified sigmoid features interpolate") {
    const OverspecReport r = overspec_experiment(10, 30, 30, HiddenActivation::sigmoid, 0);
    CHECK(r.rank == 30);
    CHECK_FALSE(r.rank_deficient);
    CHECK(r.risk <= 1e-8);
  }

  TEST_CASE("under-specified features do not") {
    const OverspecReport one = overspec_experiment(10, 30, 1, HiddenActivation::sigmoid, 0);
    CHECK(one.rank == 1);
    CHECK(one.rank_deficient);
    CHECK(one.risk > 0.0);
    const OverspecReport lin = overspec_experiment(10, 30, 30, HiddenActivation::identity, 0);
    CHECK(lin.rank <= 10);
    CHECK(lin.rank_deficient);
  }

  TEST_CASE("full rank implies zero risk") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      for (const auto act : {HiddenActivation::sigmoid, HiddenActivation::relu, HiddenActivation::squared}) {
        const OverspecReport r = overspec_experiment(10, 25, 40, act, seed);
        if (r.rank == 25) CHECK(r.risk <= 1e-8);
      }
    }
  }

  TEST_CASE("small over-specification sweep") {
    OverspecSweepConfig cfg;
    cfg.d = 10;
    cfg.teacher_width = 4;
    cfg.factors = {1, 2};
    cfg.m_train = 300;
    cfg.m_test = 100;
    cfg.sgd.iterations = 400;
    cfg.sgd.eval_every = 50;
    cfg.sgd.lr = 0.005;
    const OverspecSweepResult r = overspec_sweep(cfg);
    CHECK(r.widths == std::vector<std::size_t>{4, 8});
    REQUIRE(r.runs.size() == 1);
    REQUIRE(r.runs[0].traces.size() == 2);
    const auto& t = r.runs[0].traces[0];
    REQUIRE(t.size() == 8);
    CHECK(t.back().error < t.front().error);
    CHECK(r.median_iterations.size() == 2);
  }

  TEST_CASE("full-scale widths") {
    OverspecSweepConfig cfg;
    CHECK(cfg.teacher_width * cfg.factors.back() == 480);
  }
}
