#include "geco/gadget.hpp"
#include "geco/geco2.hpp"
#include "geco/geco3.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace geco;

TEST_SUITE("geco3") {
  TEST_CASE("restart count") {
    TensorConfig cfg;
    CHECK(cfg.restart_count(10) == 47);  // ceil(20 ln 10)
    CHECK(cfg.restart_count(2) == 10);   // ceil(4 ln 10)
    cfg.delta = 0.5;
    CHECK(cfg.restart_count(3) == static_cast<std::size_t>(std::ceil(6.0 * std::log(2.0))));
    cfg.restarts_override = 3;
    CHECK(cfg.restart_count(10) == 3);
  }

  TEST_CASE("theorem budget") {
    CHECK(geco3_theorem_bound(10, 1.0, 2, 0.1, 0.5) == doctest::Approx(6400.0));
    CHECK(iterations_exceeding(geco3_theorem_bound(10, 1.0, 2, 0.1, 0.5)) == 6401);
  }

  TEST_CASE("rank-one data") {
    for (std::size_t d : {2, 5}) {
      RowMatrix X = RowMatrix::Zero(1, static_cast<Eigen::Index>(d));
      X(0, 0) = 1.0;
      const TensorResult r = approx_tensor_max(X, Vector{{1.0}}, TensorConfig{});
      CHECK(r.score >= 0.5 / std::sqrt(2.0 * static_cast<double>(d)));
      CHECK(r.score <= 1.0 + 1e-12);
      CHECK(r.w.norm() == doctest::Approx(1.0));
      CHECK(r.u.norm() == doctest::Approx(1.0));
      CHECK(r.v.norm() == doctest::Approx(1.0));
    }
  }

  TEST_CASE("zero weights are degenerate") {
    std::mt19937_64 rng(1);
    const TensorResult r = approx_tensor_max(testing::random_rows(20, 3, rng), Vector::Zero(20), TensorConfig{});
    CHECK(r.score == 0.0);
    CHECK(r.status == SolveStatus::degenerate);
  }

  TEST_CASE("score is trilinear") {
    std::mt19937_64 rng(2);
    const RowMatrix X = testing::random_rows(40, 4, rng);
    const Vector c = testing::random_vector(40, rng);
    for (int i = 0; i < 20; ++i) {
      const Vector w = testing::random_vector(4, rng);
      const Vector u = testing::random_vector(4, rng);
      const Vector v = testing::random_vector(4, rng);
      const Vector w2 = testing::random_vector(4, rng);
      const double g = testing::random_vector(1, rng)[0];
      const double f = tensor_score(X, c, w, u, v);
      CHECK(tensor_score(X, c, g * w, u, v) == doctest::Approx(g * f).epsilon(1e-12));
      CHECK(tensor_score(X, c, w, g * u, v) == doctest::Approx(g * f).epsilon(1e-12));
      CHECK(tensor_score(X, c, w + w2, u, v) ==
            doctest::Approx(f + tensor_score(X, c, w2, u, v)).epsilon(1e-12).scale(std::abs(f)));
      CHECK(tensor_score(X, c, w, u, v) == doctest::Approx(tensor_score(X, c, v, w, u)).epsilon(1e-12));
    }
  }

  TEST_CASE("returned score equals the score of the returned triple") {
    std::mt19937_64 rng(3);
    const RowMatrix X = testing::random_rows(60, 5, rng);
    const Vector c = testing::random_vector(60, rng);
    TensorConfig cfg;
    cfg.seed = 4;
    const TensorResult r = approx_tensor_max(X, c, cfg);
    CHECK(r.score == tensor_score(X, c, r.w, r.u, r.v));
    CHECK(r.restart_index < cfg.restart_count(5));
    const TensorResult again = approx_tensor_max(X, c, cfg);
    CHECK(again.score == r.score);
    CHECK(again.w == r.w);
  }

  TEST_CASE("grid oracle bounds every triple on the grid scale") {
    std::mt19937_64 rng(5);
    const RowMatrix X = testing::random_rows(50, 2, rng);
    const Vector c = testing::random_vector(50, rng);
    const double oracle = tensor_grid_max(X, c, 1.0);
    const TensorResult r = approx_tensor_max(X, c, TensorConfig{});
    CHECK(r.score <= oracle * 1.001 + 1e-12);
    for (int i = 0; i < 50; ++i) {
      const Vector w = testing::random_vector(2, rng).normalized();
      const Vector u = testing::random_vector(2, rng).normalized();
      const Vector v = testing::random_vector(2, rng).normalized();
      CHECK(std::abs(tensor_score(X, c, w, u, v)) <= oracle * 1.001);
    }
  }

  TEST_CASE("approximation ratio in two dimensions") {
    const TensorRatioReport rep = tensor_ratio_experiment(2, 50, 0.5, 0.1, 200, 2024);
    CHECK(rep.trials == 200);
    CHECK(rep.guarantee == doctest::Approx(0.25));
    CHECK(rep.success_fraction >= 0.85);
  }

  TEST_CASE("approximation ratio in three dimensions") {
    const TensorRatioReport rep = tensor_ratio_experiment(3, 50, 0.5, 0.1, 200, 77);
    CHECK(rep.success_fraction >= 0.85);
  }

  TEST_CASE("cubic teacher is learned with monotone risk") {
    PolyNet teacher(4);
    teacher.add_neuron(1.0, BasisFunction::cubic(Vector::Unit(4, 0), Vector::Unit(4, 1), Vector::Unit(4, 2)));
    const Dataset d = sample_from_teacher(teacher, 1500, 5);
    TrainConfig cfg;
    cfg.r = 25;
    TensorConfig tcfg;
    tcfg.seed = 9;
    const TrainResult r = geco3_train(d, LossFn::squared(), cfg, tcfg);
    for (std::size_t i = 1; i < r.trace.records.size(); ++i)
      CHECK(r.trace.records[i].risk <= r.trace.records[i - 1].risk + 1e-10);
    CHECK(r.trace.records.back().risk <= 0.05 * r.trace.records.front().risk);
    CHECK(r.trace.records[1].degree == 3);

    const GadgetNet g = expand_to_sigma2(r.net);
    std::mt19937_64 rng(6);
    for (int i = 0; i < 100; ++i) {
      const Vector x = testing::uniform_vector(4, -1.0, 1.0, rng);
      CHECK(std::abs(g.evaluate_scalar(x) - r.net.evaluate(x)) <= 1e-9);
    }
  }

  TEST_CASE("degree-2 data: close to the degree-2 trainer") {
    const TeacherData t = gen_teacher_p2k(5, 2, 500, 12, 0.0);
    TrainConfig cfg;
    cfg.r = 20;
    const TrainResult a = geco2_train(t.data, LossFn::squared(), cfg);
    const TrainResult b = geco3_train(t.data, LossFn::squared(), cfg, TensorConfig{});
    CHECK(b.trace.records.back().risk <= a.trace.records.back().risk + 0.05);
  }

  TEST_CASE("config validation") {
    TensorConfig cfg;
    cfg.tau = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.tau = 0.5;
    cfg.delta = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(tensor_grid_max(RowMatrix::Zero(3, 4), Vector::Zero(3)), std::invalid_argument);
  }
}
