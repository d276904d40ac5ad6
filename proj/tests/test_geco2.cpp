#include "geco/baseline.hpp"
#include "geco/geco2.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace geco;

namespace {

void check_monotone(const TrainTrace& trace) {
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    INFO("iteration " << trace.records[i].iteration);
    CHECK(trace.records[i].risk <= trace.records[i - 1].risk + 1e-10);
  }
}

}  // namespace

TEST_SUITE("geco2") {
  TEST_CASE("theorem budget") {
    CHECK(geco2_theorem_bound(1.0, 2, 0.1) == doctest::Approx(80.0));
    CHECK(iterations_exceeding(geco2_theorem_bound(1.0, 2, 0.1)) == 81);
    CHECK(iterations_exceeding(geco2_theorem_bound(1.0, 3, 0.05)) == 361);
    CHECK(iterations_exceeding(80.5) == 81);
    CHECK(iterations_exceeding(0.0) == 1);
  }

  TEST_CASE("first step recovers a single-neuron teacher direction") {
    PolyNet teacher(5);
    teacher.add_neuron(1.0, BasisFunction::square(Vector::Unit(5, 0)));
    const Dataset d = sample_from_teacher(teacher, 2000, 1);
    TrainConfig cfg;
    cfg.r = 1;
    const TrainResult r = geco2_train(d, LossFn::squared(), cfg);
    REQUIRE(r.net.neurons().size() == 1);
    CHECK(std::abs(r.net.neurons()[0].basis.direction(0)[0]) >= 0.99);
  }

  TEST_CASE("refit recovers an exact coefficient") {
    std::mt19937_64 rng(2);
    const RowMatrix X = testing::random_rows(500, 4, rng);
    const Dataset d = make_dataset(X, 3.0 * X.col(0).array().square());
    const std::vector<BasisFunction> g{BasisFunction::square(Vector::Unit(4, 0))};
    const RefitResult r = refit_output_weights(g, d, LossFn::squared());
    CHECK(r.alpha[0] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(std::abs(r.bias) <= 1e-6);
    CHECK(r.direct_term.cwiseAbs().maxCoeff() <= 1e-6);
  }

  TEST_CASE("duplicate neurons refit to the same function") {
    std::mt19937_64 rng(3);
    const RowMatrix X = testing::random_rows(300, 3, rng);
    const Dataset d = make_dataset(X, X.col(1).array().square() * 2.0 + 0.1 * testing::random_vector(300, rng).array());
    const BasisFunction g = BasisFunction::square(Vector{{0.2, 1.0, 0.0}});
    const RefitResult one = refit_output_weights({g}, d, LossFn::squared());
    const RefitResult two = refit_output_weights({g, g}, d, LossFn::squared());
    REQUIRE(two.alpha.allFinite());
    PolyNet a(one.bias, one.direct_term, {{one.alpha[0], g}});
    PolyNet b(two.bias, two.direct_term, {{two.alpha[0], g}, {two.alpha[1], g}});
    CHECK((a.evaluate_rows(X) - b.evaluate_rows(X)).cwiseAbs().maxCoeff() <= 1e-6);
  }

  TEST_CASE("logistic refit reaches a stationary point") {
    std::mt19937_64 rng(4);
    const RowMatrix X = testing::random_rows(400, 3, rng);
    std::bernoulli_distribution flip(0.15);
    Vector y(400);
    for (Eigen::Index i = 0; i < 400; ++i) {
      y[i] = X(i, 0) * X(i, 0) - 1.0 + 0.3 * X(i, 1) > 0 ? 1.0 : -1.0;
      if (flip(rng)) y[i] = -y[i];
    }
    const Dataset d = make_dataset(X, y);
    const RefitResult r =
        refit_output_weights({BasisFunction::square(Vector::Unit(3, 0))}, d, LossFn::logistic(), 1e-8, 20000);
    CHECK_FALSE(r.degraded);
    CHECK(r.alpha[0] > 0.0);
  }

  TEST_CASE("training on a P_{2,k} teacher") {
    const TeacherData t = gen_teacher_p2k(10, 3, 600, 7, 0.0);
    TrainConfig cfg;
    cfg.r = 30;
    cfg.k = 3;
    const TrainResult r = geco2_train(t.data, LossFn::squared(), cfg);
    check_monotone(r.trace);
    CHECK(r.net.neurons().size() <= cfg.r);
    for (const Neuron& n : r.net.neurons()) CHECK(n.basis.degree() == 2);
    CHECK(r.trace.records.front().iteration == 0);
    CHECK(r.trace.records.back().risk <= 1e-3 * r.trace.records.front().risk);
    CHECK(empirical_risk(r.net, t.data, LossFn::squared()) ==
          doctest::Approx(r.trace.records.back().risk).epsilon(1e-8));
    CHECK(r.trace.theorem_iterations == 361);
  }

  TEST_CASE("logistic training is monotone") {
    const MlpTeacherData t = gen_teacher_mlp(6, 3, HiddenActivation::squared, 500, 2, true);
    TrainConfig cfg;
    cfg.r = 10;
    const TrainResult r = geco2_train(t.data, LossFn::logistic(), cfg);
    check_monotone(r.trace);
    CHECK(r.trace.theorem_bound == doctest::Approx(2.0 * 0.25 / 0.05));
  }

  TEST_CASE("deterministic") {
    const TeacherData t = gen_teacher_p2k(8, 2, 300, 3, 0.05);
    TrainConfig cfg;
    cfg.r = 8;
    const TrainResult a = geco2_train(t.data, LossFn::squared(), cfg);
    const TrainResult b = geco2_train(t.data, LossFn::squared(), cfg);
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (std::size_t i = 0; i < a.trace.records.size(); ++i) CHECK(a.trace.records[i].risk == b.trace.records[i].risk);
  }

  TEST_CASE("affine data is fit by the starting refit") {
    std::mt19937_64 rng(5);
    const RowMatrix X = testing::random_rows(100, 3, rng);
    TrainConfig cfg;
    cfg.r = 5;
    const TrainResult r = geco2_train(make_dataset(X, X * Vector{{1.0, 2.0, 3.0}}), LossFn::squared(), cfg);
    for (const TraceRecord& rec : r.trace.records) CHECK(rec.risk <= 1e-18);
    const TrainResult z = geco2_train(make_dataset(X, Vector::Zero(100)), LossFn::squared(), cfg);
    CHECK(z.trace.stopped_early);
    CHECK(z.trace.records.size() == 1);
    CHECK(z.net.neurons().empty());
  }

  TEST_CASE("greedy direction is invariant to positive scaling of the weights") {
    std::mt19937_64 rng(6);
    const RowMatrix X = testing::random_rows(80, 6, rng);
    const Vector c = testing::random_vector(80, rng);
    const Vector c2 = 3.7 * c;
    const EigenResult a = dominant_eigenpair(weighted_gram(X, c), {.seed = 1});
    const EigenResult b = dominant_eigenpair(weighted_gram(X, c2), {.seed = 1});
    CHECK(std::abs(a.vector.dot(b.vector)) >= 1.0 - 1e-8);
    CHECK(b.value == doctest::Approx(3.7 * a.value).epsilon(1e-8));
  }

  TEST_CASE("near the linearization oracle") {
    const TeacherData t = gen_teacher_p2k(6, 2, 500, 11, 0.1);
    TrainConfig cfg;
    cfg.r = 40;
    const TrainResult r = geco2_train(t.data, LossFn::squared(), cfg);
    const LinearizationResult lin = linearization_train(t.data, LossFn::squared(), 2);
    CHECK(r.trace.records.back().risk <= lin.risk + 0.05);
  }

  TEST_CASE("config validation") {
    TrainConfig cfg;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}
