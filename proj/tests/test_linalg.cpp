#include "geco/linalg.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace geco;

TEST_SUITE("linalg") {
  TEST_CASE("diagonal eigenpairs") {
    SUBCASE("positive") {
      RowMatrix X(2, 2);
      X << 1.0, 0.0, 0.0, 1.0;
      const Vector c{{6.0, 2.0}};  // (1/2) (6 e1 e1^T + 2 e2 e2^T) = diag(3, 1)
      const EigenResult r = dominant_eigenpair(weighted_gram(X, c));
      CHECK(r.value == doctest::Approx(3.0).epsilon(1e-8));
      CHECK(std::abs(r.vector[0]) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(r.status == SolveStatus::converged);
    }
    SUBCASE("indefinite") {
      const EigenResult r = dominant_eigenpair(dense_symmetric(Vector{{-5.0, 2.0}}.asDiagonal()));
      CHECK(r.value == doctest::Approx(-5.0).epsilon(1e-8));
      CHECK(std::abs(r.vector[0]) == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("equal magnitude, opposite sign") {
      const EigenResult r = dominant_eigenpair(dense_symmetric(Vector{{-2.0, 2.0, 0.5}}.asDiagonal()));
      CHECK(std::abs(r.value) == doctest::Approx(2.0).epsilon(1e-8));
    }
  }

  TEST_CASE("singular pairs") {
    SUBCASE("diagonal") {
      const SingularResult r = top_singular_pair(dense_operator(Vector{{4.0, 1.0}}.asDiagonal()));
      CHECK(r.sigma == doctest::Approx(4.0).epsilon(1e-8));
      CHECK(std::abs(r.u[0]) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(std::abs(r.v[0]) == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("zero matrix") {
      const SingularResult r = top_singular_pair(dense_operator(Matrix::Zero(2, 2)));
      CHECK(r.sigma == 0.0);
      CHECK(r.status == SolveStatus::degenerate);
    }
    SUBCASE("rotation-like") {
      Matrix A(2, 2);
      A << 0.0, 2.0, -2.0, 0.0;
      CHECK(top_singular_pair(dense_operator(A)).sigma == doctest::Approx(2.0).epsilon(1e-8));
    }
  }

  TEST_CASE("eigenpairs match a dense solver on random matrices") {
    std::mt19937_64 rng(100);
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix B = testing::random_matrix(10, 10, rng);
      const Matrix M = (B + B.transpose()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Matrix> es(M);
      Eigen::Index k = 0;
      es.eigenvalues().cwiseAbs().maxCoeff(&k);
      const double lambda = es.eigenvalues()[k];
      const EigenResult r = dominant_eigenpair(dense_symmetric(M), {.seed = static_cast<std::uint64_t>(trial)});
      INFO("trial " << trial);
      CHECK(std::abs(r.value - lambda) <= 1e-6 * std::abs(lambda));
      CHECK(std::abs(r.vector.dot(es.eigenvectors().col(k))) >= 1.0 - 1e-6);
    }
  }

  TEST_CASE("singular values match a dense SVD on random matrices") {
    std::mt19937_64 rng(200);
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix A = testing::random_matrix(10, 10, rng);
      Eigen::JacobiSVD<Matrix> svd(A);
      const double s = svd.singularValues()[0];
      const SingularResult r = top_singular_pair(dense_operator(A), {.seed = static_cast<std::uint64_t>(trial)});
      INFO("trial " << trial);
      CHECK(std::abs(r.sigma - s) <= 1e-6 * s);
      CHECK(r.u.dot(A * r.v) == doctest::Approx(r.sigma).epsilon(1e-12));
    }
  }

  TEST_CASE("deterministic for a fixed seed") {
    std::mt19937_64 rng(7);
    const RowMatrix X = testing::random_rows(50, 6, rng);
    const Vector c = testing::random_vector(50, rng);
    const EigenResult a = dominant_eigenpair(weighted_gram(X, c), {.seed = 9});
    const EigenResult b = dominant_eigenpair(weighted_gram(X, c), {.seed = 9});
    CHECK(a.value == b.value);
    CHECK(a.vector == b.vector);
    const Matrix A = testing::random_matrix(6, 4, rng);
    const SingularResult s1 = top_singular_pair(dense_operator(A), {.seed = 3});
    const SingularResult s2 = top_singular_pair(dense_operator(A), {.seed = 3});
    CHECK(s1.sigma == s2.sigma);
    CHECK(s1.u == s2.u);
  }

  TEST_CASE("weighted Gram operator matches the explicit matrix") {
    std::mt19937_64 rng(1);
    const RowMatrix X = testing::random_rows(30, 5, rng);
    const Vector c = testing::random_vector(30, rng);
    const Matrix M = X.transpose() * c.asDiagonal() * X / 30.0;
    const Matrix V = testing::random_matrix(5, 2, rng);
    CHECK((weighted_gram(X, c).apply(V) - M * V).norm() <= 1e-12 * (M * V).norm());
  }
}
