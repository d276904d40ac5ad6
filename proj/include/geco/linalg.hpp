#pragma once

#include "geco/common.hpp"

#include <cstdint>
#include <functional>

namespace geco {

// Matrix-free symmetric operator. `apply` maps a dim x p block V to M V.
struct SymmetricOperator {
  std::size_t dim = 0;
  std::function<Matrix(const Matrix&)> apply;
};

// General operator A (rows x cols) with its transpose, both on blocks.
struct LinearOperator {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<Matrix(const Matrix&)> apply;            // cols x p -> rows x p
  std::function<Matrix(const Matrix&)> apply_transpose;  // rows x p -> cols x p
};

// M = (1/m) sum_i c_i x_i x_i^T with x_i the rows of X. X and c must outlive the operator.
SymmetricOperator weighted_gram(const RowMatrix& X, const Vector& c);
SymmetricOperator dense_symmetric(Matrix M);
LinearOperator dense_operator(Matrix A);

enum class SolveStatus {
  converged,
  degraded,    // hit max_iter before the residual test passed
  degenerate,  // the operator vanished on the random start (zero matrix)
};

const char* to_string(SolveStatus s);

struct EigenOptions {
  double tol = 1e-8;  // relative: residual <= tol * |value|
  int max_iter = 1000;
  std::uint64_t seed = 0;
  // Block width of the power iteration. Two vectors separate eigenvalues of
  // equal magnitude and opposite sign, which single-vector iteration cannot.
  int block = 2;
};

struct EigenResult {
  Vector vector;       // unit norm
  double value = 0.0;  // signed Rayleigh quotient
  double residual = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::converged;
};

// Eigenpair whose eigenvalue has the largest magnitude.
EigenResult dominant_eigenpair(const SymmetricOperator& M, const EigenOptions& opts = {});

struct SingularResult {
  Vector u;
  Vector v;
  double sigma = 0.0;  // u^T A v
  double residual = 0.0;       // ||A^T u - sigma v||
  double tau_effective = 0.0;  // residual / sigma, the achieved relative gap estimate
  int iterations = 0;
  SolveStatus status = SolveStatus::converged;
};

// Leading singular pair by power iteration on A^T A followed by u = A v / ||A v||.
SingularResult top_singular_pair(const LinearOperator& A, const EigenOptions& opts = {});

}  // namespace geco
