#include "geco/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace geco {

namespace {

Matrix orthonormal_columns(const Matrix& W) {
  Eigen::HouseholderQR<Matrix> qr(W);
  return qr.householderQ() * Matrix::Identity(W.rows(), W.cols());
}

Matrix random_block(std::size_t dim, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix V(static_cast<Eigen::Index>(dim), p);
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    for (Eigen::Index i = 0; i < V.rows(); ++i) V(i, j) = normal(rng);
  }
  return orthonormal_columns(V);
}

// Largest-magnitude component positive, so equal inputs give equal outputs
// regardless of which sign the iteration happened to settle on.
void fix_sign(Vector& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v[k] < 0.0) v = -v;
}

void check_finite(const Matrix& W, const char* what) {
  if (!W.allFinite()) throw NumericalError(std::string(what) + ": operator produced non-finite values");
}

struct RitzPair {
  double value;
  Vector coords;  // in the block basis
};

// Ritz pairs of the p x p projection, sorted by decreasing magnitude.
std::vector<RitzPair> ritz_pairs(const Matrix& H) {
  const Matrix S = 0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  std::vector<RitzPair> out;
  for (Eigen::Index k = 0; k < S.rows(); ++k) out.push_back({es.eigenvalues()[k], es.eigenvectors().col(k)});
  std::stable_sort(out.begin(), out.end(),
                   [](const RitzPair& a, const RitzPair& b) { return std::abs(a.value) > std::abs(b.value); });
  return out;
}

constexpr double kTiny = std::numeric_limits<double>::min();

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::degraded:
      return "degraded";
    case SolveStatus::degenerate:
      return "degenerate";
  }
  return "unknown";
}

SymmetricOperator weighted_gram(const RowMatrix& X, const Vector& c) {
  require(X.rows() == c.size() && X.rows() > 0, "weighted_gram: weight count must equal example count");
  const double inv_m = 1.0 / static_cast<double>(X.rows());
  return SymmetricOperator{static_cast<std::size_t>(X.cols()), [&X, &c, inv_m](const Matrix& V) -> Matrix {
                             Matrix P = X * V;  // m x p
                             P.array().colwise() *= c.array();
                             return inv_m * (X.transpose() * P);
                           }};
}

SymmetricOperator dense_symmetric(Matrix M) {
  require(M.rows() == M.cols(), "dense_symmetric: matrix must be square");
  const auto d = static_cast<std::size_t>(M.rows());
  return SymmetricOperator{d, [M = std::move(M)](const Matrix& V) -> Matrix { return M * V; }};
}

LinearOperator dense_operator(Matrix A) {
  const auto r = static_cast<std::size_t>(A.rows());
  const auto c = static_cast<std::size_t>(A.cols());
  Matrix At = A.transpose();
  return LinearOperator{r, c, [A = std::move(A)](const Matrix& V) -> Matrix { return A * V; },
                        [At = std::move(At)](const Matrix& U) -> Matrix { return At * U; }};
}

EigenResult dominant_eigenpair(const SymmetricOperator& M, const EigenOptions& opts) {
  require(M.dim >= 1, "dominant_eigenpair: dimension must be positive");
  require(opts.tol > 0.0, "dominant_eigenpair: tolerance must be positive");
  require(opts.max_iter >= 1, "dominant_eigenpair: max_iter must be positive");
  const int p = std::clamp(opts.block, 1, static_cast<int>(M.dim));

  EigenResult res;
  bool restarted = false;
  Matrix V = random_block(M.dim, p, opts.seed);
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Matrix W = M.apply(V);
    check_finite(W, "dominant_eigenpair");
    const double scale = W.norm();
    if (scale <= kTiny) {
      if (it == 1) {
        res.vector = V.col(0);
        fix_sign(res.vector);
        res.value = 0.0;
        res.residual = 0.0;
        res.iterations = it;
        res.status = SolveStatus::degenerate;
        return res;
      }
      // The block fell into the null space after an earlier step; treat as zero.
      throw NumericalError("dominant_eigenpair: iterate collapsed to zero");
    }
    const auto ritz = ritz_pairs(V.transpose() * W);
    const RitzPair& top = ritz.front();
    if (top.value == 0.0 && !restarted) {
      // Start orthogonal to the dominant eigenspace; draw a fresh one.
      restarted = true;
      V = random_block(M.dim, p, opts.seed ^ 0x9e3779b97f4a7c15ULL);
      continue;
    }
    Vector v = V * top.coords;
    const Vector Mv = W * top.coords;
    res.value = top.value;
    res.residual = (Mv - top.value * v).norm();
    res.iterations = it;
    res.vector = v;
    if (res.residual <= opts.tol * std::abs(top.value)) {
      res.status = SolveStatus::converged;
      res.vector.normalize();
      fix_sign(res.vector);
      return res;
    }
    // Next block: rotate W into the Ritz basis so the leading column tracks the top pair.
    Matrix Y(p, p);
    for (int k = 0; k < p; ++k) Y.col(k) = ritz[static_cast<std::size_t>(k)].coords;
    V = orthonormal_columns(W * Y);
  }
  res.status = SolveStatus::degraded;
  res.vector.normalize();
  fix_sign(res.vector);
  return res;
}

SingularResult top_singular_pair(const LinearOperator& A, const EigenOptions& opts) {
  require(A.rows >= 1 && A.cols >= 1, "top_singular_pair: dimensions must be positive");
  require(opts.tol > 0.0, "top_singular_pair: tolerance must be positive");
  require(opts.max_iter >= 1, "top_singular_pair: max_iter must be positive");
  const int p = std::clamp(opts.block, 1, static_cast<int>(std::min(A.rows, A.cols)));

  SingularResult res;
  Matrix V = random_block(A.cols, p, opts.seed);
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Matrix AV = A.apply(V);
    check_finite(AV, "top_singular_pair");
    if (AV.norm() <= kTiny) {
      if (it == 1) {
        res.v = V.col(0);
        res.u = Vector::Zero(static_cast<Eigen::Index>(A.rows));
        res.u[0] = 1.0;
        res.iterations = it;
        res.status = SolveStatus::degenerate;
        return res;
      }
      throw NumericalError("top_singular_pair: iterate collapsed to zero");
    }
    const Matrix W = A.apply_transpose(AV);
    check_finite(W, "top_singular_pair");
    const auto ritz = ritz_pairs(V.transpose() * W);
    const RitzPair& top = ritz.front();
    const Vector v = V * top.coords;  // unit: orthonormal block times unit coordinates
    const Vector Av = AV * top.coords;
    const double sigma = Av.norm();
    res.iterations = it;
    if (sigma <= kTiny) {
      res.v = v;
      res.u = Vector::Zero(static_cast<Eigen::Index>(A.rows));
      res.u[0] = 1.0;
      res.status = SolveStatus::degenerate;
      return res;
    }
    res.u = Av / sigma;
    res.v = v;
    res.sigma = sigma;  // u^T A v = ||A v||
    // A^T u = A^T A v / sigma = W y / sigma
    res.residual = ((W * top.coords) / sigma - sigma * v).norm();
    res.tau_effective = res.residual / sigma;
    if (res.residual <= opts.tol * sigma) {
      res.status = SolveStatus::converged;
      return res;
    }
    Matrix Y(p, p);
    for (int k = 0; k < p; ++k) Y.col(k) = ritz[static_cast<std::size_t>(k)].coords;
    V = orthonormal_columns(W * Y);
  }
  res.status = SolveStatus::degraded;
  return res;
}

}  // namespace geco
