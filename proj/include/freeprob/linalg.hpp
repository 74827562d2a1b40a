#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "freeprob/common.hpp"

namespace freeprob::linalg {

template <class T>
using Mat = std::vector<std::vector<T>>;

// Exact Gaussian elimination for a consistent linear system; free variables
// are set to zero.  Returns nullopt if the system is inconsistent.
inline std::optional<std::vector<Rational>> solve_consistent(Mat<Rational> A,
                                                            std::vector<Rational> b) {
  const int rows = static_cast<int>(A.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(A[0].size());
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int p = -1;
    for (int i = row; i < rows; ++i)
      if (A[i][col] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(A[p], A[row]);
    std::swap(b[p], b[row]);
    const Rational inv = 1 / A[row][col];
    for (int j = col; j < cols; ++j) A[row][j] *= inv;
    b[row] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == row || A[i][col] == 0) continue;
      const Rational f = A[i][col];
      for (int j = col; j < cols; ++j) A[i][j] -= f * A[row][j];
      b[i] -= f * b[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (int i = row; i < rows; ++i)
    if (b[i] != 0) return std::nullopt;
  std::vector<Rational> x(cols, Rational(0));
  for (int i = 0; i < row; ++i) x[pivot_col[i]] = b[i];
  return x;
}

// Exact solve for a nonsingular square system; nullopt when singular.
inline std::optional<std::vector<Rational>> solve_nonsingular(Mat<Rational> A,
                                                             std::vector<Rational> b) {
  const int n = static_cast<int>(A.size());
  for (int col = 0; col < n; ++col) {
    int p = -1;
    for (int i = col; i < n; ++i)
      if (A[i][col] != 0) {
        p = i;
        break;
      }
    if (p < 0) return std::nullopt;
    std::swap(A[p], A[col]);
    std::swap(b[p], b[col]);
    const Rational inv = 1 / A[col][col];
    for (int j = col; j < n; ++j) A[col][j] *= inv;
    b[col] *= inv;
    for (int i = 0; i < n; ++i) {
      if (i == col || A[i][col] == 0) continue;
      const Rational f = A[i][col];
      for (int j = col; j < n; ++j) A[i][j] -= f * A[col][j];
      b[i] -= f * b[col];
    }
  }
  return b;
}

struct RidgeSolve {
  std::vector<double> x;
  double ridge = 0.0;
  double condition = 0.0;
};

// Symmetric PSD solve with ridge escalation x10 from `ridge0` until the
// factorization succeeds and the residual is tame.
inline RidgeSolve solve_ridge(const Eigen::MatrixXd& G, const Eigen::VectorXd& rhs,
                              double ridge0 = 1e-12, double ridge_max = 1e-2) {
  const int n = static_cast<int>(G.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const auto& ev = es.eigenvalues();
  const double emax = std::max(ev.maxCoeff(), 0.0);
  const double emin = ev.minCoeff();
  RidgeSolve out;
  out.condition = (emin > 0) ? emax / emin : std::numeric_limits<double>::infinity();
  double scale = std::max(emax, 1.0);
  for (double eps = 0.0; ; eps = (eps == 0.0 ? ridge0 : eps * 10)) {
    if (eps > ridge_max)
      throw ConditioningError("solve_ridge: Gram matrix singular beyond ridge tolerance",
                              out.condition);
    Eigen::VectorXd d = ev.array() + eps * scale;
    if (d.minCoeff() <= scale * 1e-14) continue;
    Eigen::VectorXd y = es.eigenvectors().transpose() * rhs;
    Eigen::VectorXd x = es.eigenvectors() * (y.array() / d.array()).matrix();
    if (((G * x - rhs).norm() <= 1e-8 * std::max(1.0, rhs.norm())) || eps > 0) {
      out.x.assign(x.data(), x.data() + n);
      out.ridge = eps;
      return out;
    }
  }
}

// Symmetric inverse square root on the dominant eigenspace: eigenvalues below
// floor_rel * trace are dropped.  Returns (W, kept) with W = V * Lambda^{-1/2}.
inline std::pair<Eigen::MatrixXd, int> inv_sqrt_floor(const Eigen::MatrixXd& A,
                                                      double floor_rel = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const double floor = std::max(floor_rel * std::abs(A.trace()), 1e-300);
  std::vector<int> keep;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > floor) keep.push_back(i);
  Eigen::MatrixXd W(A.rows(), static_cast<int>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j)
    W.col(static_cast<int>(j)) =
        es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()(keep[j]));
  return {W, static_cast<int>(keep.size())};
}

}  // namespace freeprob::linalg
