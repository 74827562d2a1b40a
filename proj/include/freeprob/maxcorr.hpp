#pragma once

#include <cmath>
#include <string>

#include "freeprob/linalg.hpp"
#include "freeprob/moments.hpp"

namespace freeprob::maxcorr {

using moments::CumulantSequence;
using moments::MomentSequence;

template <class T>
struct GramTriple {
  linalg::Mat<T> A;  // cov(s_n^i, s_n^j), i,j = 1..D
  linalg::Mat<T> B;  // cov(s_m^i, s_m^j)
  linalg::Mat<T> C;  // cov(s_n^i, s_m^j)
};

namespace detail {

// tau(s_n^i s_m^j) for s_n = s_m + t with t free from s_m: one NC(i+j) sweep
// with per-block weights n*kappa (block inside the first i positions) or
// m*kappa (block touching a forced s_m position).
template <class T>
T cross_moment(int i, int j, int m, int n, const CumulantSequence<T>& kappa, int r_max) {
  const int r = i + j;
  if (r == 0) return T(1);
  if (r > kappa.order()) throw std::domain_error("cross_moment: cumulant order exceeded");
  const T nn = scalar_from_int<T>(n), mm = scalar_from_int<T>(m);
  T acc(0);
  for (const auto& pi : nc::enumerate_nc(r, r_max)) {
    T term(1);
    for (const auto& b : pi.blocks) {
      const bool inside = b.back() <= i;
      term *= (inside ? nn : mm) * kappa.cumulant(static_cast<int>(b.size()));
    }
    acc += term;
  }
  return acc;
}

}  // namespace detail

// Covariance Grams of the centered powers of s_n and s_m, with s_n = s_m + t,
// t free with cumulants (n - m) * kappa.
template <class T>
GramTriple<T> joint_grams(int m, int n, int D, const CumulantSequence<T>& kappa,
                          int r_max = kDefaultRMax) {
  if (m < 1 || n < m) throw std::domain_error("joint_grams: need 1 <= m <= n");
  if (2 * D > r_max) throw ResourceError("joint_grams: 2D exceeds the word-length cap");
  if (kappa.order() < 2 * D) throw std::domain_error("joint_grams: cumulant order below 2D");
  if (is_zero(kappa.cumulant(2)))
    throw std::domain_error("joint_grams: sigma(x_1) = 0 (degenerate distribution)");

  auto scaled = [&](int c) {
    CumulantSequence<T> k = kappa;
    for (auto& v : k.k) v *= scalar_from_int<T>(c);
    return k;
  };
  MomentSequence<T> mn = moments::cumulants_to_moments(scaled(n));
  MomentSequence<T> mmnts = moments::cumulants_to_moments(scaled(m));

  GramTriple<T> g;
  g.A.assign(D, std::vector<T>(D));
  g.B.assign(D, std::vector<T>(D));
  g.C.assign(D, std::vector<T>(D));
  for (int i = 1; i <= D; ++i)
    for (int j = 1; j <= D; ++j) {
      g.A[i - 1][j - 1] = mn.moment(i + j) - mn.moment(i) * mn.moment(j);
      g.B[i - 1][j - 1] = mmnts.moment(i + j) - mmnts.moment(i) * mmnts.moment(j);
      g.C[i - 1][j - 1] =
          detail::cross_moment(i, j, m, n, kappa, r_max) - mn.moment(i) * mmnts.moment(j);
    }
  return g;
}

struct CorrelationReport {
  int m = 0, n = 0, D = 0;
  std::string distribution;
  Eigen::MatrixXd gram_A, gram_B, cross_C;
  double rho_max = 0.0;
  Eigen::VectorXd optimizer_f, optimizer_g;  // coefficients in the centered power bases
  double theoretical = 0.0;                  // sqrt(m/n)
  double deviation = 0.0;
  int dropped_A = 0, dropped_B = 0;          // basis directions under the eigenvalue floor
};

template <class T>
CorrelationReport max_correlation(int m, int n, int D, const CumulantSequence<T>& kappa,
                                  const std::string& distribution = "",
                                  int r_max = kDefaultRMax, double floor_rel = 1e-12) {
  auto g = joint_grams(m, n, D, kappa, r_max);
  CorrelationReport rep;
  rep.m = m;
  rep.n = n;
  rep.D = D;
  rep.distribution = distribution;
  rep.gram_A.resize(D, D);
  rep.gram_B.resize(D, D);
  rep.cross_C.resize(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      rep.gram_A(i, j) = to_double(g.A[i][j]);
      rep.gram_B(i, j) = to_double(g.B[i][j]);
      rep.cross_C(i, j) = to_double(g.C[i][j]);
    }
  auto [WA, keptA] = linalg::inv_sqrt_floor(rep.gram_A, floor_rel);
  auto [WB, keptB] = linalg::inv_sqrt_floor(rep.gram_B, floor_rel);
  rep.dropped_A = D - keptA;
  rep.dropped_B = D - keptB;
  if (keptA == 0 || keptB == 0)
    throw ConditioningError("max_correlation: rank-deficient Gram after floor", 0.0);
  Eigen::MatrixXd M = WA.transpose() * rep.cross_C * WB;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  rep.rho_max = svd.singularValues()(0);
  rep.optimizer_f = WA * svd.matrixU().col(0);
  rep.optimizer_g = WB * svd.matrixV().col(0);
  rep.theoretical = std::sqrt(static_cast<double>(m) / n);
  rep.deviation = std::abs(rep.rho_max - rep.theoretical);
  return rep;
}

template <class T>
std::vector<std::pair<int, double>> correlation_sweep(int m, int n, int D_max,
                                                      const CumulantSequence<T>& kappa,
                                                      int r_max = kDefaultRMax) {
  if (2 * D_max > r_max) throw ResourceError("correlation_sweep: 2*D_max exceeds the cap");
  std::vector<std::pair<int, double>> out;
  for (int D = 1; D <= D_max; ++D)
    out.emplace_back(D, max_correlation(m, n, D, kappa, "", r_max).rho_max);
  return out;
}

// Shared CCA eigensolve on raw covariance matrices (used by the random-matrix
// cross-check on sampled Grams).
inline double cca_rho(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& C, double floor_rel = 1e-12) {
  auto [WA, keptA] = linalg::inv_sqrt_floor(A, floor_rel);
  auto [WB, keptB] = linalg::inv_sqrt_floor(B, floor_rel);
  if (keptA == 0 || keptB == 0)
    throw ConditioningError("cca_rho: rank-deficient Gram after floor", 0.0);
  Eigen::MatrixXd M = WA.transpose() * C * WB;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues()(0);
}

}  // namespace freeprob::maxcorr
