#pragma once

#include <optional>

#include "freeprob/transforms.hpp"

namespace freeprob::info {

using moments::CumulantSequence;
using moments::MomentSequence;

struct FisherResult {
  int D = 0;
  std::vector<double> conjugate_coeffs;  // xi ~ sum c_k z^k, k = 0..D
  double phi = 0.0;                      // ||xi_D||_2^2
  std::vector<double> residuals;         // conjugate-variable equations, r = 0..D
  std::vector<double> phi_by_degree;     // Phi_1..Phi_D
  bool divergent = false;                // Phi still growing at the cap
  bool rank_deficient = false;           // Hankel degeneracy (finitely many atoms)
  double growth_ratio = 1.0;             // Phi_D / Phi_{D-1}
};

// Conjugate-variable least squares in the power basis {1, z, .., z^D}:
// solves <z^i, xi> = sum_{k<i} m_k m_{i-1-k} against the Hankel Gram with the
// shared eigenvalue floor.  Needs moments to order 2D + 1.
FisherResult fisher_information(const MomentSequence<double>& m, int D,
                                double floor_rel = 1e-12, double growth_cap = 1.1);

// Exact-rational variant; nullopt when the Hankel matrix is singular (atomic
// distributions) or the system is inconsistent.
std::optional<Rational> fisher_information_exact(const MomentSequence<Rational>& m, int D);

// chi(mu) = log-energy + 3/4 + log(2*pi)/2; -inf for atomic measures.
double free_entropy(const transforms::Measure& mu);

// Log-energy of a piecewise-constant density with the diagonal singularity
// integrated in closed form per cell pair.
double log_energy(const transforms::GridDensity& g);

// chi via the Fisher integral representation along the free heat flow
// (kappa_2 grows linearly in t).  Quadrature is adaptive on [0, T] with an
// analytic 1/(sigma^2 + t) tail closure.
double entropy_via_fisher(const CumulantSequence<Rational>& kappa, int D, double t_max = 64.0,
                          double quad_tol = 1e-7);

struct MonotonicityRow {
  int n = 0;
  double chi = 0.0;       // -inf flagged via chi_finite
  double phi = 0.0;
  bool chi_finite = true;
  bool phi_finite = true;
  double phi_growth = 1.0;
};

struct MonotonicityReport {
  std::string measure_id;
  int D = 0, N = 0, grid = 0;
  std::vector<MonotonicityRow> rows;
  bool chi_nondecreasing = true;
  bool phi_nonincreasing = true;
};

// chi and Phi of n^{-1/2}_* mu^{boxplus n} for n = 1..n_max, with Phi computed
// exactly via homogeneity (Phi(s_n/sqrt n) = n Phi(s_n)) and chi via density
// recovery plus log-energy quadrature.
MonotonicityReport monotonicity_report(const CumulantSequence<Rational>& kappa, int n_max, int D,
                                       int N, int grid = 2000,
                                       const std::string& measure_id = "");

}  // namespace freeprob::info
