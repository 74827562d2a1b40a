#pragma once

#include <cmath>
#include <type_traits>

#include "freeprob/algebra.hpp"
#include "freeprob/linalg.hpp"

namespace freeprob::projections {

using algebra::Polynomial;
using moments::FreeFamily;

template <class T>
struct ProjectionResult {
  Polynomial<T> input;
  std::vector<int> subset;
  Polynomial<T> projection;
  double residual_norm = 0.0;   // ||z - proj||_2
  double gram_condition = 0.0;
  double ridge = 0.0;
};

namespace detail {

// Least-squares projection of z onto span{1} + span(basis) where the basis
// elements are centered (orthogonal to the unit by construction).
template <class T>
ProjectionResult<T> project_onto(const Polynomial<T>& z, const std::vector<Polynomial<T>>& basis,
                                 const FreeFamily<T>& family, int r_max) {
  const int n = static_cast<int>(basis.size());
  if (n == 0) {
    ProjectionResult<T> out;
    out.input = z;
    out.projection = Polynomial<T>::constant(algebra::trace(z, family, r_max));
    out.residual_norm =
        std::sqrt(std::max(0.0, to_double(algebra::norm2_sq(z - out.projection, family, r_max))));
    return out;
  }
  const Polynomial<T> zc = algebra::center(z, family, r_max);

  std::vector<std::vector<T>> gram(n, std::vector<T>(n));
  std::vector<T> rhs(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      T g = algebra::inner_product(basis[i], basis[j], family, r_max);
      gram[i][j] = g;
      gram[j][i] = g;
    }
    rhs[i] = algebra::inner_product(basis[i], zc, family, r_max);
  }

  ProjectionResult<T> out;
  out.input = z;
  std::vector<T> coeff(n);
  if constexpr (std::is_same_v<T, Rational>) {
    auto sol = linalg::solve_consistent(gram, rhs);
    if (!sol)
      throw ConditioningError("conditional_expectation: inconsistent normal equations", 0.0);
    coeff = *sol;
  } else {
    Eigen::MatrixXd G(n, n);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) G(i, j) = gram[i][j];
      v(i) = rhs[i];
    }
    auto sol = linalg::solve_ridge(G, v);
    for (int i = 0; i < n; ++i) coeff[i] = sol.x[i];
    out.gram_condition = sol.condition;
    out.ridge = sol.ridge;
  }

  Polynomial<T> proj = Polynomial<T>::constant(algebra::trace(z, family, r_max));
  for (int i = 0; i < n; ++i) proj += coeff[i] * basis[i];
  out.projection = proj;
  T res_sq = algebra::norm2_sq(z - proj, family, r_max);
  out.residual_norm = std::sqrt(std::max(0.0, to_double(res_sq)));
  return out;
}

}  // namespace detail

// Conditional expectation proj_I(z): projection onto the degree-D polynomial
// span of the letters in I.  I may be empty (proj = tau(z) * 1).
template <class T>
ProjectionResult<T> conditional_expectation(const Polynomial<T>& z, std::vector<int> I, int D,
                                            const FreeFamily<T>& family,
                                            int r_max = kDefaultRMax) {
  if (D < z.degree())
    throw std::domain_error("conditional_expectation: D below deg(z)");
  std::sort(I.begin(), I.end());
  std::vector<Polynomial<T>> basis;
  if (!I.empty()) basis = algebra::monomial_basis(I, D, family, r_max);
  auto out = detail::project_onto(z, basis, family, r_max);
  out.subset = I;
  return out;
}

// Projection onto the degree-D polynomial span of s_m.
template <class T>
ProjectionResult<T> sum_projection(const Polynomial<T>& z, int m, int D,
                                   const FreeFamily<T>& family, int r_max = kDefaultRMax) {
  auto basis = algebra::sum_power_basis(m, D, family, r_max);
  auto out = detail::project_onto(z, basis, family, r_max);
  for (int i = 1; i <= m; ++i) out.subset.push_back(i);
  return out;
}

// Efron-Stein component z_I = sum_{J subseteq I} (-1)^{|I|-|J|} proj_J(z).
template <class T>
Polynomial<T> efron_stein_component(const Polynomial<T>& z, const std::vector<int>& I, int D,
                                    const FreeFamily<T>& family, int r_max = kDefaultRMax) {
  const int k = static_cast<int>(I.size());
  Polynomial<T> acc;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<int> J;
    for (int b = 0; b < k; ++b)
      if (mask & (1u << b)) J.push_back(I[b]);
    const int sign = ((k - static_cast<int>(J.size())) % 2 == 0) ? 1 : -1;
    Polynomial<T> pj;
    try {
      pj = conditional_expectation(z, J, D, family, r_max).projection;
    } catch (const ConditioningError& e) {
      std::string names;
      for (int j : J) names += std::to_string(j) + " ";
      throw ConditioningError("efron_stein_component: conditioning failure at J = { " + names + "}",
                              e.gram_condition);
    }
    acc += scalar_from_int<T>(sign) * pj;
  }
  return acc;
}

template <class T>
struct DecompositionReport {
  double max_coeff_deviation = 0.0;
  double l2_deviation = 0.0;
};

// Lemma check: proj_I(z) = sum_{J subseteq I} z_J.
template <class T>
DecompositionReport<T> verify_decomposition(const Polynomial<T>& z, const std::vector<int>& I,
                                            int D, const FreeFamily<T>& family,
                                            int r_max = kDefaultRMax) {
  Polynomial<T> lhs = conditional_expectation(z, I, D, family, r_max).projection;
  const int k = static_cast<int>(I.size());
  Polynomial<T> rhs;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<int> J;
    for (int b = 0; b < k; ++b)
      if (mask & (1u << b)) J.push_back(I[b]);
    rhs += efron_stein_component(z, J, D, family, r_max);
  }
  Polynomial<T> diff = lhs - rhs;
  DecompositionReport<T> rep;
  for (const auto& [w, c] : diff.terms())
    rep.max_coeff_deviation = std::max(rep.max_coeff_deviation, std::abs(to_double(c)));
  rep.l2_deviation = std::sqrt(std::max(0.0, to_double(algebra::norm2_sq(diff, family, r_max))));
  return rep;
}

template <class T>
struct OrthogonalityReport {
  double inner = 0.0;       // |<z_I, z_J>|
  double proj_norm = 0.0;   // ||proj_J(z_I)||_2
};

// Lemma check: for I \ J nonempty, proj_J(z_I) = 0, hence <z_I, z_J> = 0.
template <class T>
OrthogonalityReport<T> verify_orthogonality(const Polynomial<T>& z, const std::vector<int>& I,
                                            const std::vector<int>& J, int D,
                                            const FreeFamily<T>& family,
                                            int r_max = kDefaultRMax) {
  bool proper = false;
  for (int i : I)
    if (std::find(J.begin(), J.end(), i) == J.end()) proper = true;
  if (!proper) throw std::domain_error("verify_orthogonality: requires I \\ J nonempty");
  Polynomial<T> zI = efron_stein_component(z, I, D, family, r_max);
  Polynomial<T> zJ = efron_stein_component(z, J, D, family, r_max);
  OrthogonalityReport<T> rep;
  rep.inner = std::abs(to_double(algebra::inner_product(zI, zJ, family, r_max)));
  Polynomial<T> pj = conditional_expectation(zI, J, D, family, r_max).projection;
  rep.proj_norm = std::sqrt(std::max(0.0, to_double(algebra::norm2_sq(pj, family, r_max))));
  return rep;
}

// True iff p is invariant under every permutation of letters 1..n (checked on
// the generators: the adjacent transposition and the n-cycle).
template <class T>
bool is_symmetric(const Polynomial<T>& p, int n) {
  if (n <= 1) return true;
  std::vector<int> swap01(n + 1), cycle(n + 1);
  for (int i = 0; i <= n; ++i) swap01[i] = cycle[i] = i;
  std::swap(swap01[1], swap01[2]);
  for (int i = 1; i <= n; ++i) cycle[i] = i % n + 1;
  return p.relabel(swap01) == p && p.relabel(cycle) == p;
}

template <class T>
struct SymmetryBoundReport {
  double lhs = 0.0;              // ||proj_I(z)||_2
  double rhs = 0.0;              // sqrt(|I|/n) ||z||_2
  double exchange_deviation = 0.0;  // | ||z_I|| - ||z_{I'}|| |
};

// Proposition check: ||proj_I(z)||_2 <= sqrt(|I|/n) ||z||_2 for symmetric
// centered z; also checks ||z_I||_2 = ||z_{I'}||_2 with I' = {1..|I|}.
template <class T>
SymmetryBoundReport<T> verify_symmetry_bound(const Polynomial<T>& z, const std::vector<int>& I,
                                             int n, int D, const FreeFamily<T>& family,
                                             int r_max = kDefaultRMax) {
  if (!is_symmetric(z, n))
    throw std::domain_error("verify_symmetry_bound: z is not symmetric in letters 1..n");
  if (std::abs(to_double(algebra::trace(z, family, r_max))) > 1e-10)
    throw std::domain_error("verify_symmetry_bound: z is not centered");
  SymmetryBoundReport<T> rep;
  auto pr = conditional_expectation(z, I, D, family, r_max);
  rep.lhs = std::sqrt(std::max(0.0, to_double(algebra::norm2_sq(pr.projection, family, r_max))));
  rep.rhs = std::sqrt(static_cast<double>(I.size()) / n *
                      std::max(0.0, to_double(algebra::norm2_sq(z, family, r_max))));
  std::vector<int> Iprime;
  for (int i = 1; i <= static_cast<int>(I.size()); ++i) Iprime.push_back(i);
  double nI = to_double(
      algebra::norm2_sq(efron_stein_component(z, I, D, family, r_max), family, r_max));
  double nIp = to_double(
      algebra::norm2_sq(efron_stein_component(z, Iprime, D, family, r_max), family, r_max));
  rep.exchange_deviation = std::abs(std::sqrt(std::max(0.0, nI)) - std::sqrt(std::max(0.0, nIp)));
  return rep;
}

// Proposition check: proj_{L2(x_1..x_m)}(p(s_n)) = proj_{L2(s_m)}(p(s_n)).
// `p_coeffs` are the coefficients of p in s (p = sum p_coeffs[j] s^{j+1}).
template <class T>
double verify_sum_projection(const std::vector<T>& p_coeffs, int m, int n, int D,
                             const FreeFamily<T>& family, int r_max = kDefaultRMax) {
  if (m > n) throw std::domain_error("verify_sum_projection: requires m <= n");
  Polynomial<T> sn = algebra::expand_sum<T>(n), pw = Polynomial<T>::unit(), z;
  for (const T& c : p_coeffs) {
    pw = pw * sn;
    z += c * pw;
  }
  std::vector<int> I;
  for (int i = 1; i <= m; ++i) I.push_back(i);
  Polynomial<T> a = conditional_expectation(z, I, D, family, r_max).projection;
  Polynomial<T> b = sum_projection(z, m, D, family, r_max).projection;
  return std::sqrt(std::max(0.0, to_double(algebra::norm2_sq(a - b, family, r_max))));
}

}  // namespace freeprob::projections
