#include "freeprob/info.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "freeprob/linalg.hpp"

namespace freeprob::info {

namespace {

// Hankel Gram H[i][j] = m_{i+j}, i,j = 0..D.
Eigen::MatrixXd hankel(const MomentSequence<double>& m, int D) {
  Eigen::MatrixXd H(D + 1, D + 1);
  for (int i = 0; i <= D; ++i)
    for (int j = 0; j <= D; ++j) H(i, j) = m.moment(i + j);
  return H;
}

Eigen::VectorXd conjugate_rhs(const MomentSequence<double>& m, int D) {
  Eigen::VectorXd rhs(D + 1);
  for (int i = 0; i <= D; ++i) {
    double s = 0.0;
    for (int k = 0; k < i; ++k) s += m.moment(k) * m.moment(i - 1 - k);
    rhs(i) = s;
  }
  return rhs;
}

// Floored pseudo-inverse solve; returns (c, rank_deficient).
std::pair<Eigen::VectorXd, bool> solve_floored(const Eigen::MatrixXd& H,
                                               const Eigen::VectorXd& rhs, double floor_rel) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const double floor = std::max(floor_rel * std::abs(H.trace()), 1e-300);
  Eigen::VectorXd y = es.eigenvectors().transpose() * rhs;
  bool deficient = false;
  for (int i = 0; i < y.size(); ++i) {
    if (es.eigenvalues()(i) > floor)
      y(i) /= es.eigenvalues()(i);
    else {
      y(i) = 0.0;
      deficient = true;
    }
  }
  return {es.eigenvectors() * y, deficient};
}

}  // namespace

FisherResult fisher_information(const MomentSequence<double>& m, int D, double floor_rel,
                                double growth_cap) {
  if (D < 1) throw std::domain_error("fisher_information: D must be >= 1");
  if (m.order() < 2 * D) throw std::domain_error("fisher_information: need moments to order 2D");
  FisherResult out;
  out.D = D;
  bool any_deficient = false;
  for (int d = 1; d <= D; ++d) {
    Eigen::MatrixXd H = hankel(m, d);
    Eigen::VectorXd rhs = conjugate_rhs(m, d);
    auto [c, deficient] = solve_floored(H, rhs, floor_rel);
    any_deficient = any_deficient || deficient;
    const double phi = c.dot(H * c);
    out.phi_by_degree.push_back(phi);
    if (d == D) {
      out.conjugate_coeffs.assign(c.data(), c.data() + d + 1);
      out.phi = phi;
      Eigen::VectorXd res = H * c - rhs;
      out.residuals.assign(res.data(), res.data() + d + 1);
      const double res_scale = std::max(1.0, rhs.norm());
      out.rank_deficient = any_deficient;
      if (D >= 2 && out.phi_by_degree[D - 2] > 0)
        out.growth_ratio = phi / out.phi_by_degree[D - 2];
      out.divergent = out.growth_ratio > growth_cap ||
                      (any_deficient && res.norm() > 1e-8 * res_scale);
    }
  }
  return out;
}

std::optional<Rational> fisher_information_exact(const MomentSequence<Rational>& m, int D) {
  if (D < 1) throw std::domain_error("fisher_information_exact: D must be >= 1");
  if (m.order() < 2 * D)
    throw std::domain_error("fisher_information_exact: need moments to order 2D");
  linalg::Mat<Rational> H(D + 1, std::vector<Rational>(D + 1));
  std::vector<Rational> rhs(D + 1, Rational(0));
  for (int i = 0; i <= D; ++i) {
    for (int j = 0; j <= D; ++j) H[i][j] = m.moment(i + j);
    for (int k = 0; k < i; ++k) rhs[i] += m.moment(k) * m.moment(i - 1 - k);
  }
  auto c = linalg::solve_consistent(H, rhs);
  if (!c) return std::nullopt;
  // residual check (solve_consistent can return a least-structure solution
  // only for consistent systems, so this is exactness bookkeeping)
  Rational phi(0);
  for (int i = 0; i <= D; ++i) phi += (*c)[i] * rhs[i];
  return phi;
}

double log_energy(const transforms::GridDensity& g) {
  const int G = static_cast<int>(g.rho.size());
  const double h = g.h();
  // phi'' = log|u|; the second difference integrates log|a-b| exactly over a
  // cell pair at distance d cells.
  auto phi = [](double u) {
    if (u == 0.0) return 0.0;
    return u * u * (0.5 * std::log(std::abs(u)) - 0.75);
  };
  std::vector<double> psi(G);
  for (int d = 0; d < G; ++d) {
    const double delta = d * h;
    psi[d] = phi(delta + h) - 2.0 * phi(delta) + phi(delta - h);
  }
  double E = 0.0;
  for (int d = 0; d < G; ++d) {
    double corr = 0.0;
    for (int i = 0; i + d < G; ++i) corr += g.rho[i] * g.rho[i + d];
    E += (d == 0 ? 1.0 : 2.0) * corr * psi[d];
  }
  return E;
}

double free_entropy(const transforms::Measure& mu) {
  const double mass = transforms::total_mass(mu);
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::domain_error("free_entropy: measure is not normalized");
  constexpr double kConst = 0.75;  // + log(2 pi)/2 added below
  if (std::holds_alternative<transforms::Atomic>(mu))
    return -std::numeric_limits<double>::infinity();
  if (const auto* g = std::get_if<transforms::GridDensity>(&mu))
    return log_energy(*g) + kConst + 0.5 * std::log(2.0 * M_PI);
  const auto& s = std::get<transforms::Semicircular>(mu);
  // sample the closed-form density on a fine grid
  const double rad = 2.0 * std::sqrt(s.variance);
  const int G = 8000;
  transforms::GridDensity g{s.mean - rad, s.mean + rad, std::vector<double>(G)};
  for (int i = 0; i < G; ++i) {
    const double t = g.cell_mid(i) - s.mean;
    const double v = 4.0 * s.variance - t * t;
    g.rho[i] = v > 0 ? std::sqrt(v) / (2.0 * M_PI * s.variance) : 0.0;
  }
  g.normalize();
  return log_energy(g) + kConst + 0.5 * std::log(2.0 * M_PI);
}

namespace {

// Integrand of the Fisher representation at heat-flow time t (t dyadic, so
// the exact-rational moment pipeline stays cheap).
double fisher_integrand(double t, const CumulantSequence<Rational>& kappa, int D) {
  CumulantSequence<Rational> kt = kappa;
  kt.k[1] += Rational(t);
  auto m = moments::cumulants_to_moments(kt);
  auto phi = fisher_information_exact(m, D);
  if (!phi)
    throw NumericalError("entropy_via_fisher: Fisher solve failed at t = " + std::to_string(t));
  return 1.0 / (1.0 + t) - to_double(*phi);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int depth = 14) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace

double entropy_via_fisher(const CumulantSequence<Rational>& kappa, int D, double t_max,
                          double quad_tol) {
  if (kappa.order() < 2 * D)
    throw std::domain_error("entropy_via_fisher: cumulant order below 2D");
  const double sigma2 = to_double(kappa.cumulant(2));
  if (sigma2 <= 0) throw std::domain_error("entropy_via_fisher: kappa_2 must be positive");
  auto f = [&](double t) { return fisher_integrand(t, kappa, D); };
  // split at 1 so the quadrature spends its effort near t = 0
  double integral = integrate(f, 0.0, 1.0, quad_tol / 2.0) +
                    integrate(f, 1.0, t_max, quad_tol / 2.0);
  // tail: Phi(z + sqrt(t) x) ~ 1/(sigma^2 + t)
  const double tail = std::log((sigma2 + t_max) / (1.0 + t_max));
  return 0.5 * (integral + tail) + 0.5 * std::log(2.0 * M_PI * std::exp(1.0));
}

MonotonicityReport monotonicity_report(const CumulantSequence<Rational>& kappa, int n_max, int D,
                                       int N, int grid, const std::string& measure_id) {
  if (kappa.order() < std::max(N, 2 * D))
    throw std::domain_error("monotonicity_report: cumulant order too small");
  MonotonicityReport rep;
  rep.measure_id = measure_id;
  rep.D = D;
  rep.N = N;
  rep.grid = grid;
  for (int n = 1; n <= n_max; ++n) {
    MonotonicityRow row;
    row.n = n;
    // Phi(s_n / sqrt n) = n * Phi(s_n) by homogeneity, computed exactly.
    CumulantSequence<Rational> kn = kappa;
    for (auto& v : kn.k) v *= n;
    auto m = moments::cumulants_to_moments(kn);
    auto phiD = fisher_information_exact(m, D);
    auto phiDm1 = D >= 2 ? fisher_information_exact(m, D - 1) : phiD;
    if (!phiD || !phiDm1) {
      row.phi_finite = false;
    } else {
      row.phi = n * to_double(*phiD);
      if (to_double(*phiDm1) > 0) row.phi_growth = to_double(*phiD) / to_double(*phiDm1);
      if (row.phi_growth > 1.1) row.phi_finite = false;
    }
    // chi of the n^{-1/2} rescaled free power via density recovery.
    std::vector<double> kresc(N);
    for (int r = 1; r <= N; ++r)
      kresc[r - 1] = std::pow(static_cast<double>(n), 1.0 - 0.5 * r) * to_double(kappa.cumulant(r));
    try {
      auto rec = transforms::density_from_cumulants(kresc, grid);
      row.chi = free_entropy(transforms::Measure{rec.density});
    } catch (const AtomicSpectrumError&) {
      row.chi = -std::numeric_limits<double>::infinity();
      row.chi_finite = false;
    }
    rep.rows.push_back(row);
  }
  for (size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& prev = rep.rows[i - 1];
    const auto& cur = rep.rows[i];
    const double chi_prev = prev.chi_finite ? prev.chi : -std::numeric_limits<double>::infinity();
    const double chi_cur = cur.chi_finite ? cur.chi : -std::numeric_limits<double>::infinity();
    if (chi_cur < chi_prev - 1e-8) rep.chi_nondecreasing = false;
    const double phi_prev = prev.phi_finite ? prev.phi : std::numeric_limits<double>::infinity();
    const double phi_cur = cur.phi_finite ? cur.phi : std::numeric_limits<double>::infinity();
    if (phi_cur > phi_prev + 1e-8) rep.phi_nonincreasing = false;
  }
  return rep;
}

}  // namespace freeprob::info
