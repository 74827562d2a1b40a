#include "freeprob/transforms.hpp"

#include <cmath>
#include <complex>

namespace freeprob::transforms {

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : rho) s += v;
  return s * h();
}

void GridDensity::normalize() {
  double m = mass();
  if (m <= 0) throw std::domain_error("GridDensity: nonpositive mass");
  for (double& v : rho) v /= m;
}

double total_mass(const Measure& mu) {
  return std::visit(
      [](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Atomic>) {
          double s = 0.0;
          for (auto& [t, w] : v.atoms) s += w;
          return s;
        } else if constexpr (std::is_same_v<V, GridDensity>) {
          return v.mass();
        } else {
          return 1.0;
        }
      },
      mu);
}

bool has_density(const Measure& mu) { return !std::holds_alternative<Atomic>(mu); }

MomentSequence<double> moments_of(const Measure& mu, int N) {
  std::vector<double> m(N, 0.0);
  if (const auto* a = std::get_if<Atomic>(&mu)) {
    for (auto& [t, w] : a->atoms) {
      double p = 1.0;
      for (int r = 1; r <= N; ++r) {
        p *= t;
        m[r - 1] += w * p;
      }
    }
  } else if (const auto* g = std::get_if<GridDensity>(&mu)) {
    const double h = g->h();
    // exact integration of t^r against the piecewise-constant density
    for (size_t i = 0; i < g->rho.size(); ++i) {
      const double t0 = g->a + i * h, t1 = t0 + h;
      double p0 = t0, p1 = t1;
      for (int r = 1; r <= N; ++r) {
        p0 *= t0;
        p1 *= t1;
        m[r - 1] += g->rho[i] * (p1 - p0) / (r + 1);
      }
    }
  } else {
    const auto& s = std::get<Semicircular>(mu);
    // central moments: m_{2k} = var^k C_k, shifted by the mean
    std::vector<double> central(N + 1, 0.0);
    central[0] = 1.0;
    for (int r = 2; r <= N; r += 2) central[r] = std::pow(s.variance, r / 2) * catalan(r / 2);
    for (int r = 1; r <= N; ++r) {
      double acc = 0.0;
      for (int j = 0; j <= r; ++j) {
        double b = 1.0;
        for (int t = 0; t < j; ++t) b = b * (r - t) / (t + 1);
        acc += b * central[j] * std::pow(s.mean, r - j);
      }
      m[r - 1] = acc;
    }
  }
  return MomentSequence<double>{std::move(m)};
}

Measure dilate(const Measure& mu, double alpha) {
  if (alpha <= 0) throw std::domain_error("dilate: alpha must be positive");
  return std::visit(
      [&](const auto& v) -> Measure {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Atomic>) {
          Atomic out = v;
          for (auto& [t, w] : out.atoms) t *= alpha;
          return out;
        } else if constexpr (std::is_same_v<V, GridDensity>) {
          GridDensity out = v;
          out.a *= alpha;
          out.b *= alpha;
          for (double& d : out.rho) d /= alpha;
          return out;
        } else {
          return Semicircular{v.mean * alpha, v.variance * alpha * alpha};
        }
      },
      mu);
}

MomentSequence<double> free_convolve(const Measure& mu, const Measure& nu, int N) {
  return free_convolve(moments_of(mu, N), moments_of(nu, N));
}

MomentSequence<double> free_power(const Measure& mu, int n, int N) {
  return free_power(moments_of(mu, N), n);
}

namespace {

using Cplx = std::complex<double>;

// Three-term recurrence (Jacobi) coefficients of the measure with the given
// moments: G(z) = 1 / (z - a_0 - b_1 / (z - a_1 - b_2 / ...)) with b_k the
// *squared* off-diagonal entries.  A chain that terminates (b_k = 0) belongs
// to an atomic measure with k atoms.
struct JacobiChain {
  std::vector<double> a;
  std::vector<double> b;  // b[k] = b_{k+1}^2 > 0
  bool finite = false;    // exactly atomic: no tail beyond a.size() levels
};

// Chebyshev algorithm run in exact rational arithmetic (the double-precision
// version loses all digits well before depth 8).
JacobiChain jacobi_chain(const std::vector<double>& kappa) {
  std::vector<Rational> kq;
  kq.reserve(kappa.size());
  for (double k : kappa) kq.emplace_back(k);  // double -> mpq is exact
  auto mom = moments::cumulants_to_moments(moments::CumulantSequence<Rational>{kq});
  const int n = static_cast<int>(kappa.size()) / 2;

  std::vector<Rational> mu(2 * n);
  mu[0] = 1;
  for (int l = 1; l < 2 * n; ++l) mu[l] = mom.moment(l);

  JacobiChain out;
  std::vector<Rational> prev(2 * n, Rational(0)), cur = mu;
  std::vector<Rational> alpha{mom.moment(1)}, beta;  // beta[k] = b_{k+1}^2
  for (int k = 1; k < n; ++k) {
    std::vector<Rational> next(2 * n, Rational(0));
    for (int l = k; l <= 2 * n - k - 1; ++l)
      next[l] = cur[l + 1] - alpha[k - 1] * cur[l] -
                (k >= 2 ? beta[k - 2] * prev[l] : Rational(0));
    if (next[k] == 0) {
      out.finite = true;
      break;
    }
    Rational b = next[k] / cur[k - 1];
    if (b < 0)
      throw NumericalError("density_from_cumulants: moment data is not positive definite");
    beta.push_back(std::move(b));
    alpha.push_back(next[k + 1] / next[k] - cur[k] / cur[k - 1]);
    prev = std::move(cur);
    cur = std::move(next);
  }
  for (const auto& v : alpha) out.a.push_back(to_double(v));
  for (const auto& v : beta) out.b.push_back(to_double(v));
  return out;
}

// Cauchy transform of the chain measure: finite chains evaluate exactly; an
// infinite tail is closed with the period-2 periodic terminator built from the
// deepest computed levels.  Exact for constant tails (arcsine) and for the
// alternating tails of symmetric two-band measures (Bernoulli plus a small
// semicircular); one-band measures with convergent coefficients are the
// period-1 special case.
Cplx jacobi_G(Cplx z, const JacobiChain& c) {
  const int L = static_cast<int>(c.a.size());
  const int m = static_cast<int>(c.b.size());
  // periodic continuation of the unknown coefficients
  auto a_at = [&](int j) { return j < L ? c.a[j] : c.a[L - 1 - ((j - L) & 1 ? 0 : 1)]; };
  auto b_at = [&](int j) { return j < m ? c.b[j] : (m >= 2 ? c.b[m - 2 + ((j - m) & 1)] : c.b[0]); };
  Cplx g(0.0, 0.0);
  if (!c.finite && m > 0) {
    // fixed point of g = 1/(w1 - b1/(w2 - b2 g)) with the tail's alternating
    // pair: b2 w1 g^2 - (w1 w2 - b1 + b2) g + w2 = 0, Herglotz root
    const Cplx w1 = z - a_at(L), w2 = z - a_at(L + 1);
    const double b1 = b_at(L), b2 = b_at(L + 1);
    const Cplx A = b2 * w1, B = -(w1 * w2 - b1 + b2), C = w2;
    const Cplx s = std::sqrt(B * B - 4.0 * A * C);
    const Cplx r1 = (-B + s) / (2.0 * A), r2 = (-B - s) / (2.0 * A);
    const bool n1 = r1.imag() < 0.0, n2 = r2.imag() < 0.0;
    if (n1 != n2)
      g = n1 ? r1 : r2;
    else
      g = std::abs(r1) < std::abs(r2) ? r1 : r2;  // decaying root off the bands
  }
  for (int k = L - 1; k >= 0; --k) {
    const double bk = c.finite && k >= m ? 0.0 : b_at(k);
    g = 1.0 / (z - c.a[k] - bk * g);
  }
  return g;
}

}  // namespace

DensityRecovery density_from_cumulants(const std::vector<double>& kappa, int grid_points,
                                       const std::vector<double>& eps_sequence) {
  if (kappa.size() < 2 || kappa[1] <= 0)
    throw std::domain_error("density_from_cumulants: kappa_2 must be positive");
  if (eps_sequence.size() < 2)
    throw std::domain_error("density_from_cumulants: need at least two epsilon levels");
  for (size_t e = 1; e < eps_sequence.size(); ++e)
    if (eps_sequence[e] >= eps_sequence[e - 1])
      throw std::domain_error("density_from_cumulants: epsilon levels must decrease");
  if (kappa.size() < 4)
    throw std::domain_error("density_from_cumulants: need at least four cumulants");
  const double k1 = kappa[0], k2 = kappa[1];
  double half = 2.0 * std::sqrt(k2 * static_cast<double>(kappa.size()));
  const JacobiChain chain = jacobi_chain(kappa);
  // a terminating recurrence belongs to a finite atomic measure: no density
  if (chain.finite)
    throw AtomicSpectrumError("density_from_cumulants: moment data is purely atomic");

  DensityRecovery out;
  for (int expansion = 0;; ++expansion) {
    if (expansion > 20)
      throw NumericalError("density_from_cumulants: support window failed the mass check");
    const double a = k1 - half, b = k1 + half;
    const double h = (b - a) / grid_points;

    // one density profile per epsilon level, oversampled so that a cell holds
    // its average (integrable edge singularities would overshoot at midpoints)
    constexpr int kOver = 4;
    const int fine = grid_points * kOver;
    std::vector<std::vector<double>> levels(eps_sequence.size(), std::vector<double>(fine));
    for (int i = 0; i < fine; ++i) {
      const double t = a + (i + 0.5) * h / kOver;
      for (size_t e = 0; e < eps_sequence.size(); ++e)
        levels[e][i] = -jacobi_G(Cplx(t, eps_sequence[e]), chain).imag() / M_PI;
    }

    // atom signature: peak density doubling as eps halves
    double peak_first = 0.0, peak_last = 0.0;
    for (int i = 0; i < fine; ++i) {
      peak_first = std::max(peak_first, levels.front()[i]);
      peak_last = std::max(peak_last, levels.back()[i]);
    }
    const double eps_ratio = eps_sequence.front() / eps_sequence.back();
    if (peak_last > peak_first * 0.85 * eps_ratio)
      throw AtomicSpectrumError("density_from_cumulants: Im G diverges as eps -> 0 (atom)");

    // Richardson extrapolation: the Poisson smoothing error expands in powers
    // of eps, so stage l cancels the eps^l term.
    for (size_t lvl = 1; lvl < levels.size(); ++lvl) {
      for (size_t e = 0; e + lvl < levels.size(); ++e) {
        const double r = eps_sequence[e] / eps_sequence[e + 1];
        const double f = std::pow(r, static_cast<double>(lvl));
        for (int i = 0; i < fine; ++i)
          levels[e][i] = (f * levels[e + 1][i] - levels[e][i]) / (f - 1.0);
      }
    }

    std::vector<double> rho(grid_points, 0.0);
    for (int i = 0; i < fine; ++i) rho[i / kOver] += levels[0][i] / kOver;
    GridDensity dens{a, b, std::move(rho)};
    double clamped = 0.0;
    for (double& v : dens.rho)
      if (v < 0) {
        clamped += -v * h;
        v = 0.0;
      }
    const double mass = dens.mass();
    if (mass < 0.999) {
      half *= 1.2;
      continue;
    }
    out.window_expansions = expansion;
    out.clamp_delta = clamped;
    out.mass_delta = std::abs(mass - 1.0);
    if (out.mass_delta > 1e-3 + clamped)
      throw NumericalError("density_from_cumulants: recovered mass " + std::to_string(mass) +
                           " outside tolerance");
    dens.normalize();
    out.density = std::move(dens);
    out.eps_final = eps_sequence.back();
    return out;
  }
}

}  // namespace freeprob::transforms
