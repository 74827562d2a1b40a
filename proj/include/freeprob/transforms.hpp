#pragma once

#include <variant>
#include <vector>

#include "freeprob/moments.hpp"

namespace freeprob::transforms {

using moments::CumulantSequence;
using moments::MomentSequence;

struct Atomic {
  std::vector<std::pair<double, double>> atoms;  // (location, weight)
};

// Piecewise-constant density on a uniform grid of cells over [a, b];
// rho[i] is the value on cell i (midpoint convention).
struct GridDensity {
  double a = 0.0, b = 0.0;
  std::vector<double> rho;

  double h() const { return (b - a) / static_cast<double>(rho.size()); }
  double cell_mid(size_t i) const { return a + (static_cast<double>(i) + 0.5) * h(); }
  double mass() const;
  void normalize();
};

struct Semicircular {
  double mean = 0.0;
  double variance = 1.0;
};

using Measure = std::variant<Atomic, GridDensity, Semicircular>;

double total_mass(const Measure& mu);
bool has_density(const Measure& mu);

// int t^r mu(dt), r = 1..N: exact sums for Atomic, cell quadrature for
// GridDensity, Catalan closed form for Semicircular.
MomentSequence<double> moments_of(const Measure& mu, int N);

// Pushforward by t -> alpha * t.
Measure dilate(const Measure& mu, double alpha);

template <class T>
MomentSequence<T> dilate_moments(const MomentSequence<T>& m, const T& alpha) {
  MomentSequence<T> out = m;
  T p(1);
  for (int r = 1; r <= m.order(); ++r) {
    p *= alpha;
    out.m[r - 1] *= p;
  }
  return out;
}

// Free additive convolution via cumulant additivity.
template <class T>
MomentSequence<T> free_convolve(const MomentSequence<T>& a, const MomentSequence<T>& b) {
  const int N = std::min(a.order(), b.order());
  auto ka = moments::moments_to_cumulants(MomentSequence<T>{std::vector<T>(a.m.begin(), a.m.begin() + N)});
  auto kb = moments::moments_to_cumulants(MomentSequence<T>{std::vector<T>(b.m.begin(), b.m.begin() + N)});
  for (int r = 0; r < N; ++r) ka.k[r] += kb.k[r];
  return moments::cumulants_to_moments(ka);
}

template <class T>
MomentSequence<T> free_power(const MomentSequence<T>& a, int n) {
  if (n < 1) throw std::domain_error("free_power: n must be >= 1");
  auto k = moments::moments_to_cumulants(a);
  for (auto& v : k.k) v *= scalar_from_int<T>(n);
  return moments::cumulants_to_moments(k);
}

MomentSequence<double> free_convolve(const Measure& mu, const Measure& nu, int N);
MomentSequence<double> free_power(const Measure& mu, int n, int N);

struct DensityRecovery {
  GridDensity density;
  double mass_delta = 0.0;        // renormalization applied
  double clamp_delta = 0.0;       // negative mass clamped to zero
  int window_expansions = 0;
  double eps_final = 0.0;
};

// Recovers the density of the measure with free cumulants `kappa`: the Cauchy
// transform is evaluated through the three-term recurrence (Jacobi) chain of
// the moment data, computed exactly in rational arithmetic and closed with a
// semicircular tail, then inverted by Stieltjes inversion with Richardson
// extrapolation over the epsilon sequence.  Throws AtomicSpectrumError for
// purely atomic data (terminating chain or diverging Im G) and NumericalError
// when the recovered mass fails its tolerance.
DensityRecovery density_from_cumulants(
    const std::vector<double>& kappa, int grid_points = 2000,
    const std::vector<double>& eps_sequence = {1e-2, 5e-3, 2.5e-3});

}  // namespace freeprob::transforms
