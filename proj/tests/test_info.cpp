#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "freeprob/info.hpp"

using namespace freeprob;
using namespace freeprob::info;
using transforms::Atomic;
using transforms::GridDensity;
using transforms::Measure;
using transforms::Semicircular;

namespace {

const double kChiSC = 0.5 * std::log(2.0 * M_PI * std::exp(1.0));        // 1.4189385
const double kChiUniform = std::log(2.0) - 0.75 + 0.5 * std::log(2.0 * M_PI);

GridDensity uniform_grid(double a, double b, int cells) {
  return GridDensity{a, b, std::vector<double>(cells, 1.0 / (b - a))};
}

MomentSequence<double> to_d(const MomentSequence<Rational>& m) {
  std::vector<double> v;
  for (const auto& x : m.m) v.push_back(to_double(x));
  return MomentSequence<double>{v};
}

// symmetric Bernoulli at +-1 free-convolved with Semicircular(0, t)
CumulantSequence<Rational> bern_sc(const Rational& t, int order) {
  auto k = moments::bernoulli_cumulants<Rational>(order);
  k.k[1] += t;
  return k;
}

}  // namespace

TEST_CASE("conjugate variable of the standard semicircular is z") {
  auto m = to_d(moments::cumulants_to_moments(
      moments::semicircular_cumulants<Rational>(Rational(0), Rational(1), 12)));
  for (int D : {1, 2, 4, 6}) {
    auto res = fisher_information(m, D);
    CHECK(res.phi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.conjugate_coeffs[1] == doctest::Approx(1.0).epsilon(1e-10));
    for (int k = 0; k <= D; ++k)
      if (k != 1) CHECK(std::abs(res.conjugate_coeffs[k]) < 1e-10);
    for (double r : res.residuals) CHECK(std::abs(r) < 1e-12);
    CHECK_FALSE(res.divergent);
    // tau(xi) = 0
    double tau_xi = 0.0;
    for (int k = 0; k <= D; ++k) tau_xi += res.conjugate_coeffs[k] * m.moment(k);
    CHECK(std::abs(tau_xi) < 1e-12);
  }
}

TEST_CASE("Fisher homogeneity: Phi(alpha z) = alpha^-2 Phi(z)") {
  auto m = to_d(moments::cumulants_to_moments(
      moments::uniform_cumulants<Rational>(Rational(-1), Rational(1), 8)));
  auto m2 = transforms::dilate_moments(m, 2.0);
  auto r1 = fisher_information(m, 4);
  auto r2 = fisher_information(m2, 4);
  CHECK(r2.phi == doctest::Approx(0.25 * r1.phi).epsilon(1e-9));
}

TEST_CASE("Fisher of dilated semicirculars") {
  for (double s2 : {1.0, 2.0, 0.5}) {
    auto m = transforms::moments_of(Semicircular{0.0, s2}, 12);
    for (int D : {1, 3, 6}) {
      auto res = fisher_information(m, D);
      CHECK(res.phi == doctest::Approx(1.0 / s2).epsilon(1e-10));
      for (double r : res.residuals) CHECK(std::abs(r) < 1e-12);
    }
  }
}

TEST_CASE("exact Fisher solve") {
  auto sc = moments::cumulants_to_moments(
      moments::semicircular_cumulants<Rational>(Rational(0), Rational(1), 12));
  for (int D : {1, 2, 3, 5}) {
    auto phi = fisher_information_exact(sc, D);
    REQUIRE(phi.has_value());
    CHECK(*phi == 1);
  }
  // atoms: D=1 sees only the variance, deeper systems are inconsistent
  auto bern = moments::cumulants_to_moments(moments::bernoulli_cumulants<Rational>(12));
  CHECK(*fisher_information_exact(bern, 1) == 1);
  CHECK_FALSE(fisher_information_exact(bern, 3).has_value());
  CHECK_THROWS_AS(fisher_information_exact(bern, 0), std::domain_error);
  CHECK_THROWS_AS(fisher_information_exact(bern, 7), std::domain_error);  // order < 2D
}

TEST_CASE("Phi_D is non-decreasing in D") {
  auto uni = to_d(moments::cumulants_to_moments(
      moments::uniform_cumulants<Rational>(Rational(-1), Rational(1), 20)));
  auto bsc = to_d(moments::cumulants_to_moments(bern_sc(make_rational(1, 2), 20)));
  for (const auto& m : {uni, bsc}) {
    auto res = fisher_information(m, 10);
    for (size_t d = 1; d < res.phi_by_degree.size(); ++d)
      CHECK(res.phi_by_degree[d] >= res.phi_by_degree[d - 1] - 1e-10);
  }
}

TEST_CASE("free Cramer-Rao: Phi >= 1/sigma^2, Phi_1 = 1/sigma^2") {
  auto uni = to_d(moments::cumulants_to_moments(
      moments::uniform_cumulants<Rational>(Rational(-1), Rational(1), 12)));
  auto r = fisher_information(uni, 6);
  CHECK(r.phi_by_degree[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(r.phi >= 3.0 - 1e-9);

  auto bsc = to_d(moments::cumulants_to_moments(bern_sc(make_rational(1, 2), 12)));
  auto rb = fisher_information(bsc, 6);
  CHECK(rb.phi_by_degree[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(rb.phi >= 2.0 / 3.0 - 1e-9);
  // equality case: the semicircular saturates the bound at every D
  auto sc = transforms::moments_of(Semicircular{0.0, 1.0}, 12);
  CHECK(fisher_information(sc, 6).phi == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fisher_information guards") {
  auto m = transforms::moments_of(Semicircular{0.0, 1.0}, 6);
  CHECK_THROWS_AS(fisher_information(m, 0), std::domain_error);
  CHECK_THROWS_AS(fisher_information(m, 4), std::domain_error);  // order < 2D
}

TEST_CASE("free entropy of the named measures") {
  CHECK(free_entropy(Measure{Semicircular{0.0, 1.0}}) == doctest::Approx(kChiSC).epsilon(1e-4));
  CHECK(free_entropy(Measure{uniform_grid(-1.0, 1.0, 2000)}) ==
        doctest::Approx(kChiUniform).epsilon(1e-6));
  CHECK(free_entropy(Measure{Atomic{{{-1.0, 0.5}, {1.0, 0.5}}}}) ==
        -std::numeric_limits<double>::infinity());
  // unnormalized density (mass 2)
  CHECK_THROWS_AS(free_entropy(Measure{GridDensity{-1.0, 1.0, std::vector<double>(100, 1.0)}}),
                  std::domain_error);
}

TEST_CASE("entropy is shift invariant") {
  double chi0 = free_entropy(Measure{uniform_grid(-1.0, 1.0, 1500)});
  double chi1 = free_entropy(Measure{uniform_grid(9.0, 11.0, 1500)});
  CHECK(chi1 == doctest::Approx(chi0).epsilon(1e-6));
}

TEST_CASE("semicircular maximality at fixed variance") {
  CHECK(free_entropy(Measure{uniform_grid(-1.0, 1.0, 2000)}) <
        free_entropy(Measure{Semicircular{0.0, 1.0 / 3.0}}));
  // arcsine vs Semicircular(0,2)
  auto k = moments::moments_to_cumulants(
      transforms::free_power(Measure{Atomic{{{-1.0, 0.5}, {1.0, 0.5}}}}, 2, 16));
  auto arc = transforms::density_from_cumulants(k.k, 2000);
  CHECK(free_entropy(Measure{arc.density}) < free_entropy(Measure{Semicircular{0.0, 2.0}}));
}

TEST_CASE("entropy via the Fisher integral: semicircular is exact") {
  auto sc = moments::semicircular_cumulants<Rational>(Rational(0), Rational(1), 8);
  CHECK(entropy_via_fisher(sc, 3) == doctest::Approx(kChiSC).epsilon(1e-6));
}

TEST_CASE("entropy via the Fisher integral: uniform cross-validates") {
  auto u = moments::uniform_cumulants<Rational>(Rational(-1), Rational(1), 16);
  double evf = entropy_via_fisher(u, 8);
  double direct = free_entropy(Measure{uniform_grid(-1.0, 1.0, 2000)});
  CHECK(evf == doctest::Approx(direct).epsilon(5e-3));
}

TEST_CASE("entropy via the Fisher integral: free binomial cross-validates") {
  auto k = bern_sc(make_rational(1, 4), 20);
  double evf = entropy_via_fisher(k, 10);
  std::vector<double> kd;
  for (const auto& v : k.k) kd.push_back(to_double(v));
  auto rec = transforms::density_from_cumulants(kd, 2000);
  CHECK(evf == doctest::Approx(free_entropy(Measure{rec.density})).epsilon(1e-2));
}

TEST_CASE("entropy_via_fisher guards") {
  auto sc = moments::semicircular_cumulants<Rational>(Rational(0), Rational(1), 8);
  CHECK_THROWS_AS(entropy_via_fisher(sc, 5), std::domain_error);  // order < 2D
  auto flat = moments::point_mass_cumulants<Rational>(Rational(0), 8);
  CHECK_THROWS_AS(entropy_via_fisher(flat, 2), std::domain_error);  // kappa_2 = 0
}

TEST_CASE("monotonicity: the semicircular is the fixed point") {
  auto sc = moments::semicircular_cumulants<Rational>(Rational(0), Rational(1), 16);
  auto rep = monotonicity_report(sc, 4, 4, 12, 1000, "semicircular");
  CHECK(rep.chi_nondecreasing);
  CHECK(rep.phi_nonincreasing);
  for (const auto& row : rep.rows) {
    CHECK(row.phi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.chi == doctest::Approx(kChiSC).epsilon(1e-4));
  }
}

TEST_CASE("monotonicity: Bernoulli boxplus Semicircular(0, 1/2) is strict") {
  auto rep = monotonicity_report(bern_sc(make_rational(1, 2), 16), 6, 8, 16, 2000, "bern+sc");
  CHECK(rep.chi_nondecreasing);
  CHECK(rep.phi_nonincreasing);
  for (size_t i = 1; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].chi > rep.rows[i - 1].chi + 1e-4);
    CHECK(rep.rows[i].phi < rep.rows[i - 1].phi - 1e-3);
  }
}

TEST_CASE("monotonicity: Bernoulli starts atomic") {
  auto rep = monotonicity_report(moments::bernoulli_cumulants<Rational>(16), 6, 8, 16, 2000,
                                 "bernoulli");
  CHECK_FALSE(rep.rows[0].chi_finite);
  CHECK_FALSE(rep.rows[0].phi_finite);
  CHECK(rep.rows[0].chi == -std::numeric_limits<double>::infinity());
  CHECK(rep.chi_nondecreasing);
  CHECK(rep.phi_nonincreasing);
  for (size_t i = 3; i < rep.rows.size(); ++i) {
    CHECK(rep.rows[i].chi_finite);
    CHECK(rep.rows[i].chi > rep.rows[i - 1].chi);
    CHECK(rep.rows[i].phi < rep.rows[i - 1].phi);
  }
}

TEST_CASE("intermediate inequality Phi(s_n) <= (m/n) Phi(s_m)") {
  auto kappa = bern_sc(make_rational(1, 2), 16);
  std::vector<double> phi(5, 0.0);
  for (int n = 1; n <= 4; ++n) {
    auto kn = kappa;
    for (auto& v : kn.k) v *= n;
    auto p = fisher_information_exact(moments::cumulants_to_moments(kn), 8);
    REQUIRE(p.has_value());
    phi[n] = to_double(*p);
  }
  for (int m = 1; m <= 4; ++m)
    for (int n = m; n <= 4; ++n) CHECK(phi[n] <= (double(m) / n) * phi[m] + 1e-12);
}
