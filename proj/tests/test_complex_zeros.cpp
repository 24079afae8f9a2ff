#include <doctest.h>

#include <cmath>

#include "randzeros/complex_zeros.hpp"
#include "randzeros/mc_oracle.hpp"
#include "randzeros/numerics.hpp"

using namespace rz;

TEST_CASE("entire functions of given order and type") {
  for (double rho : {0.5, 1.0, 2.0, 3.5})
    for (double tau : {0.25, 1.0, 4.0})
      for (double r : {0.1, 1.0, 2.5}) {
        CHECK(radial_count(VarianceGeneratingFunction::entire_order_type(rho, tau), r) ==
              doctest::Approx(tau * rho * std::pow(r, rho)).epsilon(1e-13));
        CHECK(radial_density(VarianceGeneratingFunction::entire_order_type(rho, tau), r) ==
              doctest::Approx(tau * rho * rho * std::pow(r, rho - 1)).epsilon(1e-13));
      }
  CHECK_THROWS_AS(VarianceGeneratingFunction::entire_order_type(0, 1), DomainError);
}

TEST_CASE("polynomial families") {
  for (int n : {1, 5, 20, 200}) {
    CAPTURE(n);
    const auto kac = VarianceGeneratingFunction::kac_complex(n);
    CHECK(radial_count(kac, 1.0) == doctest::Approx(n / 2.0).epsilon(1e-12));
    CHECK(std::abs(radial_count(kac, 1e6) - n) < 1e-6);
    CHECK(radial_count(kac, 0.0) == 0.0);
    const auto kos = VarianceGeneratingFunction::kostlan_complex(n);
    for (double r : {0.2, 1.0, 3.0}) CHECK(radial_count(kos, r) == doctest::Approx(n * r * r / (1 + r * r)).epsilon(1e-12));
    // Inversion symmetry z → 1/z: n(r) + n(1/r) = n for Kac.
    for (double r : {0.3, 0.8, 0.99}) CHECK(radial_count(kac, r) + radial_count(kac, 1 / r) == doctest::Approx(n).epsilon(1e-12));
  }
  // Zeros of large Kac polynomials crowd the unit circle.
  const auto kac50 = VarianceGeneratingFunction::kac_complex(50);
  double best_r = 0, best = 0;
  for (int i = 1; i < 400; ++i) {
    const double r = i * 0.005;
    const double d = radial_density(kac50, r);
    if (d > best) best = d, best_r = r;
  }
  CHECK(best_r >= 0.9);
  CHECK(best_r <= 1.1);
  CHECK(radial_count(kac50, 0.5) < 1.1);
}

TEST_CASE("custom variance sequences") {
  auto inv_fact = VarianceGeneratingFunction::custom([](int k) { return std::exp(-std::lgamma(k + 1.0)); });
  for (double r : {0.1, 1.0, 3.0, 7.0}) {
    CHECK(radial_count(inv_fact, r) == doctest::Approx(r * r).epsilon(1e-10));
    CHECK(radial_density(inv_fact, r) == doctest::Approx(2 * r).epsilon(1e-9));
  }
  // Geometric series φ = 1/(1 − z): n(r) = r²/(1 − r²) inside the unit disc.
  auto geom = VarianceGeneratingFunction::custom([](int) { return 1.0; }, 1.0);
  for (double r : {0.2, 0.6, 0.9}) CHECK(radial_count(geom, r) == doctest::Approx(r * r / (1 - r * r)).epsilon(1e-10));
  CHECK_THROWS_AS(radial_count(geom, 1.0), DomainError);
  auto finite = VarianceGeneratingFunction::custom(std::vector<double>{1, 1, 1, 1});
  const auto kac3 = VarianceGeneratingFunction::kac_complex(3);
  for (double r : {0.5, 1.3}) CHECK(radial_count(finite, r) == doctest::Approx(radial_count(kac3, r)).epsilon(1e-14));
  CHECK(finite.degree() == 3);
  CHECK(geom.degree() == -1);
}

TEST_CASE("radial counts are nondecreasing and integrate their density") {
  const std::vector<VarianceGeneratingFunction> fs = {
      VarianceGeneratingFunction::kac_complex(12), VarianceGeneratingFunction::kostlan_complex(7),
      VarianceGeneratingFunction::entire_order_type(1.5, 0.7),
      VarianceGeneratingFunction::custom(std::vector<double>{2.0, 0.5, 0.0, 3.0})};
  for (const auto& f : fs) {
    CAPTURE(f.name());
    std::vector<double> radii;
    for (int i = 0; i <= 60; ++i) radii.push_back(0.05 * i);
    const RadialProfile prof = radial_profile(f, radii);
    REQUIRE(prof.n_of_r.size() == radii.size());
    for (std::size_t i = 1; i < radii.size(); ++i) CHECK(prof.n_of_r[i] >= prof.n_of_r[i - 1] - 1e-14);
    for (double b : {0.7, 1.4, 2.6}) {
      const QuadResult q = integrate_adaptive([&](double r) { return radial_density(f, r); }, Interval::make(0.0, b), 1e-11);
      CHECK(std::abs(q.value - radial_count(f, b)) <= 1e-8);
    }
  }
}

TEST_CASE("Dirichlet strip counts") {
  CHECK(dirichlet_strip_count(0.8, 1.5, 3.0, 3.0) == 0.0);
  CHECK(dirichlet_strip_count(0.8, 0.8, 0.0, 5.0) == 0.0);
  // Reference values of ζ and ζ′ at 3/2 and 2.
  const double zeta15 = 2.612375348685488, dzeta15 = -3.932239737431101;
  const double zeta2 = M_PI * M_PI / 6, dzeta2 = -0.9375482543158437;
  const double expect = (dzeta2 / zeta2 - dzeta15 / zeta15) * (2 * M_PI) / (2 * M_PI);
  CHECK(dirichlet_strip_count(0.75, 1.0, 0.0, 2 * M_PI) == doctest::Approx(expect).epsilon(1e-9));
  // Translation invariance in the imaginary direction and additivity in the real one.
  CHECK(dirichlet_strip_count(0.75, 1.0, 10.0, 10 + 2 * M_PI) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(dirichlet_strip_count(0.6, 0.9, 0, 1) + dirichlet_strip_count(0.9, 2.0, 0, 1) ==
        doctest::Approx(dirichlet_strip_count(0.6, 2.0, 0, 1)).epsilon(1e-12));
  double prev = 0;
  for (double x1 : {0.6, 0.55, 0.51, 0.501}) {
    const double c = dirichlet_strip_count(x1, 2.0, 0.0, 10.0);
    CHECK(c > prev);
    prev = c;
  }
  CHECK_THROWS_AS(dirichlet_strip_count(0.5, 1.0, 0, 1), DomainError);
  CHECK_THROWS_AS(dirichlet_strip_count(0.9, 0.8, 0, 1), DomainError);
}

TEST_CASE("sampled radial counts of Kac polynomials") {
  const auto kac = VarianceGeneratingFunction::kac_complex(20);
  const std::vector<double> radii = {0.5, 0.9, 1.1, 2.0};
  const RadialEstimate est = mc_complex_radial(kac, radii, {.samples = 10'000, .master_seed = 99});
  REQUIRE(est.mean.size() == radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CAPTURE(radii[i]);
    const double exact = radial_count(kac, radii[i]);
    CHECK(std::abs(est.mean[i] - exact) <= 4 * est.std_error[i] + 1e-12);
  }
}
