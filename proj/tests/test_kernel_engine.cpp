#include <doctest.h>

#include <cmath>
#include <random>

#include "randzeros/ensembles.hpp"
#include "randzeros/kernel_engine.hpp"

using namespace rz;

namespace {

// Kac density written out from the rational form, valid away from |t| = 1.
double kac_density_oracle(int n, double t) {
  const double a = 1.0 / std::pow(t * t - 1.0, 2);
  const double num = (n + 1.0) * (n + 1.0) * std::pow(t, 2 * n);
  const double den = std::pow(std::pow(t, 2 * n + 2) - 1.0, 2);
  return std::sqrt(a - num / den) / M_PI;
}

std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(std::min(hi, lo + (hi - lo) * i / (count - 1)));
  return g;
}

}  // namespace

TEST_CASE("kernel jets by direct summation") {
  const KernelJet j1 = kernel_jet(Ensemble(BasisSpec::monomial(1)), 0.0);
  CHECK(j1.a == 1.0);
  CHECK(j1.b == 0.0);
  CHECK(j1.d == 1.0);
  const KernelJet j2 = kernel_jet(Ensemble(BasisSpec::monomial(2)), 1.0);
  CHECK(j2.a == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(j2.b == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(j2.d == doctest::Approx(5.0).epsilon(1e-15));
  const KernelJet j3 = kernel_jet(Ensemble(BasisSpec::kostlan(2)), 1.0);
  CHECK(j3.a == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(j3.b == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(j3.d == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(j3.gram == doctest::Approx(4.0 * 6.0 - 16.0).epsilon(1e-14));
}

TEST_CASE("central densities at known points") {
  CHECK(std::abs(density_central(Ensemble(BasisSpec::monomial(1)), 0.0) - 1.0 / M_PI) <= 1e-15);
  for (double t : {-7.0, -1.0, 0.0, 0.4, 3.0}) {
    CAPTURE(t);
    CHECK(std::abs(density_central(Ensemble(BasisSpec::kostlan(7)), t) - std::sqrt(7.0) / (M_PI * (1 + t * t))) <= 1e-14);
  }
  CHECK(std::abs(density_central(Ensemble(BasisSpec::entire(105)), 0.0) - 1.0 / M_PI) <= 1e-15);
  for (double t : {-3.0, -0.5, 0.25, 0.9, 1.7, 20.0}) {
    CAPTURE(t);
    CHECK(std::abs(density_central(Ensemble(BasisSpec::monomial(6)), t) - kac_density_oracle(6, t)) <= 1e-12);
  }
  // Mean is ignored by the central density.
  const Ensemble e = Ensemble(BasisSpec::kostlan(2)).with_mean(MeanSpec::case1(3.0));
  CHECK(density_central(e, 0.5) == density_central(Ensemble(BasisSpec::kostlan(2)), 0.5));
}

TEST_CASE("logarithmic-derivative path") {
  const Ensemble kac3(BasisSpec::monomial(3));
  CHECK(std::abs(density_central_logderiv(kac3, 0.5) - density_central(kac3, 0.5)) <= 1e-6);
  CHECK(std::abs(density_central_logderiv(Ensemble(BasisSpec::kostlan(4)), 0.0) - 2.0 / M_PI) <= 1e-6);
  CHECK(std::abs(density_central_logderiv(Ensemble(BasisSpec::monomial(199)), 0.0) - 1.0 / M_PI) <= 1e-4);

  SUBCASE("second order in h") {
    for (const auto& f : {ClosedFormFamily::kac(6), ClosedFormFamily::correlated_power_series(0.3),
                          ClosedFormFamily::trig_sum({1.0, 0.5}, {1.0, 3.0}), ClosedFormFamily::dirichlet()}) {
      CAPTURE(f.name());
      const Ensemble e = make_ensemble(f);
      const double t = f.tag == ClosedFormFamily::Tag::Dirichlet ? 0.9 : 0.45;
      const double exact = density_central(e, t);
      const double e1 = std::abs(density_central_logderiv(e, t, 4e-3) - exact);
      const double e2 = std::abs(density_central_logderiv(e, t, 2e-3) - exact);
      CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    }
  }
}

TEST_CASE("mean projections") {
  const Ensemble base(BasisSpec::kostlan(4));
  for (double t : {-2.0, 0.0, 0.7}) {
    const MeanProjection p = mean_projection(base.with_mean(MeanSpec::case1(1.5)), t);
    CHECK(p.m0 == 1.5);
    CHECK(std::abs(p.m1) <= 1e-8);
    CHECK(p.gamma_speed >= 0.0);
  }
  // Every coefficient of the power series has mean m: μ(t) = m/(1 − t).
  const int n = power_series_truncation(1e-3);
  const Ensemble ps = Ensemble(BasisSpec::monomial(n - 1), CovarianceSpec::identity(),
                               MeanSpec::coefficient_vector(Eigen::VectorXd::Constant(n, 0.8)), Interval::make(-0.999, 0.999));
  for (double t : {-0.5, 0.0, 0.3, 0.6}) {
    CAPTURE(t);
    const MeanProjection p = mean_projection(ps, t);
    CHECK(std::abs(p.m0 - 0.8 * std::sqrt((1 + t) / (1 - t))) <= 1e-10);
    CHECK(std::abs(p.m1 - p.m0) <= 1e-6);
  }
  CHECK_THROWS_AS(mean_projection(base, 0.0), DomainError);
}

TEST_CASE("non-central densities") {
  const Ensemble k2(BasisSpec::kostlan(2));
  for (double m : {0.5, 1.0, 2.0}) {
    const Ensemble e = k2.with_mean(MeanSpec::coefficient_vector(Eigen::Vector3d(m, 0.0, m)));
    for (double t : {-1.5, 0.0, 0.8}) {
      CAPTURE(m);
      CAPTURE(t);
      CHECK(std::abs(density_noncentral(e, t) - std::sqrt(2.0) / M_PI * std::exp(-m * m / 2) / (1 + t * t)) <= 1e-12);
    }
  }
  Eigen::VectorXd tiny(7);
  tiny << 1, -2, 0.5, 3, 1, 0, -1;
  tiny *= 1e-8 / tiny.norm();
  const Ensemble kac(BasisSpec::monomial(6));
  for (double t : grid(-2.0, 2.0, 21)) CHECK(std::abs(density_noncentral(kac.with_mean(MeanSpec::coefficient_vector(tiny)), t) - density_central(kac, t)) <= 1e-6);
  CHECK(density(kac, 0.3) == density_central(kac, 0.3));
}

TEST_CASE("expected zeros over intervals") {
  CHECK(std::abs(expected_zeros(Ensemble(BasisSpec::kostlan(9)), Interval::real_line()).value - 3.0) <= 1e-8);
  const Ensemble ps = make_ensemble(ClosedFormFamily::power_series());
  CHECK(std::abs(expected_zeros(ps, Interval::make(0.0, 0.5)).value - std::log(3.0) / (2 * M_PI)) <= 1e-10);
  CHECK_THROWS_AS(expected_zeros(ps, Interval::make(0.0, 2.0)), DomainError);
}

TEST_CASE("projected arclength equals pi times the expected count") {
  CHECK(std::abs(projected_arclength(Ensemble(BasisSpec::kostlan(4)), Interval::real_line()) - 2 * M_PI) <= 1e-6);
  CHECK(std::abs(projected_arclength(Ensemble(BasisSpec::monomial(1)), Interval::real_line()) - M_PI) <= 1e-6);
  const Ensemble kac2(BasisSpec::monomial(2));
  CHECK(std::abs(projected_arclength(kac2, Interval::real_line()) -
                 M_PI * expected_zeros(kac2, Interval::real_line()).value) <= 1e-6);
}

TEST_CASE("covariance factors") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(6, 6);
  for (auto& x : g.reshaped()) x = normal(gen);
  const Eigen::MatrixXd spd = g * g.transpose() + 0.1 * Eigen::MatrixXd::Identity(6, 6);
  for (const auto& c : {CovarianceSpec::dense(spd), CovarianceSpec::tridiagonal_correlation(0.45, 6),
                        CovarianceSpec::tridiagonal_correlation(-0.5, 6),
                        CovarianceSpec::diagonal(Eigen::VectorXd::LinSpaced(6, 0.5, 3.0))}) {
    const Eigen::MatrixXd l = c.factor(6);
    CHECK((l * l.transpose() - c.matrix(6)).cwiseAbs().maxCoeff() <= 1e-12 * c.matrix(6).cwiseAbs().maxCoeff());
  }
  // Singular but positive semidefinite: rank one.
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(4);
  const CovarianceSpec rank1 = CovarianceSpec::dense(u * u.transpose());
  CHECK((rank1.factor(4) * rank1.factor(4).transpose() - u * u.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(CovarianceSpec::tridiagonal_correlation(0.6, 5), DomainError);
  CHECK_THROWS_AS(Ensemble(BasisSpec::monomial(3), CovarianceSpec::diagonal(Eigen::VectorXd::Ones(3))), DomainError);
  CHECK_THROWS_AS(Ensemble(BasisSpec::monomial(3)).with_mean(MeanSpec::coefficient_vector(Eigen::VectorXd::Ones(2))),
                  DomainError);
}

TEST_CASE("scale invariance of the density") {
  const Ensemble e(BasisSpec::monomial(5), CovarianceSpec::tridiagonal_correlation(0.3, 6));
  for (double lambda : {1e-3, 2.0, 1e4})
    for (double t : {-1.3, 0.2, 0.99}) CHECK(std::abs(density_central(e.with_covariance(e.covariance().scaled(lambda)), t) - density_central(e, t)) <= 1e-12);
}

TEST_CASE("Cauchy-Schwarz, symmetry and the Kac inversion") {
  std::vector<Ensemble> ensembles = {Ensemble(BasisSpec::monomial(9)), Ensemble(BasisSpec::kostlan(9)),
                                     make_ensemble(ClosedFormFamily::entire())};
  for (const auto& e : ensembles) {
    CAPTURE(e.basis().name());
    for (double t : grid(-2.5, 2.5, 51)) {
      const KernelJet j = kernel_jet(e, t);
      CHECK(j.a > 0.0);
      CHECK(j.a * j.d - j.b * j.b >= -1e-10 * j.a * j.d);
      CHECK(std::abs(density_central(e, t) - density_central(e, -t)) <= 1e-12);
    }
  }
  const Ensemble kac(BasisSpec::monomial(12));
  for (double t : {0.1, 0.5, 0.9, 0.999, 1.001, 1.5, 4.0, -0.3, -2.0}) {
    CAPTURE(t);
    CHECK(std::abs(density_central(kac, t) - density_central(kac, 1.0 / t) / (t * t)) <= 1e-10);
  }
}

TEST_CASE("bases agree with independent evaluations") {
  const BasisSpec cheb = BasisSpec::chebyshev(6);
  Eigen::VectorXd v(7), dv(7);
  for (double t : {-0.9, -0.2, 0.35, 0.8}) {
    cheb.evaluate(t, v, dv);
    for (int k = 0; k <= 6; ++k) {
      const double c = k == 0 ? std::sqrt(1 / M_PI) : std::sqrt(2 / M_PI);
      const double th = std::acos(t);
      CHECK(std::abs(v(k) - c * std::cos(k * th)) <= 1e-13);
      CHECK(std::abs(dv(k) - c * k * std::sin(k * th) / std::sin(th)) <= 1e-12);
    }
  }
  // A polynomial list spanning the same space as the monomials gives the same density.
  const Ensemble listed(BasisSpec::polynomials({Poly{1}, Poly{0, 1}, Poly{0, 0, 1}}));
  const Ensemble custom(BasisSpec::custom(
      2, [](double t, Eigen::Ref<Eigen::VectorXd> w, Eigen::Ref<Eigen::VectorXd> dw) {
        w << 1.0, t;
        dw << 0.0, 1.0;
      },
      "line"));
  for (double t : {-3.0, -0.7, 0.0, 1.0, 2.5}) {
    CHECK(std::abs(density_central(listed, t) - density_central(Ensemble(BasisSpec::monomial(2)), t)) <= 1e-14);
    CHECK(std::abs(density_central(custom, t) - 1.0 / (M_PI * (1 + t * t))) <= 1e-15);
  }
  const Eigen::VectorXd a = Eigen::Vector3d(1.0, -2.0, 0.5);
  const auto p = BasisSpec::kostlan(2).to_polynomial(a);
  REQUIRE(p.has_value());
  CHECK(std::abs((*p)[1] + 2.0 * std::sqrt(2.0)) <= 1e-15);
  CHECK_FALSE(BasisSpec::trig({1.0}, {1.0}).to_polynomial(Eigen::Vector2d(1, 1)).has_value());
}
