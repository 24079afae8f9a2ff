#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "randzeros/numerics.hpp"

using namespace rz;

namespace {

// Maclaurin series of erf, summed in long double until the terms vanish.
double erf_series(double x) {
  long double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -static_cast<long double>(x) * x / n;
    sum += term / (2 * n + 1);
  }
  return static_cast<double>(sum * 2.0L / std::sqrt(3.14159265358979323846264338327950288L));
}

// E₁(x) = −γ − ln x − Σ (−x)ᵏ/(k·k!), fine for small and moderate x.
double e1_series(double x) {
  const long double gamma = 0.57721566490153286060651209008240243L;
  long double term = 1.0L, sum = 0.0L;
  for (int k = 1; k < 200; ++k) {
    term *= -static_cast<long double>(x) / k;
    sum += term / k;
  }
  return static_cast<double>(-gamma - std::log(static_cast<long double>(x)) - sum);
}

// Composite Simpson on a fixed grid; independent of the adaptive integrator.
template <typename F>
double simpson(F f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Σ_{k≤N} (−ln k)^order k^(−s) plus the integral of the tail and the half end term.
double zeta_direct(double s, int order, long n) {
  long double sum = 0.0L;
  for (long k = n; k >= 1; --k) {
    const long double lk = std::log(static_cast<long double>(k));
    sum += std::pow(-lk, order) * std::pow(static_cast<long double>(k), -s);
  }
  const double L = std::log(static_cast<double>(n));
  const double a = s - 1.0;
  double tail = 0.0;
  const double base = std::pow(static_cast<double>(n), -a);
  if (order == 0) tail = base / a;
  if (order == 1) tail = -base * (L / a + 1.0 / (a * a));
  if (order == 2) tail = base * (L * L / a + 2.0 * L / (a * a) + 2.0 / (a * a * a));
  const double half = 0.5 * std::pow(-L, order) * std::pow(static_cast<double>(n), -s);
  return static_cast<double>(sum) + tail - half;
}

}  // namespace

TEST_CASE("erf matches its Maclaurin series and is odd") {
  CHECK(rz::erf(0.0) == 0.0);
  CHECK(std::abs(rz::erf(1.0) - erf_series(1.0)) <= 1e-14);
  CHECK(std::abs(rz::erf(1.0) - 0.84270079294971) <= 1e-13);
  CHECK(std::abs(rz::erf(6.0) - 1.0) <= 1e-14);
  for (double x : {0.1, 0.5, 1.5, 2.5, 3.0})
    CHECK(std::abs(rz::erf(x) - erf_series(x)) <= 1e-14);
  for (double x : {1e-8, 0.3, 1.0, 2.7, 5.5, 30.0}) {
    CHECK(rz::erf(-x) == -rz::erf(x));
    CHECK(std::abs(rz::erf(x)) <= 1.0);
  }
}

TEST_CASE("exponential integral against series and quadrature oracles") {
  CHECK(std::abs(exp_integral_gamma0(1.0) - 0.21938393439552) <= 1e-12);
  CHECK(std::abs(exp_integral_gamma0(1.0) / e1_series(1.0) - 1.0) <= 1e-12);
  // ∫₁^∞ e^{−t}/t dt = ∫₀¹ e^{−1/u}/u du.
  const double q = simpson([](double u) { return u == 0.0 ? 0.0 : std::exp(-1.0 / u) / u; }, 0.0, 1.0, 20000);
  CHECK(std::abs(exp_integral_gamma0(1.0) - q) <= 1e-10);
  CHECK(exp_integral_gamma0(10.0) < std::exp(-10.0) / 10.0);
  CHECK(std::abs(exp_integral_gamma0(1e-3) / e1_series(1e-3) - 1.0) <= 1e-12);
  double prev = exp_integral_gamma0(0.01);
  for (double x = 0.02; x < 20.0; x *= 1.3) {
    const double v = exp_integral_gamma0(x);
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(exp_integral_gamma0(0.0), DomainError);
  CHECK_THROWS_AS(exp_integral_gamma0(-1.0), DomainError);
}

TEST_CASE("log gamma at known points") {
  CHECK(log_gamma(1.0) == 0.0);
  CHECK(std::abs(log_gamma(0.5) - 0.5 * std::log(M_PI)) <= 1e-13 * 0.5 * std::log(M_PI));
  CHECK(std::abs(log_gamma(7.0) / std::log(720.0) - 1.0) <= 1e-13);
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
}

TEST_CASE("zeta and its derivatives") {
  CHECK(std::abs(zeta_derivs(2.0, 0) - M_PI * M_PI / 6.0) <= 1e-11);
  CHECK(std::abs(zeta_derivs(4.0, 0) - std::pow(M_PI, 4) / 90.0) <= 1e-11);
  CHECK(std::abs(zeta_derivs(2.0, 1) - zeta_direct(2.0, 1, 1'000'000)) <= 1e-11);
  CHECK(std::abs(zeta_derivs(2.0, 1) + 0.93754825431584) <= 1e-11);
  for (double s : {1.1, 1.5, 2.0, 3.0, 6.0}) {
    CAPTURE(s);
    for (int order = 0; order <= 2; ++order) CHECK(std::abs(zeta_derivs(s, order) - zeta_direct(s, order, 100'000)) <= 1e-9);
  }
  // Near the pole the value is large; the absolute tolerance still holds.
  CHECK(std::abs(zeta_derivs(1.01, 0) - zeta_direct(1.01, 0, 100'000)) <= 1e-9);
  CHECK_THROWS_AS(zeta_derivs(1.0, 0), DomainError);
  CHECK_THROWS_AS(zeta_derivs(2.0, 3), DomainError);
}

TEST_CASE("double factorial ratios") {
  CHECK(double_factorial_ratio(-1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(double_factorial_ratio(3, 4) == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
  CHECK(double_factorial_ratio(7, 8) == doctest::Approx(105.0 / 384.0).epsilon(1e-15));
  // Large arguments stay finite through log space.
  const double r = double_factorial_ratio(601, 600);
  CHECK(std::isfinite(r));
  // (2k+1)!!/(2k)!! ≈ (2k+1)/√(πk) for large k.
  CHECK(r == doctest::Approx(601.0 / std::sqrt(M_PI * 300.0)).epsilon(1e-3));
  CHECK_THROWS_AS(double_factorial_ratio(-2, 3), DomainError);
}

TEST_CASE("adaptive quadrature") {
  const QuadResult a = integrate_adaptive([](double x) { return x * x; }, Interval::make(0, 1), 1e-12);
  CHECK(std::abs(a.value - 1.0 / 3.0) <= 1e-12);
  CHECK(a.err_estimate >= 0.0);
  const QuadResult g = integrate_adaptive([](double x) { return std::exp(-x * x); }, Interval::real_line(), 1e-12);
  CHECK(std::abs(g.value - std::sqrt(M_PI)) <= 1e-10);

  SUBCASE("splitting invariance") {
    auto f = [](double x) { return std::sqrt(1.0 + x * x) / (1.0 + std::pow(x - 0.3, 2) * 40.0); };
    const double tol = 1e-10;
    const double whole = integrate_adaptive(f, Interval::make(-2, 3), tol).value;
    const double left = integrate_adaptive(f, Interval::make(-2, 0.7), tol).value;
    const double right = integrate_adaptive(f, Interval::make(0.7, 3), tol).value;
    CHECK(std::abs(whole - (left + right)) <= 2 * tol);
  }
  SUBCASE("budget exhaustion") {
    QuadOptions opts;
    opts.max_evaluations = 200;
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return std::sin(1.0 / x); }, Interval::make(1e-4, 1), 1e-14, opts),
                    ConvergenceError);
  }
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return x; }, Interval::make(0, 1), 0.0), DomainError);
}

TEST_CASE("polynomial arithmetic") {
  const Poly p{1, 1}, q{1, -1};
  CHECK(mul(p, q).coeffs().isApprox(Poly{1, 0, -1}.coeffs()));
  CHECK(diff(Poly{1, 1, 1}).coeffs().isApprox(Poly{1, 2}.coeffs()));
  const auto [v, d] = eval_with_deriv(Poly{0, -1, 0, 1}, 2.0);
  CHECK(v == 6.0);
  CHECK(d == 11.0);

  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> degree(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a(degree(gen) + 1), b(degree(gen) + 1);
    for (auto& x : a) x = normal(gen);
    for (auto& x : b) x = normal(gen);
    const Poly pa(a), pb(b);
    const Poly lhs = diff(pa * pb);
    const Poly rhs = diff(pa) * pb + pa * diff(pb);
    for (int k = 0; k <= std::max(lhs.degree(), rhs.degree()); ++k) CHECK(std::abs(lhs[k] - rhs[k]) <= 1e-12 * 20);
  }
  const auto [quot, rem] = divmod(Poly{-1, 0, 0, 1}, Poly{-1, 1});
  CHECK(quot.coeffs().isApprox(Poly{1, 1, 1}.coeffs()));
  CHECK(rem.is_zero());
}

TEST_CASE("gaussian stream moments, distribution and determinism") {
  const GaussianStream s(12345, 0);
  constexpr int n = 1'000'000;
  double mean = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s[static_cast<std::uint64_t>(i)];
    const double delta = x - mean;
    mean += delta / (i + 1);
    m2 += delta * (x - mean);
  }
  CHECK(std::abs(mean) <= 0.004);
  CHECK(std::abs(m2 / (n - 1) - 1.0) <= 0.005);

  std::vector<double> xs(10'000);
  GaussianStream(99, 3).fill(xs);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-xs[i] / std::sqrt(2.0));
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / xs.size()), std::abs(cdf - (i + 1.0) / xs.size())});
  }
  CHECK(ks < 1.9495 / std::sqrt(static_cast<double>(xs.size())));

  const GaussianStream a(42, 7), b(42, 7), c(42, 8);
  bool identical = true, differ = false;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    identical = identical && a[i] == b[i];
    differ = differ || a[i] != c[i];
  }
  CHECK(identical);
  CHECK(differ);
  GaussianCursor cur(a);
  const Eigen::VectorXd first = cur.next(5);
  CHECK(first(4) == a[4]);
  CHECK(cur.next() == a[5]);
}
