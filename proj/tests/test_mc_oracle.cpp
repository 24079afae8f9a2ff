#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "randzeros/ensembles.hpp"
#include "randzeros/matrices.hpp"
#include "randzeros/mc_oracle.hpp"

using namespace rz;
using cd = std::complex<double>;

TEST_CASE("Sturm counts") {
  const Poly cubic{0.0, -1.0, 0.0, 1.0};  // t³ − t
  CHECK(sturm_count(cubic, Interval::real_line()) == 3);
  CHECK(sturm_count(cubic, Interval::make(-0.5, 0.5)) == 1);
  CHECK(sturm_count(cubic, Interval::make(0.5, 10)) == 1);
  CHECK(sturm_count(cubic, Interval::make(0.0, 1.0)) == 0);  // roots on the boundary are excluded
  CHECK(sturm_count(Poly{1.0, 0.0, 1.0}, Interval::real_line()) == 0);
  CHECK(sturm_count(Poly::constant(3.0), Interval::real_line()) == 0);
  // (t − 1)²(t + 2) has a repeated root, which the chain reports.
  const Poly rep = Poly{1.0, -2.0, 1.0} * Poly{2.0, 1.0};
  CHECK_THROWS_AS(sturm_count(rep, Interval::real_line()), DegeneracyError);
  // Wilkinson-like: roots 1 … 10.
  Poly w = Poly::constant(1.0);
  for (int k = 1; k <= 10; ++k) w = w * Poly{-double(k), 1.0};
  CHECK(sturm_count(w, Interval::real_line()) == 10);
  CHECK(sturm_count(w, Interval::make(2.5, 7.5)) == 5);
}

TEST_CASE("sign scan") {
  auto s = [](double t) { return std::sin(t); };
  CHECK(sign_scan_count(s, Interval::make(0.5, 10.0), 1000) == 3);
  const auto roots = sign_scan_roots(s, Interval::make(0.5, 10.0), 1000);
  REQUIRE(roots.size() == 3);
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(roots[k - 1] - k * M_PI) < 1e-10);
  auto c = [](double t) { return t * t - 2.0; };
  CHECK(sign_scan_count(c, Interval::real_line(), 2000) == 2);
}

TEST_CASE("sign scan agrees with Sturm on sampled Kac polynomials") {
  int mismatches = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Eigen::VectorXd a = GaussianStream(5, i).draw(7);
    const Poly p(a);
    const int sturm = sturm_count(p, Interval::real_line());
    const int scan = sign_scan_count([&](double t) { return eval(p, t); }, Interval::real_line(), 20000);
    if (sturm != scan) ++mismatches;
  }
  // Near-double roots can hide from the grid; they are rare.
  CHECK(mismatches <= 5);
}

TEST_CASE("Aberth iteration") {
  auto sorted = [](std::vector<cd> r) {
    std::sort(r.begin(), r.end(), [](cd a, cd b) { return a.imag() < b.imag() || (a.imag() == b.imag() && a.real() < b.real()); });
    return r;
  };
  const auto r2 = sorted(aberth_roots(Poly{1.0, 0.0, 1.0}));
  REQUIRE(r2.size() == 2);
  CHECK(std::abs(r2[0] - cd(0, -1)) < 1e-12);
  CHECK(std::abs(r2[1] - cd(0, 1)) < 1e-12);
  const auto r3 = aberth_roots(Poly{-1.0, 0.0, 0.0, 1.0});
  REQUIRE(r3.size() == 3);
  for (const cd z : r3) CHECK(std::abs(z * z * z - 1.0) < 1e-12);
  // Vieta on a random degree-20 polynomial: sum and product of the roots.
  const Eigen::VectorXd a = GaussianStream(17, 0).draw(21);
  const auto r20 = aberth_roots(Poly(a));
  REQUIRE(r20.size() == 20);
  cd sum = 0, prod = 1;
  for (const cd z : r20) sum += z, prod *= z;
  CHECK(std::abs(sum + a(19) / a(20)) < 1e-8 * (1 + std::abs(a(19) / a(20))));
  CHECK(std::abs(prod - a(0) / a(20)) < 1e-8 * (1 + std::abs(a(0) / a(20))));
  CHECK_THROWS_AS(aberth_roots(Poly::constant(2.0)), DomainError);
}

TEST_CASE("sampled targets with exact answers") {
  const MCConfig cfg{.samples = 20'000, .master_seed = 3};
  // One eigenvalue of a 1×1 matrix is always real.
  const MCEstimate e1 = mc_real_eigenvalues(1, cfg);
  CHECK(e1.mean == 1.0);
  CHECK(e1.std_error == 0.0);
  // Fixed points of p/q with degree-1 Kostlan p, q: √2 on average.
  const MCEstimate fp = mc_fixed_points(1, cfg);
  CHECK(std::abs(fp.mean - std::sqrt(2.0)) <= 4 * fp.std_error);
  // Scalar matrix polynomials are Kac polynomials.
  const MCEstimate mp = mc_matrix_poly(3, 1, cfg);
  const double kac3 = expected_zeros(make_ensemble(ClosedFormFamily::kac(3)), Interval::real_line()).value;
  CHECK(std::abs(mp.mean - kac3) <= 4 * mp.std_error);
  // det(A₀ + A₁t) for 3×3 matrices: factor 2 over the linear Kac value 1.
  const MCEstimate p3 = mc_matrix_poly(1, 3, cfg);
  CHECK(std::abs(p3.mean - 2.0) <= 4 * p3.std_error);
  // Every root lies inside a large enough disc.
  const RadialEstimate all = mc_complex_radial(VarianceGeneratingFunction::kac_complex(8), {1e8}, {.samples = 500, .master_seed = 1});
  CHECK(all.mean[0] == 8.0);
  const MCEstimate ev3 = mc_real_eigenvalues(3, cfg);
  CHECK(std::abs(ev3.mean - real_eigen_expected(3)) <= 4 * ev3.std_error);
}

TEST_CASE("results do not depend on the worker count") {
  const Ensemble e = make_ensemble(ClosedFormFamily::kac(6));
  const MCEstimate a = mc_real_zeros(e, Interval::real_line(), {.samples = 3000, .master_seed = 42, .workers_hint = 1});
  const MCEstimate b = mc_real_zeros(e, Interval::real_line(), {.samples = 3000, .master_seed = 42, .workers_hint = 7});
  const MCEstimate c = mc_real_zeros(e, Interval::real_line(), {.samples = 3000, .master_seed = 42, .workers_hint = 0});
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean == c.mean);
  const MCEstimate d = mc_real_zeros(e, Interval::real_line(), {.samples = 3000, .master_seed = 43});
  CHECK(a.mean != d.mean);
  CHECK(a.seed == 42);
  CHECK(a.n == 3000);
}

TEST_CASE("standard error shrinks like one over root N") {
  const Ensemble e = make_ensemble(ClosedFormFamily::kostlan(5));
  const MCEstimate small = mc_real_zeros(e, Interval::real_line(), {.samples = 2500, .master_seed = 8});
  const MCEstimate large = mc_real_zeros(e, Interval::real_line(), {.samples = 40'000, .master_seed = 8});
  CHECK(small.std_error / large.std_error == doctest::Approx(4.0).epsilon(0.1));
  CHECK(std::abs(large.mean - std::sqrt(5.0)) <= 4 * large.std_error);
}

TEST_CASE("degenerate samples are redrawn") {
  const MCEstimate est = mc_run({.samples = 1000, .master_seed = 9, .workers_hint = 3}, [](std::uint64_t i, const GaussianStream& s) {
    // Reject the first draw of every tenth sample; the retry comes from another substream.
    if (i % 10 == 0 && s[0] == GaussianStream(9, i)[0]) throw DegeneracyError("rejected");
    return 1.0;
  });
  CHECK(est.mean == 1.0);
  CHECK(est.resampled == 100);
  CHECK_THROWS_AS(mc_run({.samples = 10, .master_seed = 9},
                         [](std::uint64_t, const GaussianStream&) -> double { throw ConvergenceError("never"); }),
                  ConvergenceError);
  CHECK_THROWS_AS(mc_run({.samples = 0}, [](std::uint64_t, const GaussianStream&) { return 0.0; }), DomainError);
  // Other errors propagate at once.
  CHECK_THROWS_AS(mc_run({.samples = 10}, [](std::uint64_t, const GaussianStream&) -> double { throw EvaluationError("bad"); }),
                  EvaluationError);
}
