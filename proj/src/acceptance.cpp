#include "randzeros/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>

#include "randzeros/complex_zeros.hpp"
#include "randzeros/ensembles.hpp"
#include "randzeros/matrices.hpp"
#include "randzeros/mc_oracle.hpp"
#include "randzeros/systems.hpp"

namespace rz::acceptance {

namespace {

constexpr std::uint64_t kSeed = 20240611;

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

// Grid of count points on [lo, hi], endpoints included and never overshooting hi.
std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = std::min(hi, lo + (hi - lo) * i / (count - 1));
  return g;
}

bool within_3se(const MCEstimate& e, double target) { return std::abs(e.mean - target) <= 3.0 * e.std_error; }

std::string mc_line(const char* label, const MCEstimate& e, double target) {
  return format("%s %.5f±%.5f vs %.5f (%.2fσ)", label, e.mean, e.std_error, target,
                e.std_error > 0 ? (e.mean - target) / e.std_error : 0.0);
}

struct Result {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

Result kac_constant_value() {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  const double c1 = kac_constant();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.check(std::abs(c1 - 0.6257358072) <= 1e-8, format("C1 = %.12f", c1));
  r.check(secs < 1.0, format("%.3fs", secs));
  return r;
}

Result kac_asymptotics() {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  for (int n : {100, 1000, 10000}) {
    const double e = expected_zeros(make_ensemble(ClosedFormFamily::kac(n)), Interval::real_line(), 1e-12).value;
    const double a = kac_asymptotic(n).value;
    const double gap = std::abs(e - a);
    r.check(gap <= 5.0 / (static_cast<double>(n) * n), format("n=%d E=%.12f gap·n²=%.3f", n, e, gap * n * n));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.check(secs < 10.0, format("%.2fs", secs));
  return r;
}

Result kostlan_exactness() {
  Result r;
  for (int n : {1, 4, 9, 100}) {
    const double e = expected_zeros(make_ensemble(ClosedFormFamily::kostlan(n)), Interval::real_line()).value;
    r.check(std::abs(e - std::sqrt(static_cast<double>(n))) <= 1e-8, format("n=%d %.3e", n, e - std::sqrt(n * 1.0)));
  }
  return r;
}

Result sine_exp_count() {
  Result r;
  const double e = expected_zeros(sine_exp_ensemble(), Interval::real_line()).value;
  r.check(std::abs(e - 0.63662) <= 1e-4, format("E = %.10f, target 0.63662", e));
  return r;
}

Result engine_cross_validation() {
  Result r;
  struct Case {
    ClosedFormFamily f;
    double lo, hi;
  };
  const std::vector<Case> cases = {
      {ClosedFormFamily::kac(6), -2.0, 2.0},
      {ClosedFormFamily::kostlan(4), -3.0, 3.0},
      {ClosedFormFamily::power_series(), -0.9, 0.9},
      {ClosedFormFamily::correlated_power_series(0.3), -0.9, 0.9},
      {ClosedFormFamily::entire(), -3.0, 3.0},
      {ClosedFormFamily::trig_sum({1.0, 1.0}, {1.0, 2.0}), 0.0, 2.0 * kPi},
      {ClosedFormFamily::dirichlet(), 0.6, 3.0},
  };
  for (const auto& c : cases) {
    const Ensemble e = make_ensemble(c.f);
    double logd = 0.0, closed = 0.0;
    for (double t : grid(c.lo, c.hi, 201)) {
      const double direct = density_central(e, t);
      logd = std::max(logd, std::abs(direct - density_central_logderiv(e, t)));
      closed = std::max(closed, std::abs(direct - closed_form_density(c.f, t)));
    }
    r.check(logd <= 1e-6 && closed <= 1e-8, format("%s logd %.1e closed %.1e", c.f.name().c_str(), logd, closed));
  }
  // Closed forms across the whole truncated domain, where the densities grow large.
  for (const auto& f : {ClosedFormFamily::power_series(), ClosedFormFamily::dirichlet()}) {
    const Ensemble e = make_ensemble(f);
    const Interval d = e.domain();
    const double hi = std::isfinite(d.hi) ? d.hi : 8.0;
    double closed = 0.0;
    for (double t : grid(d.lo, hi, 201)) {
      const double exact = closed_form_density(f, t);
      closed = std::max(closed, std::abs(density_central(e, t) - exact) / std::max(1.0, exact));
    }
    r.check(closed <= 1e-8, format("%s full domain rel %.1e", f.name().c_str(), closed));
  }
  return r;
}

Result noncentral() {
  Result r;
  const ClosedFormFamily f = ClosedFormFamily::kostlan(2);
  for (double m : {0.0, 0.5, 1.0, 2.0}) {
    const Ensemble e = make_ensemble(f).with_mean(m == 0.0 ? MeanSpec::zero() : case1_mean(f, m));
    const double got = expected_zeros(e, Interval::real_line(), 1e-11).value;
    const double want = std::sqrt(2.0) * std::exp(-0.5 * m * m);
    r.check(std::abs(got - want) <= 1e-6, format("m=%g %.2e", m, got - want));
  }
  const ClosedFormFamily ps = ClosedFormFamily::power_series();
  for (double m : {0.5, 1.0, 2.0}) {
    const Ensemble e = make_ensemble(ps).with_mean(case2_mean(ps, m, 0.0));
    const double got = expected_zeros(e, Interval::make(0.0, 0.9), 1e-12).value;
    const double want = case2_expected(mean_projection(e, 0.0).m0, mean_projection(e, 0.9).m0);
    r.check(std::abs(got - want) <= 1e-8, format("growth mean m=%g %.2e", m, got - want));
  }
  return r;
}

Result mc_concordance() {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  MCConfig cfg;
  cfg.samples = 100'000;
  cfg.master_seed = kSeed;
  {
    const Ensemble e = make_ensemble(ClosedFormFamily::kac(5));
    const double target = expected_zeros(e, Interval::real_line()).value;
    const MCEstimate est = mc_real_zeros(e, Interval::real_line(), cfg);
    r.check(within_3se(est, target), mc_line("kac5", est, target));
  }
  {
    const Ensemble e = make_ensemble(ClosedFormFamily::kostlan(9));
    const MCEstimate est = mc_real_zeros(e, Interval::real_line(), cfg);
    r.check(within_3se(est, 3.0), mc_line("kostlan9", est, 3.0));
  }
  {
    const ClosedFormFamily f = ClosedFormFamily::kostlan(2);
    const Ensemble e = make_ensemble(f).with_mean(case1_mean(f, 1.0));
    const double target = std::sqrt(2.0) * std::exp(-0.5);
    const MCEstimate est = mc_real_zeros(e, Interval::real_line(), cfg);
    r.check(within_3se(est, target), mc_line("kostlan2 constant mean m=1", est, target));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.check(secs < 120.0, format("%.2fs", secs));
  return r;
}

Result fixed_points() {
  Result r;
  MCConfig cfg;
  cfg.samples = 100'000;
  cfg.master_seed = kSeed;
  const MCEstimate est = mc_fixed_points(3, cfg);
  const double target = rational_fixed_points_mc_target(3);
  r.check(std::abs(target - 2.0) < 1e-15 && within_3se(est, target), mc_line("n=3", est, target));
  return r;
}

Result random_matrices() {
  Result r;
  MCConfig cfg;
  cfg.samples = 100'000;
  cfg.master_seed = kSeed;
  const double targets[] = {std::sqrt(2.0), 11.0 * std::sqrt(2.0) / 8.0};
  for (int i = 0; i < 2; ++i) {
    const int n = 2 * (i + 1);
    r.check(std::abs(real_eigen_expected(n) - targets[i]) <= 1e-12, format("E%d closed %.12f", n, real_eigen_expected(n)));
    const MCEstimate est = mc_real_eigenvalues(n, cfg);
    r.check(within_3se(est, targets[i]), mc_line(n == 2 ? "n=2" : "n=4", est, targets[i]));
  }
  const double ratio = real_eigen_expected(200) / std::sqrt(400.0 / kPi);
  r.check(ratio >= 0.98 && ratio <= 1.02, format("E200/sqrt(400/pi) = %.6f", ratio));
  return r;
}

Result matrix_polynomials() {
  Result r;
  MCConfig cfg;
  cfg.samples = 10'000;
  cfg.master_seed = kSeed;
  const double e2 = expected_zeros(make_ensemble(ClosedFormFamily::kac(2)), Interval::real_line()).value;
  const double target = e2 * kPi / 2.0;
  r.check(std::abs(matrix_poly_factor(2) - kPi / 2.0) <= 1e-14, format("factor %.15f", matrix_poly_factor(2)));
  const MCEstimate est = mc_matrix_poly(2, 2, cfg);
  r.check(within_3se(est, target), mc_line("p=2 n=2", est, target));
  return r;
}

Result systems() {
  Result r;
  for (int d : {1, 4}) {
    const double e = systems_expected_numeric(SystemFamily::kostlan(d, 2));
    r.check(std::abs(e - d) <= 1e-4, format("kostlan m=2 d=%d ∫=%.8f", d, e));
  }
  const std::vector<SystemFamily> families = {
      SystemFamily::kostlan(4, 2),  SystemFamily::kostlan(3, 3), SystemFamily::hypercube_kac(2, 2),
      SystemFamily::harmonic(3, 2), SystemFamily::harmonic(4, 3), SystemFamily::power_series(2),
      SystemFamily::entire(2),
  };
  for (const auto& f : families) {
    const MultiKernel k = system_kernel(f);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      Eigen::VectorXd t(f.m);
      for (int j = 0; j < f.m; ++j) t(j) = 0.15 * (i + 1) * (j % 2 ? -1.0 : 1.0) - 0.1;
      worst = std::max(worst, std::abs(systems_density(f, t) - systems_density_general(k, t)));
    }
    r.check(worst <= 1e-5, format("%s %.1e", f.name().c_str(), worst));
  }
  bool recurrence = true;
  for (int d = 1; d <= 10; ++d)
    for (int m = 1; m <= 5; ++m) recurrence = recurrence && harmonic_recurrence_holds(d, m);
  r.check(recurrence, recurrence ? "harmonic recurrence exact" : "harmonic recurrence broken");
  return r;
}

Result complex_zeros() {
  Result r;
  MCConfig cfg;
  cfg.samples = 10'000;
  cfg.master_seed = kSeed;
  const auto phi = VarianceGeneratingFunction::kostlan_complex(10);
  const std::vector<double> radii = {0.5, 1.0, 2.0};
  const RadialEstimate est = mc_complex_radial(phi, radii, cfg);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double rr = radii[i] * radii[i];
    const double target = 10.0 * rr / (1.0 + rr);
    const bool ok = std::abs(est.mean[i] - target) <= 3.0 * est.std_error[i];
    r.check(ok, format("r=%g %.4f±%.4f vs %.4f", radii[i], est.mean[i], est.std_error[i], target));
  }
  double prev = 0.0;
  for (double x1 : {0.6, 0.55, 0.51}) {
    const double c = dirichlet_strip_count(x1, 2.0, 0.0, 10.0);
    r.check(c > 0.0 && c > prev, format("strip x1=%g %.4f", x1, c));
    prev = c;
  }
  return r;
}

Result buffon_arclength() {
  Result r;
  for (const auto& f : {ClosedFormFamily::kac(4), ClosedFormFamily::kostlan(4)}) {
    const Ensemble e = make_ensemble(f);
    const double len = projected_arclength(e, Interval::real_line());
    const double zeros = expected_zeros(e, Interval::real_line()).value;
    r.check(std::abs(len - kPi * zeros) <= 1e-5, format("%s %.2e", f.name().c_str(), len - kPi * zeros));
  }
  std::mt19937_64 gen(kSeed);
  std::normal_distribution<double> normal;
  auto random_cubic = [&] {
    Eigen::VectorXd c(4);
    for (int k = 0; k < 4; ++k) c(k) = normal(gen);
    return Poly(c);
  };
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Poly a = random_cubic(), b = random_cubic(), c = random_cubic(), d = random_cubic();
    worst = std::max(worst, spijker_length(a, b, c, d) / (6.0 * kPi));
  }
  r.check(worst <= 1.0 + 1e-9, format("max length/(2nπ) over 100 maps %.6f", worst));
  return r;
}

Result kac_matrix_spectrum() {
  Result r;
  int bad = 0;
  for (int n = 1; n <= 10; ++n) {
    const Poly p = char_poly(kac_matrix(n));
    if (sturm_count(p, Interval::real_line()) != n + 1) ++bad;
    for (int k = 0; k <= n; ++k) {
      const double x = 2.0 * k - n;
      if (sturm_count(p, Interval::make(x - 0.5, x + 0.5)) != 1) ++bad;
    }
  }
  r.check(bad == 0, format("%d bracket mismatches for n ≤ 10", bad));
  return r;
}

struct Criterion {
  int id;
  const char* title;
  Result (*run)();
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "Kac constant C1", kac_constant_value},
      {2, "Kac asymptotics", kac_asymptotics},
      {3, "Kostlan exactness", kostlan_exactness},
      {4, "basis {1, sin x, e^|x|} over R", sine_exp_count},
      {5, "engine cross-validation", engine_cross_validation},
      {6, "non-central densities", noncentral},
      {7, "Monte Carlo concordance", mc_concordance},
      {8, "rational fixed points", fixed_points},
      {9, "random matrix real eigenvalues", random_matrices},
      {10, "matrix polynomials", matrix_polynomials},
      {11, "systems", systems},
      {12, "complex zeros", complex_zeros},
      {13, "arclength identity and Spijker bound", buffon_arclength},
      {14, "Kac matrix spectrum", kac_matrix_spectrum},
  };
  return all;
}

}  // namespace

std::vector<int> criterion_ids() {
  std::vector<int> ids;
  for (const auto& c : criteria()) ids.push_back(c.id);
  return ids;
}

Outcome run_criterion(int id) {
  const auto& all = criteria();
  const auto it = std::find_if(all.begin(), all.end(), [id](const Criterion& c) { return c.id == id; });
  if (it == all.end()) throw DomainError("no acceptance criterion " + std::to_string(id));
  Outcome o;
  o.id = id;
  o.title = it->title;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Result r = it->run();
    o.pass = r.pass;
    o.detail = r.detail;
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("threw: ") + e.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

bool run_all(std::ostream& out, const std::vector<int>& only) {
  bool all_pass = true;
  for (int id : only.empty() ? criterion_ids() : only) {
    const Outcome o = run_criterion(id);
    all_pass = all_pass && o.pass;
    out << (o.pass ? "[PASS] " : "[FAIL] ") << o.id << ' ' << o.title << ": " << o.detail
        << format(" (%.2fs)", o.seconds) << std::endl;
  }
  return all_pass;
}

}  // namespace rz::acceptance
