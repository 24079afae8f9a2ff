#include "randzeros/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace rz {

namespace {

using Eigen::VectorXd;
using Tag = ClosedFormFamily::Tag;

void require_degree(int n, const char* what) {
  if (n < 0) throw DomainError(std::string(what) + " degree must be nonnegative");
}

double kac_density_closed(int n, double t) {
  if (n == 0) return 0.0;
  const double at = std::abs(t);
  double first, second;
  if (at < 1.0) {
    const double one_minus = (1.0 - at) * (1.0 + at);
    first = 1.0 / (one_minus * one_minus);
    const double lt = std::log(at);
    const double denom = -std::expm1((2.0 * n + 2.0) * lt);
    second = (n + 1.0) * (n + 1.0) * std::exp(2.0 * n * lt) / (denom * denom);
  } else {
    // Divide through by t^(4n+4) and write everything in u = 1/|t|.
    const double u = 1.0 / at;
    const double one_minus = (1.0 - u) * (1.0 + u);
    first = u * u * u * u / (one_minus * one_minus);
    const double lu = std::log(u);
    const double denom = -std::expm1((2.0 * n + 2.0) * lu);
    second = (n + 1.0) * (n + 1.0) * std::exp((2.0 * n + 4.0) * lu) / (denom * denom);
  }
  return std::sqrt(std::max(first - second, 0.0)) / kPi;
}

double trig_rate(const ClosedFormFamily& f) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < f.sigma.size(); ++k) {
    const double s2 = f.sigma[k] * f.sigma[k];
    num += f.nu[k] * f.nu[k] * s2;
    den += s2;
  }
  if (!(den > 0.0)) throw DomainError("trig sum needs a nonzero scale");
  return std::sqrt(num / den) / kPi;
}

int series_dimension(const ClosedFormFamily& f, const SeriesOptions& opts) {
  switch (f.tag) {
    case Tag::PowerSeries:
    case Tag::CorrelatedPowerSeries:
      return power_series_truncation(opts.delta);
    case Tag::Entire:
      return entire_truncation(opts.entire_radius);
    case Tag::Dirichlet:
      return opts.dirichlet_truncation;
    default:
      return 0;
  }
}

}  // namespace

// Families --------------------------------------------------------------------

ClosedFormFamily ClosedFormFamily::kac(int n) {
  require_degree(n, "kac");
  ClosedFormFamily f;
  f.tag = Tag::Kac;
  f.n = n;
  return f;
}

ClosedFormFamily ClosedFormFamily::kostlan(int n) {
  require_degree(n, "kostlan");
  ClosedFormFamily f;
  f.tag = Tag::Kostlan;
  f.n = n;
  return f;
}

ClosedFormFamily ClosedFormFamily::power_series() {
  ClosedFormFamily f;
  f.tag = Tag::PowerSeries;
  return f;
}

ClosedFormFamily ClosedFormFamily::correlated_power_series(double r) {
  if (!(std::abs(r) <= 0.5)) throw DomainError("correlated power series requires |r| <= 1/2");
  ClosedFormFamily f;
  f.tag = Tag::CorrelatedPowerSeries;
  f.r = r;
  return f;
}

ClosedFormFamily ClosedFormFamily::entire() {
  ClosedFormFamily f;
  f.tag = Tag::Entire;
  return f;
}

ClosedFormFamily ClosedFormFamily::trig_sum(std::vector<double> sigma, std::vector<double> nu) {
  if (sigma.empty() || sigma.size() != nu.size())
    throw DomainError("trig sum needs matching, nonempty scale and frequency lists");
  for (std::size_t k = 0; k < sigma.size(); ++k)
    if (!std::isfinite(sigma[k]) || !std::isfinite(nu[k])) throw DomainError("trig sum parameters must be finite");
  ClosedFormFamily f;
  f.tag = Tag::TrigSum;
  f.sigma = std::move(sigma);
  f.nu = std::move(nu);
  return f;
}

ClosedFormFamily ClosedFormFamily::dirichlet() {
  ClosedFormFamily f;
  f.tag = Tag::Dirichlet;
  return f;
}

std::string ClosedFormFamily::name() const {
  switch (tag) {
    case Tag::Kac:
      return "kac(" + std::to_string(n) + ")";
    case Tag::Kostlan:
      return "kostlan(" + std::to_string(n) + ")";
    case Tag::PowerSeries:
      return "power_series";
    case Tag::CorrelatedPowerSeries:
      return "correlated_power_series(" + std::to_string(r) + ")";
    case Tag::Entire:
      return "entire";
    case Tag::TrigSum:
      return "trig_sum";
    case Tag::Dirichlet:
      return "dirichlet";
  }
  return "?";
}

Interval ClosedFormFamily::natural_domain() const {
  switch (tag) {
    case Tag::PowerSeries:
    case Tag::CorrelatedPowerSeries:
      return {-1.0, 1.0};
    case Tag::Dirichlet:
      return {0.5, kInf};
    default:
      return Interval::real_line();
  }
}

int power_series_truncation(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  const double t = 1.0 - delta;
  const double lt = std::log(t);
  const double target = std::log(1e-16);
  auto small_enough = [&](double n) { return 2.0 * n * lt + 2.0 * std::log(n * (1.0 - t * t) + 1.0) <= target; };
  double n = std::ceil(target / (2.0 * lt));
  while (!small_enough(n)) n = std::ceil(n * 1.01 + 1.0);
  while (n > 1.0 && small_enough(n - 1.0)) n -= 1.0;
  if (n > 5e7) throw DomainError("delta too small for a practical truncation");
  return static_cast<int>(n);
}

int entire_truncation(double radius) {
  if (!(radius > 0.0 && radius <= 20.0)) throw DomainError("entire radius must lie in (0, 20]");
  const double r2 = radius * radius;
  const double target = std::log(1e-16);
  int n = static_cast<int>(std::ceil(r2)) + 2;
  // Remainder Σ_{k≥N} R^(2k)/k!·k² against e^(R²).
  while (2.0 * n * std::log(radius) - std::lgamma(n + 1.0) + 2.0 * std::log(n + 1.0) - r2 > target) ++n;
  return n;
}

Ensemble make_ensemble(const ClosedFormFamily& f, const SeriesOptions& opts) {
  switch (f.tag) {
    case Tag::Kac:
      return Ensemble(BasisSpec::monomial(f.n));
    case Tag::Kostlan:
      return Ensemble(BasisSpec::kostlan(f.n));
    case Tag::PowerSeries: {
      const int n = series_dimension(f, opts);
      return Ensemble(BasisSpec::monomial(n - 1), CovarianceSpec::identity(), MeanSpec::zero(),
                      Interval::make(-1.0 + opts.delta, 1.0 - opts.delta));
    }
    case Tag::CorrelatedPowerSeries: {
      const int n = series_dimension(f, opts);
      return Ensemble(BasisSpec::monomial(n - 1), CovarianceSpec::tridiagonal_correlation(f.r, n), MeanSpec::zero(),
                      Interval::make(-1.0 + opts.delta, 1.0 - opts.delta));
    }
    case Tag::Entire:
      return Ensemble(BasisSpec::entire(series_dimension(f, opts)), CovarianceSpec::identity(), MeanSpec::zero(),
                      Interval::make(-opts.entire_radius, opts.entire_radius));
    case Tag::TrigSum:
      return Ensemble(BasisSpec::trig(f.nu, f.sigma));
    case Tag::Dirichlet:
      return Ensemble(BasisSpec::dirichlet(series_dimension(f, opts)), CovarianceSpec::identity(), MeanSpec::zero(),
                      Interval::make(0.5 + opts.delta, kInf));
  }
  throw UnsupportedError("unknown family");
}

Ensemble sine_exp_ensemble() {
  // (1, sin x, e^{|x|}) and its derivative, both multiplied by e^{−|x|}.
  auto eval = [](double x, Eigen::Ref<VectorXd> v, Eigen::Ref<VectorXd> dv) {
    const double s = std::exp(-std::abs(x));
    const double sgn = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    v << s, std::sin(x) * s, 1.0;
    dv << 0.0, std::cos(x) * s, sgn;
  };
  return Ensemble(BasisSpec::custom(3, eval, "1, sin x, exp|x|", {0.0}));
}

// Closed forms ----------------------------------------------------------------

double closed_form_density(const ClosedFormFamily& f, double t) {
  if (!std::isfinite(t)) throw DomainError("closed_form_density needs finite t");
  switch (f.tag) {
    case Tag::Kac:
      if (std::abs(t * t - 1.0) < 1e-3) return density_central(make_ensemble(f), t);
      return kac_density_closed(f.n, t);
    case Tag::Kostlan:
      return std::sqrt(static_cast<double>(f.n)) / (kPi * (1.0 + t * t));
    case Tag::PowerSeries:
      if (!(std::abs(t) < 1.0)) throw DomainError("power series density needs |t| < 1");
      return 1.0 / (kPi * (1.0 - t) * (1.0 + t));
    case Tag::CorrelatedPowerSeries: {
      if (!(std::abs(t) < 1.0)) throw DomainError("power series density needs |t| < 1");
      const double a = 1.0 / ((1.0 - t) * (1.0 + t));
      const double b = f.r / (1.0 + 2.0 * f.r * t);
      return std::sqrt(std::max((a - b) * (a + b), 0.0)) / kPi;
    }
    case Tag::Entire:
      return 1.0 / kPi;
    case Tag::TrigSum:
      return trig_rate(f);
    case Tag::Dirichlet: {
      if (!(t > 0.5)) throw DomainError("dirichlet density needs t > 1/2");
      const double s = 2.0 * t;
      const double z0 = zeta_derivs(s, 0), z1 = zeta_derivs(s, 1), z2 = zeta_derivs(s, 2);
      return std::sqrt(std::max(z2 * z0 - z1 * z1, 0.0)) / (kPi * z0);
    }
  }
  throw UnsupportedError("unknown family");
}

double closed_form_expected(const ClosedFormFamily& f, const Interval& interval) {
  if (!(interval.lo < interval.hi)) throw DomainError("interval must satisfy lo < hi");
  switch (f.tag) {
    case Tag::Kostlan:
      return std::sqrt(static_cast<double>(f.n)) / kPi * (std::atan(interval.hi) - std::atan(interval.lo));
    case Tag::PowerSeries:
      if (!(interval.lo > -1.0 && interval.hi < 1.0)) throw DomainError("power series interval must lie in (-1, 1)");
      // (1/2π) log((1−a)(1+b)/((1+a)(1−b)))
      return (std::atanh(interval.hi) - std::atanh(interval.lo)) / kPi;
    case Tag::TrigSum:
      if (!interval.bounded()) throw DomainError("trig sum count is infinite on an unbounded interval");
      return (interval.hi - interval.lo) * trig_rate(f);
    case Tag::Entire:
      if (!interval.bounded()) throw DomainError("entire count is infinite on an unbounded interval");
      return (interval.hi - interval.lo) / kPi;
    default:
      throw UnsupportedError("no closed-form expected count for " + f.name());
  }
}

// Constants and asymptotics ---------------------------------------------------

namespace {

// √(1/x² − csch²x) − 1/(x+1); the difference under the root is taken from its
// Taylor series near 0, where both terms are huge.
double kac_constant_integrand(double x) {
  double q;
  if (x < 0.25) {
    const double y = x * x;
    q = 1.0 / 3.0 +
        y * (-1.0 / 15.0 +
             y * (2.0 / 189.0 +
                  y * (-1.0 / 675.0 + y * (2.0 / 10395.0 + y * (-1382.0 / 58046625.0 + y * (4.0 / 1403325.0))))));
  } else {
    const double c = x > 700.0 ? 0.0 : 1.0 / std::sinh(x);
    q = 1.0 / (x * x) - c * c;
  }
  return std::sqrt(std::max(q, 0.0)) - 1.0 / (x + 1.0);
}

}  // namespace

double kac_constant() {
  static const double value = [] {
    const QuadResult q = integrate_adaptive(kac_constant_integrand, {0.0, kInf}, 1e-14);
    return 2.0 / kPi * (std::log(2.0) + q.value);
  }();
  return value;
}

double euler_gamma() {
  static const double value = [] {
    constexpr int n = 1000;
    CompensatedSum h;
    for (int k = n; k >= 1; --k) h.add(1.0 / k);
    const double x = 1.0 / n;
    const double x2 = x * x;
    // H_N − ln N − 1/(2N) + 1/(12N²) − 1/(120N⁴) + 1/(252N⁶)
    return h.value() - std::log(static_cast<double>(n)) - 0.5 * x + x2 / 12.0 - x2 * x2 / 120.0 +
           x2 * x2 * x2 / 252.0;
  }();
  return value;
}

AsymptoticResult kac_asymptotic(int n) {
  if (n < 1) throw DomainError("kac_asymptotic requires n >= 1");
  AsymptoticResult r;
  r.terms = {{"(2/pi) ln n", 2.0 / kPi * std::log(static_cast<double>(n))},
             {"C1", kac_constant()},
             {"2/(n pi)", 2.0 / (n * kPi)}};
  for (const auto& [label, v] : r.terms) r.value += v;
  return r;
}

NoncentralAsymptotic noncentral_asymptotic(int n, double m) {
  if (n < 2) throw DomainError("noncentral_asymptotic requires n >= 2");
  if (m == 0.0 || !std::isfinite(m)) throw DomainError("noncentral_asymptotic requires a finite nonzero mean");
  NoncentralAsymptotic r;
  const double am = std::abs(m);
  r.expected = std::log(static_cast<double>(n)) / kPi + 0.5 * kac_constant() + 0.5 - euler_gamma() / kPi -
               2.0 / kPi * std::log(am);
  const double e = erf(am / std::sqrt(2.0));
  r.positive_zeros = 0.5 - 0.5 * e * e + exp_integral_gamma0(m * m) / kPi;
  return r;
}

Ensemble kac_with_mean(int n, double m) {
  require_degree(n, "kac");
  return Ensemble(BasisSpec::monomial(n), CovarianceSpec::identity(),
                  MeanSpec::coefficient_vector(VectorXd::Constant(n + 1, m)));
}

// Means -----------------------------------------------------------------------

double dirichlet_sqrt_zeta_coefficient(long k) {
  if (k < 1) throw DomainError("dirichlet coefficient index must be positive");
  double c = 1.0;
  long rest = k;
  for (long p = 2; p * p <= rest; ++p) {
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    if (e % 2 == 1) return 0.0;
    if (e > 0) c *= double_factorial_ratio(e - 1, e);
  }
  if (rest > 1) return 0.0;  // a leftover prime appears to the first power
  return c;
}

MeanSpec case1_mean(const ClosedFormFamily& f, double m, const SeriesOptions& opts) {
  MeanSpec spec = MeanSpec::case1(m);
  switch (f.tag) {
    case Tag::Kostlan: {
      if (f.n % 2 != 0) throw UnsupportedError("case1 mean needs an even kostlan degree");
      // (1+t²)^(n/2) = Σ C(n/2, j) t^(2j); the basis function at 2j is √C(n,2j) t^(2j).
      const int n = f.n;
      VectorXd c = VectorXd::Zero(n + 1);
      for (int j = 0; 2 * j <= n; ++j) {
        const double log_half = std::lgamma(n / 2 + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n / 2 - j + 1.0);
        const double log_full = std::lgamma(n + 1.0) - std::lgamma(2 * j + 1.0) - std::lgamma(n - 2 * j + 1.0);
        c(2 * j) = m * std::exp(log_half - 0.5 * log_full);
      }
      spec.coefficients = std::move(c);
      spec.mean_function = [m, n](double t) { return m * std::pow(1.0 + t * t, 0.5 * n); };
      return spec;
    }
    case Tag::PowerSeries: {
      // (1−t²)^(−1/2) = Σ (2j−1)!!/(2j)!! t^(2j)
      const int n = series_dimension(f, opts);
      VectorXd c = VectorXd::Zero(n);
      for (int j = 0; 2 * j < n; ++j) c(2 * j) = m * double_factorial_ratio(2 * j - 1, 2 * j);
      spec.coefficients = std::move(c);
      spec.mean_function = [m](double t) { return m / std::sqrt((1.0 - t) * (1.0 + t)); };
      return spec;
    }
    case Tag::Entire: {
      // e^(t²/2) = Σ t^(2j)/(2^j j!); the basis function at 2j is t^(2j)/√(2j)!.
      const int n = series_dimension(f, opts);
      VectorXd c = VectorXd::Zero(n);
      for (int j = 0; 2 * j < n; ++j)
        c(2 * j) = m * std::exp(0.5 * std::lgamma(2.0 * j + 1.0) - j * std::log(2.0) - std::lgamma(j + 1.0));
      spec.coefficients = std::move(c);
      spec.mean_function = [m](double t) { return m * std::exp(0.5 * t * t); };
      return spec;
    }
    case Tag::TrigSum: {
      double total = 0.0;
      for (double s : f.sigma) total += s * s;
      const double norm = std::sqrt(total);
      // ‖w‖ is constant; it is in the span only through a zero frequency.
      for (std::size_t k = 0; k < f.nu.size(); ++k) {
        if (f.nu[k] == 0.0 && f.sigma[k] != 0.0) {
          VectorXd c = VectorXd::Zero(2 * static_cast<Eigen::Index>(f.nu.size()));
          c(2 * static_cast<Eigen::Index>(k)) = m * norm / f.sigma[k];
          spec.coefficients = std::move(c);
          break;
        }
      }
      spec.mean_function = [m, norm](double) { return m * norm; };
      return spec;
    }
    case Tag::Dirichlet: {
      const int n = series_dimension(f, opts);
      VectorXd c(n);
      for (int k = 1; k <= n; ++k) c(k - 1) = m * dirichlet_sqrt_zeta_coefficient(k);
      spec.coefficients = std::move(c);
      spec.mean_function = [m](double t) { return m * std::sqrt(zeta_derivs(2.0 * t, 0)); };
      return spec;
    }
    default:
      throw UnsupportedError("case1 mean is not available for " + f.name());
  }
}

MeanSpec case2_mean(const ClosedFormFamily& f, double m, double anchor, const SeriesOptions& opts) {
  switch (f.tag) {
    case Tag::PowerSeries: {
      if (!(std::abs(anchor) < 1.0)) throw DomainError("power series anchor must lie in (-1, 1)");
      // ‖γ′‖ = 1/(1−t²), so ∫_K^t ‖γ′‖ = atanh t − atanh K and μ(t) = m e^{−atanh K}/(1−t).
      const double scale = m * std::exp(-std::atanh(anchor));
      MeanSpec spec = MeanSpec::case2(m, anchor, [scale](double t) { return scale * std::sqrt((1.0 + t) / (1.0 - t)); });
      spec.coefficients = VectorXd::Constant(series_dimension(f, opts), scale);
      spec.mean_function = [scale](double t) { return scale / (1.0 - t); };
      return spec;
    }
    case Tag::Entire: {
      // ‖γ′‖ = 1, so m₀ = m e^{t−K} and μ(t) = m e^{−K} e^{t + t²/2}.
      const double scale = m * std::exp(-anchor);
      MeanSpec spec = MeanSpec::case2(m, anchor, [scale](double t) { return scale * std::exp(t); });
      // e^{t+t²/2} = Σ I_k t^k/k! with I_k the involution numbers; in the basis
      // t^k/√k! the coefficient is J_k = I_k/√k!, J_k = J_{k−1}/√k + J_{k−2}√((k−1)/k).
      const int n = series_dimension(f, opts);
      VectorXd c(n);
      c(0) = 1.0;
      if (n > 1) c(1) = 1.0;
      for (int k = 2; k < n; ++k) c(k) = c(k - 1) / std::sqrt(k) + c(k - 2) * std::sqrt((k - 1.0) / k);
      spec.coefficients = VectorXd(scale * c);
      spec.mean_function = [scale](double t) { return scale * std::exp(t + 0.5 * t * t); };
      return spec;
    }
    case Tag::Dirichlet: {
      if (!(anchor > 0.5)) throw DomainError("dirichlet anchor must exceed 1/2");
      const ClosedFormFamily fam = f;
      auto m0 = [m, anchor, fam](double t) {
        if (t == anchor) return m;
        const double lo = std::min(t, anchor), hi = std::max(t, anchor);
        const QuadResult q =
            integrate_adaptive([&](double x) { return kPi * closed_form_density(fam, x); }, Interval::make(lo, hi), 1e-13);
        return m * std::exp(t > anchor ? q.value : -q.value);
      };
      MeanSpec spec = MeanSpec::case2(m, anchor, m0);
      spec.mean_function = [m0](double t) { return m0(t) * std::sqrt(zeta_derivs(2.0 * t, 0)); };
      return spec;
    }
    default:
      throw UnsupportedError("case2 mean is not available for " + f.name());
  }
}

double case2_expected(double m0_a, double m0_b) {
  if (m0_a == 0.0 || m0_b == 0.0) throw DomainError("case2_expected needs nonzero m0");
  auto antiderivative = [](double x) {
    const double e = erf(x / std::sqrt(2.0));
    return 0.25 * e * e - exp_integral_gamma0(x * x) / (2.0 * kPi);
  };
  return antiderivative(m0_b) - antiderivative(m0_a);
}

// Rational maps ---------------------------------------------------------------

Ensemble spijker_ensemble(const Poly& a, const Poly& b, const Poly& c, const Poly& d) {
  const Poly f0 = 2.0 * (a * c + b * d);
  const Poly f1 = 2.0 * (b * c - a * d);
  const Poly f2 = a * a + b * b - c * c - d * d;
  if (f0.is_zero() && f1.is_zero() && f2.is_zero())
    throw DomainError("degenerate rational map: all Spijker basis functions vanish");
  return Ensemble(BasisSpec::polynomials({f0, f1, f2}));
}

double spijker_length(const Poly& a, const Poly& b, const Poly& c, const Poly& d, double tol) {
  if (c.is_zero() && d.is_zero()) throw DomainError("spijker_length needs a nonzero denominator");
  const Ensemble e = spijker_ensemble(a, b, c, d);
  return kPi * expected_zeros(e, Interval::real_line(), tol / kPi).value;
}

double rational_fixed_points_mc_target(int n) {
  if (n < 0) throw DomainError("degree must be nonnegative");
  return std::sqrt(n + 1.0);
}

}  // namespace rz
