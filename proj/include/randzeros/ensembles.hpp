#pragma once

#include <string>
#include <utility>
#include <vector>

#include "randzeros/kernel_engine.hpp"

namespace rz {

/// Named random-function families with closed-form zero densities.
struct ClosedFormFamily {
  enum class Tag { Kac, Kostlan, PowerSeries, CorrelatedPowerSeries, Entire, TrigSum, Dirichlet };

  Tag tag = Tag::Kac;
  int n = 0;                  // degree for Kac / Kostlan
  double r = 0.0;             // correlation for the correlated power series
  std::vector<double> sigma;  // trig sum scales
  std::vector<double> nu;     // trig sum frequencies

  static ClosedFormFamily kac(int n);
  static ClosedFormFamily kostlan(int n);
  static ClosedFormFamily power_series();
  static ClosedFormFamily correlated_power_series(double r);
  static ClosedFormFamily entire();
  static ClosedFormFamily trig_sum(std::vector<double> sigma, std::vector<double> nu);
  static ClosedFormFamily dirichlet();

  std::string name() const;
  /// Open domain where the family converges: ℝ, (−1, 1) or (1/2, ∞).
  Interval natural_domain() const;
};

/// Truncation controls for the infinite-series families.
struct SeriesOptions {
  double delta = 1e-3;             // power series on |t| ≤ 1 − δ, Dirichlet on t ≥ 1/2 + δ
  double entire_radius = 6.0;      // entire series on |t| ≤ R
  int dirichlet_truncation = 1000; // explicit terms before the Euler–Maclaurin remainder
};

/// Smallest N with t^(2N)·(N(1 − t²) + 1)² ≤ 1e−16 at t = 1 − δ, so the power-series
/// remainders of v·v, v′·v and v′·v′ are below 1e−14 relative.
int power_series_truncation(double delta);

/// Truncation of the entire series on |t| ≤ R with relative remainder below 1e−16.
int entire_truncation(double radius);

/// The family as a kernel-engine ensemble (zero mean) on its clipped domain.
Ensemble make_ensemble(const ClosedFormFamily& f, const SeriesOptions& opts = {});

/// Basis {1, sin x, e^{|x|}} with iid coefficients, over ℝ.
Ensemble sine_exp_ensemble();

double closed_form_density(const ClosedFormFamily& f, double t);

/// Expected count over I for kostlan, power_series, trig_sum and entire.
double closed_form_expected(const ClosedFormFamily& f, const Interval& interval);

struct AsymptoticResult {
  double value = 0.0;
  std::vector<std::pair<std::string, double>> terms;
};

/// (2/π)(ln 2 + ∫₀^∞ {√(1/x² − csch²x) − 1/(x+1)} dx), evaluated by quadrature once.
double kac_constant();

/// Euler's constant from the Euler–Maclaurin expansion of H_N − ln N.
double euler_gamma();

/// (2/π) ln n + C₁ + 2/(nπ).
AsymptoticResult kac_asymptotic(int n);

struct NoncentralAsymptotic {
  double expected = 0.0;
  double positive_zeros = 0.0;
};

/// Large-n expected zeros of a degree-n polynomial whose iid unit-variance
/// coefficients all have mean m ≠ 0, and the expected number of positive zeros.
NoncentralAsymptotic noncentral_asymptotic(int n, double m);

/// Degree-n polynomial, unit-variance coefficients all with mean m.
Ensemble kac_with_mean(int n, double m);

/// Mean whose projection m₀(t) is the constant m. Coefficients are attached
/// where ‖w(t)‖ lies in the span of the basis.
MeanSpec case1_mean(const ClosedFormFamily& f, double m, const SeriesOptions& opts = {});

/// Mean with m₀(t) = m·exp ∫_K^t ‖γ′‖, so that m₁ = m₀.
MeanSpec case2_mean(const ClosedFormFamily& f, double m, double anchor, const SeriesOptions& opts = {});

/// ∫ density over [a, b] for a mean with m₁ = m₀: [¼erf²(m₀/√2) − Γ(0, m₀²)/(2π)] between
/// m₀(a) and m₀(b).
double case2_expected(double m0_a, double m0_b);

/// Coefficient of k^(−t) in √ζ(2t): ∏ (2nᵢ−1)!!/(2nᵢ)!! over k = ∏ pᵢ^(2nᵢ), 0 when k is not a square.
double dirichlet_sqrt_zeta_coefficient(long k);

/// Basis f₀ = 2(ac+bd), f₁ = 2(bc−ad), f₂ = a²+b²−c²−d² of the rational map (a+ib)/(c+id).
Ensemble spijker_ensemble(const Poly& a, const Poly& b, const Poly& c, const Poly& d);

/// Length of the image of ℝ on the Riemann sphere, as π × expected zeros of the Spijker ensemble.
double spijker_length(const Poly& a, const Poly& b, const Poly& c, const Poly& d, double tol = 1e-9);

/// √(n+1): expected real fixed points of p/q with independent Kostlan p, q of degree n.
double rational_fixed_points_mc_target(int n);

}  // namespace rz
