#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "randzeros/numerics.hpp"

namespace rz {

/// Systems of m random equations in m real unknowns.
struct SystemFamily {
  enum class Tag { HypercubeKac, KostlanMultihomogeneous, Harmonic, PowerSeries, Entire };

  Tag tag = Tag::KostlanMultihomogeneous;
  int d = 1;                 // degree (hypercube Kac, harmonic)
  int m = 1;                 // number of equations and unknowns
  std::vector<int> degrees;  // Kostlan: one degree per equation

  /// Every equation has iid coefficients on the monomials x^α with α ∈ {0…d}^m.
  static SystemFamily hypercube_kac(int d, int m);
  /// Equation k is a Kostlan polynomial of total degree degrees[k].
  static SystemFamily kostlan(std::vector<int> degrees);
  static SystemFamily kostlan(int d, int m) { return kostlan(std::vector<int>(static_cast<std::size_t>(m), d)); }
  /// Degree-d polynomials with zero Laplacian, orthogonally invariant.
  static SystemFamily harmonic(int d, int m);
  static SystemFamily power_series(int m);
  static SystemFamily entire(int m);

  std::string name() const;
};

/// Kernel of a system K(x, y) = v(x)ᵀCv(y), shared by every equation.
using MultiKernel = std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& y)>;

/// π^(−(m+1)/2) Γ((m+1)/2).
double systems_constant(int m);

/// Expected number of real roots; +∞ for the power-series and entire families.
double systems_expected(const SystemFamily& f);

double systems_density(const SystemFamily& f, const Eigen::VectorXd& t);

/// Kernel of the family when all equations share it (not for mixed Kostlan degrees).
MultiKernel system_kernel(const SystemFamily& f);

/// c_m·√det[∂²/∂xᵢ∂yⱼ log K]ᵢⱼ at x = y = t with 4-point central-difference
/// stencils of step h, for m ≤ 3. Throws EvaluationError when the matrix is not
/// positive semidefinite beyond a slack of 1e−8.
double systems_density_general(const MultiKernel& kernel, const Eigen::VectorXd& t, double h = 1e-4);

/// ∫ systems_density over ℝ^m (m ≤ 2) by nested adaptive quadrature, tol per axis.
double systems_expected_numeric(const SystemFamily& f, double tol = 1e-6);

/// Exact rational ±∏ pᵉ with integer exponents, or zero.
class FactoredRational {
 public:
  FactoredRational() = default;
  static FactoredRational integer(long n);
  /// n!! with (−1)!! = 0!! = 1.
  static FactoredRational double_factorial(int n);
  static FactoredRational factorial(int n);

  int sign() const { return sign_; }
  const std::map<long, int>& exponents() const { return exps_; }
  double to_double() const;
  std::string str() const;

  friend FactoredRational operator*(const FactoredRational& a, const FactoredRational& b);
  friend FactoredRational operator/(const FactoredRational& a, const FactoredRational& b);
  friend FactoredRational operator-(const FactoredRational& a);
  friend bool operator==(const FactoredRational& a, const FactoredRational& b) {
    return a.sign_ == b.sign_ && (a.sign_ == 0 || a.exps_ == b.exps_);
  }

 private:
  int sign_ = 0;
  std::map<long, int> exps_;
};

struct HarmonicCoeffs {
  int d = 0;
  int m = 0;
  std::vector<double> beta;    // β₀ … β_⌊d/2⌋ with β₀ = 1
  bool exact_verified = false; // recurrence checked exactly (d ≤ 30)
};

/// βₖ/β₀ = (−1)ᵏ d! (m+2d−2k−3)!! / (2ᵏ k! (d−2k)! (m+2d−3)!!) exactly. Throws DomainError for d > 30.
FactoredRational harmonic_beta_exact(int d, int m, int k);

/// True when 2k(m+2d−2k−1)βₖ + (d−2k+2)(d−2k+1)βₖ₋₁ = 0 holds exactly for every k.
bool harmonic_recurrence_holds(int d, int m);

/// βₖ in floating point from the ratio βₖ/βₖ₋₁; verified against the recurrence exactly when d ≤ 30.
HarmonicCoeffs harmonic_coeffs(int d, int m);

}  // namespace rz
