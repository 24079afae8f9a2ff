#pragma once

#include <functional>
#include <string>
#include <vector>

#include "randzeros/numerics.hpp"

namespace rz {

/// φ(z) = Σ σₖ² zᵏ, the generating function of the coefficient variances of a
/// random series with independent complex Gaussian coefficients.
struct VarianceGeneratingFunction {
  enum class Tag { KacComplex, KostlanComplex, EntireOrderType, Custom };

  Tag tag = Tag::KacComplex;
  int n = 0;           // degree for the polynomial families
  double rho = 1.0;    // order
  double tau = 1.0;    // type
  std::function<double(int)> sigma2;  // custom σₖ²
  int custom_degree = -1;             // custom: last index for a polynomial, −1 for a series
  double radius = kInf;               // custom: radius of convergence in |z|

  /// σₖ² = 1, k = 0 … n.
  static VarianceGeneratingFunction kac_complex(int n);
  /// σₖ² = C(n, k), so φ(z) = (1 + z)ⁿ.
  static VarianceGeneratingFunction kostlan_complex(int n);
  /// Entire function of order ρ and type τ, modelled by log φ(r²) = 2τ r^ρ.
  static VarianceGeneratingFunction entire_order_type(double rho, double tau);
  /// Finite list σ₀², …, σ_d².
  static VarianceGeneratingFunction custom(std::vector<double> sigma2);
  /// Power series with σₖ² = sigma2(k) and the given radius of convergence.
  static VarianceGeneratingFunction custom(std::function<double(int)> sigma2, double radius = kInf);

  /// Polynomial degree, or −1 for a series.
  int degree() const;
  double variance(int k) const;
  std::string name() const;
};

struct RadialProfile {
  std::vector<double> radii;
  std::vector<double> n_of_r;
};

/// Expected zeros in |z| < r: r² φ′(r²)/φ(r²), i.e. the mean of k under the weights σₖ² r²ᵏ.
double radial_count(const VarianceGeneratingFunction& phi, double r);

/// dn/dr = 2 Var(k)/r under the same weights.
double radial_density(const VarianceGeneratingFunction& phi, double r);

RadialProfile radial_profile(const VarianceGeneratingFunction& phi, const std::vector<double>& radii);

/// Expected zeros of the random Dirichlet series in x₁ < Re s < x₂, y₁ < Im s < y₂.
double dirichlet_strip_count(double x1, double x2, double y1, double y2);

}  // namespace rz
