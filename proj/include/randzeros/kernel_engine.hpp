#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "randzeros/numerics.hpp"

namespace rz {

/// Fills v(t) and v′(t). Any common positive multiple λ(t)·(v, v′) is an
/// acceptable output: every density below is invariant under it, and the
/// built-in bases use that freedom to stay finite for large |t|.
using BasisEvaluator =
    std::function<void(double t, Eigen::Ref<Eigen::VectorXd> v, Eigen::Ref<Eigen::VectorXd> dv)>;

/// Kernel remainder of a truncated series basis (identity covariance only):
/// jet(t) = remainders of (v·v, v′·v, v′·v′) and kernel(x, y) = remainder of v(x)·v(y).
struct SeriesTail {
  std::function<Eigen::Vector3d(double t)> jet;
  std::function<double(double x, double y)> kernel;
};

/// The function family f₀ … fₙ spanned by the random coefficients.
class BasisSpec {
 public:
  enum class Kind { Monomial, WeightedMonomial, Trig, Dirichlet, Entire, Chebyshev, PolynomialList, Custom };

  /// 1, t, …, tⁿ. Large n doubles as the truncated power series.
  static BasisSpec monomial(int n);
  /// √σ₀² , √σ₁² t, …: variances folded into the functions so the coefficients are iid.
  static BasisSpec weighted_monomial(std::vector<double> variances);
  /// Binomial variances (ⁿₖ).
  static BasisSpec kostlan(int n);
  /// σₖ cos νₖt, σₖ sin νₖt for each k.
  static BasisSpec trig(std::vector<double> frequencies, std::vector<double> scales);
  /// k^(−t), k = 1 … N, with the Euler–Maclaurin remainder of the infinite series.
  static BasisSpec dirichlet(int truncation);
  /// tᵏ/√k!, k = 0 … N−1.
  static BasisSpec entire(int truncation);
  /// Orthonormal Chebyshev polynomials T₀/√π, √(2/π)Tₖ on [−1, 1].
  static BasisSpec chebyshev(int n);
  /// Arbitrary real polynomials, scaled by |t|^(−deg) outside [−1, 1].
  static BasisSpec polynomials(std::vector<Poly> polys);
  /// User evaluator. `breakpoints` lists points where v is not differentiable;
  /// integrals are split there.
  static BasisSpec custom(int dimension, BasisEvaluator evaluator, std::string name,
                          std::vector<double> breakpoints = {});

  Kind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const std::string& name() const { return name_; }
  /// Points where integrals over t are split: kinks of v and, for polynomial
  /// bases, ±1 where the densities peak.
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::optional<SeriesTail>& tail() const { return tail_; }

  void evaluate(double t, Eigen::Ref<Eigen::VectorXd> v, Eigen::Ref<Eigen::VectorXd> dv) const {
    evaluator_(t, v, dv);
  }

  /// Σ aₖ fₖ as a polynomial when the basis is polynomial; nullopt otherwise.
  std::optional<Poly> to_polynomial(const Eigen::VectorXd& coeffs) const;

 private:
  BasisSpec(Kind kind, int dimension, BasisEvaluator evaluator, std::string name);

  Kind kind_;
  int dimension_;
  BasisEvaluator evaluator_;
  std::string name_;
  std::vector<double> breakpoints_;
  std::optional<SeriesTail> tail_;
  std::function<Poly(const Eigen::VectorXd&)> polynomial_;
};

/// Coefficient covariance C together with a square root L (C = L·Lᵀ).
class CovarianceSpec {
 public:
  enum class Kind { Identity, Diagonal, TridiagonalCorrelation, Dense };

  static CovarianceSpec identity();
  static CovarianceSpec diagonal(Eigen::VectorXd variances);
  /// Unit diagonal, r on both off-diagonals; |r| ≤ 1/2.
  static CovarianceSpec tridiagonal_correlation(double r, int dimension);
  /// Symmetric positive semidefinite matrix; factor by Cholesky, falling back
  /// to the symmetric square root when C is singular.
  static CovarianceSpec dense(const Eigen::MatrixXd& c);

  Kind kind() const { return kind_; }
  /// 0 when the covariance adapts to any dimension (identity).
  int dimension() const { return dimension_; }
  /// λC for λ > 0.
  CovarianceSpec scaled(double lambda) const;

  /// w = Lᵀv so that w·w = vᵀCv.
  Eigen::VectorXd whiten(const Eigen::VectorXd& v) const;
  /// a = L z, mapping iid standard normals to coefficients with covariance C.
  Eigen::VectorXd colour(const Eigen::VectorXd& z) const;

  Eigen::MatrixXd matrix(int n) const;
  Eigen::MatrixXd factor(int n) const;
  double r() const { return r_; }

 private:
  Kind kind_ = Kind::Identity;
  int dimension_ = 0;
  double scale_ = 1.0;
  double r_ = 0.0;
  Eigen::VectorXd diag_;  // Diagonal: √variances; Tridiagonal: factor diagonal
  Eigen::VectorXd sub_;   // Tridiagonal: factor subdiagonal, sub_(k) = L(k, k−1)
  Eigen::MatrixXd dense_factor_;
};

/// Mean of the coefficient vector.
struct MeanSpec {
  enum class Kind { Zero, CoefficientVector, Case1, Case2 };

  Kind kind = Kind::Zero;
  double scale = 0.0;   // m for Case1/Case2
  double anchor = 0.0;  // K for Case2
  /// Coefficient means in the basis coordinates. Required for CoefficientVector;
  /// optional for Case1/Case2 (used when sampling).
  std::optional<Eigen::VectorXd> coefficients;
  /// Closed-form m₀(t) for Case2; when absent m₀ = m·exp ∫_K^t ‖γ′‖ by quadrature.
  std::function<double(double)> projected;
  /// μ(t) in closed form, informational.
  std::function<double(double)> mean_function;

  static MeanSpec zero() { return {}; }
  static MeanSpec coefficient_vector(Eigen::VectorXd m);
  static MeanSpec case1(double m);
  static MeanSpec case2(double m, double anchor, std::function<double(double)> projected = {});

  bool is_zero() const;
};

/// A random-function family: basis, coefficient covariance and mean, domain.
class Ensemble {
 public:
  explicit Ensemble(BasisSpec basis, CovarianceSpec covariance = CovarianceSpec::identity(),
                    MeanSpec mean = MeanSpec::zero(), Interval domain = Interval::real_line());

  const BasisSpec& basis() const { return basis_; }
  const CovarianceSpec& covariance() const { return covariance_; }
  const MeanSpec& mean() const { return mean_; }
  const Interval& domain() const { return domain_; }
  int dimension() const { return basis_.dimension(); }

  Ensemble with_mean(MeanSpec mean) const;
  Ensemble with_covariance(CovarianceSpec covariance) const;

 private:
  BasisSpec basis_;
  CovarianceSpec covariance_;
  MeanSpec mean_;
  Interval domain_;
};

/// A = v·Cv, B = v′·Cv, D = v′·Cv′ at t (up to a common positive factor).
struct KernelJet {
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;
  /// AD − B², evaluated as A·‖w′ − (B/A)w‖² to avoid cancellation when w′ ∥ w.
  double gram = 0.0;

  /// ‖γ′(t)‖ = √(AD − B²)/A, with the Cauchy–Schwarz slack clamped to 0.
  double speed() const;
};

struct MeanProjection {
  double m0 = 0.0;
  double m1 = 0.0;
  double gamma_speed = 0.0;
};

KernelJet kernel_jet(const Ensemble& e, double t);

/// v(x)ᵀCv(y), up to a factor λ(x)λ(y) that the log-derivative ignores.
double kernel_value(const Ensemble& e, double x, double y);

/// Zero-mean density of real zeros, √(AD − B²)/(πA). The ensemble mean is ignored.
double density_central(const Ensemble& e, double t);

/// The same density from the mixed partial ∂²/∂x∂y log K(x, y) at x = y = t by a
/// 4-point central-difference stencil with step h.
double density_central_logderiv(const Ensemble& e, double t, double h = 1e-4);

/// m₀ = μ/‖w‖ and m₁ = m₀′/‖γ′‖; m₀′ by central differences with step max(1e-6, 1e-6|t|).
MeanProjection mean_projection(const Ensemble& e, double t);

/// Density of real zeros for a nonzero mean; equals density_central when the mean is zero.
double density_noncentral(const Ensemble& e, double t);

/// Central or non-central density according to the ensemble mean.
double density(const Ensemble& e, double t);

/// ∫_I density, split at basis breakpoints.
QuadResult expected_zeros(const Ensemble& e, const Interval& interval, double tol = 1e-10);

/// Length of t ↦ w(t)/‖w(t)‖ over I, from a finite-difference speed.
double projected_arclength(const Ensemble& e, const Interval& interval, double tol = 1e-10);

}  // namespace rz
