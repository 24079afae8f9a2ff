#include "randzeros/kernel_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace rz {

namespace {

using Eigen::VectorXd;

// Powers t^k for |t| ≤ 1; for |t| > 1 the same values times |t|^(−n), written
// in terms of u = 1/t so nothing overflows.
void monomial_values(int n, double t, Eigen::Ref<VectorXd> v, Eigen::Ref<VectorXd> dv) {
  if (std::abs(t) <= 1.0) {
    double p = 1.0;
    v(0) = 1.0;
    dv(0) = 0.0;
    for (int k = 1; k <= n; ++k) {
      dv(k) = k * p;
      p *= t;
      v(k) = p;
    }
    return;
  }
  const double u = 1.0 / t;
  const double sign = (t < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
  // v_k = sign·u^(n−k), dv_k = sign·k·u^(n−k+1)
  double p = sign;
  for (int k = n; k >= 0; --k) {
    v(k) = p;
    dv(k) = k * p * u;
    p *= u;
  }
}

std::vector<double> binomial_row(int n) {
  std::vector<double> row(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k)
    row[k] = std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
  if (n > 60) {
    // Beyond 2^53 the rounded values are meaningless; keep the floating values.
    for (int k = 0; k <= n; ++k)
      row[k] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  }
  return row;
}

std::vector<double> polynomial_breakpoints() { return {-1.0, 1.0}; }

}  // namespace

// BasisSpec -------------------------------------------------------------------

BasisSpec::BasisSpec(Kind kind, int dimension, BasisEvaluator evaluator, std::string name)
    : kind_(kind), dimension_(dimension), evaluator_(std::move(evaluator)), name_(std::move(name)) {
  if (dimension_ < 1) throw DomainError("basis dimension must be at least 1");
}

BasisSpec BasisSpec::monomial(int n) {
  if (n < 0) throw DomainError("monomial degree must be nonnegative");
  BasisSpec b(Kind::Monomial, n + 1,
              [n](double t, Eigen::Ref<VectorXd> v, Eigen::Ref<VectorXd> dv) { monomial_values(n, t, v, dv); },
              "monomial(" + std::to_string(n) + ")");
  b.breakpoints_ = polynomial_breakpoints();
  b.polynomial_ = [](const VectorXd& a) { return Poly(a); };
  return b;
}

BasisSpec BasisSpec::weighted_monomial(std::vector<double> variances) {
  if (variances.empty()) throw DomainError("weighted_monomial needs at least one variance");
  VectorXd scale(static_cast<Eigen::Index>(variances.size()));
  for (std::size_t k = 0; k < variances.size(); ++k) {
    if (!(variances[k] >= 0.0) || !std::isfinite(variances[k]))
      throw DomainError("weighted_monomial variances must be finite and nonnegative");
    scale(static_cast<Eigen::Index>(k)) = std::sqrt(variances[k]);
  }
  const int n = static_cast<int>(variances.size()) - 1;
  BasisSpec b(Kind::WeightedMonomial, n + 1,
              [n, scale](double t, Eigen::Ref<VectorXd> v, Eigen::Ref<VectorXd> dv) {
                monomial_values(n, t, v, dv);
                v.array() *= scale.array();
                dv.array() *= scale.array();
              },
              "weighted_monomial(" + std::to_string(n) + ")");
  b.breakpoints_ = polynomial_breakpoints();
  b.polynomial_ = [scale](const VectorXd& a) { return Poly(VectorXd(a.cwiseProduct(scale))); };
  return b;
}

BasisSpec BasisSpec::kostlan(int n) {
  if (n < 0) throw DomainError("kostlan degree must be nonnegative");
  BasisSpec b = weighted_monomial(binomial_row(n));
  b.name_ = "kostlan(" + std::to_string(n) + ")";
  return b;
}

BasisSpec BasisSpec::trig(std::vector<double> frequencies, std::vector<double> scales) {
  if (frequencies.empty() || frequencies.size() != scales.size())
    throw DomainError("trig basis needs matching, nonempty frequency and scale lists");
  for (std::size_t k = 0; k < scales.size(); ++k)
    if (!std::isfinite(frequencies[k]) || !std::isfinite(scales[k]))
      throw DomainError("trig basis parameters must be finite");
  const int terms = static_cast<int>(frequencies.size());
  return BasisSpec(Kind::Trig, 2 * terms,
                   [frequencies, scales, terms](double t, Eigen::Ref<VectorXd> v, Eigen::Ref<VectorXd> dv) {
                     for (int k = 0; k < terms; ++k) {
                       const double nu = frequencies[k];
                       const double c = std::cos(nu * t);
                       const double s = std::sin(nu * t);
                       v(2 * k) = scales[k] * c;
                       v(2 * k + 1) = scales[k] * s;
                       dv(2 * k) = -scales[k] * nu * s;
                       dv(2 * k + 1) = scales[k] * nu * c;
                     }
                   },
                   "trig(" + std::to_string(terms) + ")");
}

BasisSpec BasisSpec::dirichlet(int truncation) {
  if (truncation < 1) throw DomainError("dirichlet truncation must be positive");
  const int n = truncation;
  BasisSpec b(Kind::Dirichlet, n,
              [n](double t, Eigen::Ref<VectorXd> v, Eigen::Ref<VectorXd> dv) {
                for (int k = 1; k <= n; ++k) {
                  const double lk = std::log(static_cast<double>(k));
                  const double x = std::exp(-t * lk);
                  v(k - 1) = x;
                  dv(k - 1) = -lk * x;
                }
              },
              "dirichlet(" + std::to_string(n) + ")");
  const long start = n + 1;
  b.tail_ = SeriesTail{
      [start](double t) {
        const double s = 2.0 * t;
        if (!(s > 1.0)) throw DomainError("dirichlet kernel requires t > 1/2");
        // Σ k^(−2t) (1, −ln k, ln² k) over the remainder
        return Eigen::Vector3d(zeta_tail(s, start, 0), zeta_tail(s, start, 1), zeta_tail(s, start, 2));
      },
      [start](double x, double y) {
        if (!(x + y > 1.0)) throw DomainError("dirichlet kernel requires x + y > 1");
        return zeta_tail(x + y, start, 0);
      }};
  return b;
}

BasisSpec BasisSpec::entire(int truncation) {
  if (truncation < 1) throw DomainError("entire truncation must be positive");
  const int n = truncation;
  BasisSpec b(Kind::Entire, n,
              [n](double t, Eigen::Ref<VectorXd> v, Eigen::Ref<VectorXd> dv) {
                // f_k = t^k/√k!, f_k′ = √k·f_{k−1}
                v(0) = 1.0;
                dv(0) = 0.0;
                for (int k = 1; k < n; ++k) {
                  const double rk = std::sqrt(static_cast<double>(k));
                  v(k) = v(k - 1) * t / rk;
                  dv(k) = rk * v(k - 1);
                }
              },
              "entire(" + std::to_string(n) + ")");
  b.polynomial_ = [n](const VectorXd& a) {
    VectorXd c(n);
    double f = 1.0;
    for (int k = 0; k < n; ++k) {
      if (k > 0) f /= std::sqrt(static_cast<double>(k));
      c(k) = a(k) * f;
    }
    return Poly(std::move(c));
  };
  return b;
}

BasisSpec BasisSpec::chebyshev(int n) {
  if (n < 0) throw DomainError("chebyshev degree must be nonnegative");
  const double c0 = std::sqrt(1.0 / kPi);
  const double ck = std::sqrt(2.0 / kPi);
  BasisSpec b(Kind::Chebyshev, n + 1,
              [n, c0, ck](double t, Eigen::Ref<VectorXd> v, Eigen::Ref<VectorXd> dv) {
                // T_k by the three-term recurrence, T_k′ = k·U_{k−1}
                double t_prev = 1.0, t_cur = t;
                double u_prev = 0.0, u_cur = 1.0;  // U_{−1}, U_0
                v(0) = c0;
                dv(0) = 0.0;
                for (int k = 1; k <= n; ++k) {
                  v(k) = ck * t_cur;
                  dv(k) = ck * k * u_cur;
                  const double t_next = 2.0 * t * t_cur - t_prev;
                  const double u_next = 2.0 * t * u_cur - u_prev;
                  t_prev = t_cur;
                  t_cur = t_next;
                  u_prev = u_cur;
                  u_cur = u_next;
                }
              },
              "chebyshev(" + std::to_string(n) + ")");
  b.polynomial_ = [n, c0, ck](const VectorXd& a) {
    Poly sum = Poly::constant(c0 * a(0));
    Poly prev = Poly::constant(1.0);
    Poly cur{0.0, 1.0};
    const Poly two_t{0.0, 2.0};
    for (int k = 1; k <= n; ++k) {
      sum = sum + (ck * a(k)) * cur;
      Poly next = two_t * cur - prev;
      prev = std::move(cur);
      cur = std::move(next);
    }
    return sum;
  };
  return b;
}

BasisSpec BasisSpec::polynomials(std::vector<Poly> polys) {
  if (polys.empty()) throw DomainError("polynomial basis needs at least one polynomial");
  int deg = 0;
  for (const auto& p : polys) deg = std::max(deg, p.degree());
  const int m = static_cast<int>(polys.size());
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(m, deg + 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= polys[i].degree(); ++j) coeffs(i, j) = polys[i][j];
  BasisSpec b(Kind::PolynomialList, m,
              [deg, coeffs](double t, Eigen::Ref<VectorXd> v, Eigen::Ref<VectorXd> dv) {
                VectorXd mv(deg + 1), mdv(deg + 1);
                monomial_values(deg, t, mv, mdv);
                v.noalias() = coeffs * mv;
                dv.noalias() = coeffs * mdv;
              },
              "polynomials(" + std::to_string(m) + ")");
  b.breakpoints_ = polynomial_breakpoints();
  b.polynomial_ = [coeffs](const VectorXd& a) { return Poly(VectorXd(coeffs.transpose() * a)); };
  return b;
}

BasisSpec BasisSpec::custom(int dimension, BasisEvaluator evaluator, std::string name,
                            std::vector<double> breakpoints) {
  if (!evaluator) throw DomainError("custom basis needs an evaluator");
  BasisSpec b(Kind::Custom, dimension, std::move(evaluator), std::move(name));
  std::sort(breakpoints.begin(), breakpoints.end());
  b.breakpoints_ = std::move(breakpoints);
  return b;
}

std::optional<Poly> BasisSpec::to_polynomial(const Eigen::VectorXd& coeffs) const {
  if (!polynomial_) return std::nullopt;
  if (coeffs.size() != dimension_) throw DomainError("coefficient vector length does not match basis");
  return polynomial_(coeffs);
}

// CovarianceSpec --------------------------------------------------------------

CovarianceSpec CovarianceSpec::identity() { return CovarianceSpec{}; }

CovarianceSpec CovarianceSpec::diagonal(Eigen::VectorXd variances) {
  if (variances.size() < 1) throw DomainError("diagonal covariance needs at least one entry");
  if (!variances.allFinite() || (variances.array() < 0.0).any())
    throw DomainError("diagonal covariance entries must be finite and nonnegative");
  CovarianceSpec c;
  c.kind_ = Kind::Diagonal;
  c.dimension_ = static_cast<int>(variances.size());
  c.diag_ = variances.cwiseSqrt();
  return c;
}

CovarianceSpec CovarianceSpec::tridiagonal_correlation(double r, int dimension) {
  if (!(std::abs(r) <= 0.5)) throw DomainError("tridiagonal correlation requires |r| <= 1/2");
  if (dimension < 1) throw DomainError("covariance dimension must be positive");
  CovarianceSpec c;
  c.kind_ = Kind::TridiagonalCorrelation;
  c.dimension_ = dimension;
  c.r_ = r;
  // Banded Cholesky: l₀ = 1, s_k = r/l_{k−1}, l_k = √(1 − s_k²). For |r| ≤ 1/2
  // the diagonal stays above 1/√2.
  c.diag_.resize(dimension);
  c.sub_ = VectorXd::Zero(dimension);
  c.diag_(0) = 1.0;
  for (int k = 1; k < dimension; ++k) {
    c.sub_(k) = r / c.diag_(k - 1);
    c.diag_(k) = std::sqrt(1.0 - c.sub_(k) * c.sub_(k));
  }
  return c;
}

CovarianceSpec CovarianceSpec::dense(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) throw DomainError("dense covariance must be square and nonempty");
  if (!m.allFinite()) throw DomainError("dense covariance must be finite");
  const double norm = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(norm, 1e-300))
    throw DomainError("dense covariance must be symmetric");
  CovarianceSpec c;
  c.kind_ = Kind::Dense;
  c.dimension_ = static_cast<int>(m.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    c.dense_factor_ = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const VectorXd& lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -1e-12 * std::max(norm, 1e-300))
      throw DomainError("dense covariance must be positive semidefinite");
    c.dense_factor_ = eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  const Eigen::MatrixXd back = c.dense_factor_ * c.dense_factor_.transpose();
  if ((back - m).cwiseAbs().maxCoeff() > 1e-12 * std::max(norm, 1e-300) * c.dimension_)
    throw DomainError("covariance factor does not reproduce the matrix");
  return c;
}

CovarianceSpec CovarianceSpec::scaled(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("covariance scale must be positive");
  CovarianceSpec c = *this;
  c.scale_ *= lambda;
  return c;
}

Eigen::VectorXd CovarianceSpec::whiten(const Eigen::VectorXd& v) const {
  const double s = std::sqrt(scale_);
  switch (kind_) {
    case Kind::Identity:
      return s == 1.0 ? v : VectorXd(s * v);
    case Kind::Diagonal:
      return s * diag_.cwiseProduct(v);
    case Kind::TridiagonalCorrelation: {
      const Eigen::Index n = v.size();
      VectorXd w(n);
      for (Eigen::Index k = 0; k + 1 < n; ++k) w(k) = diag_(k) * v(k) + sub_(k + 1) * v(k + 1);
      w(n - 1) = diag_(n - 1) * v(n - 1);
      return s * w;
    }
    case Kind::Dense:
      return s * (dense_factor_.transpose() * v);
  }
  return v;
}

Eigen::VectorXd CovarianceSpec::colour(const Eigen::VectorXd& z) const {
  const double s = std::sqrt(scale_);
  switch (kind_) {
    case Kind::Identity:
      return s * z;
    case Kind::Diagonal:
      return s * diag_.cwiseProduct(z);
    case Kind::TridiagonalCorrelation: {
      const Eigen::Index n = z.size();
      VectorXd a(n);
      a(0) = diag_(0) * z(0);
      for (Eigen::Index k = 1; k < n; ++k) a(k) = diag_(k) * z(k) + sub_(k) * z(k - 1);
      return s * a;
    }
    case Kind::Dense:
      return s * (dense_factor_ * z);
  }
  return z;
}

Eigen::MatrixXd CovarianceSpec::factor(int n) const {
  if (dimension_ != 0 && n != dimension_) throw DomainError("covariance dimension mismatch");
  const double s = std::sqrt(scale_);
  switch (kind_) {
    case Kind::Identity:
      return s * Eigen::MatrixXd::Identity(n, n);
    case Kind::Diagonal:
      return s * diag_.asDiagonal().toDenseMatrix();
    case Kind::TridiagonalCorrelation: {
      Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
      for (int k = 0; k < n; ++k) {
        l(k, k) = diag_(k);
        if (k > 0) l(k, k - 1) = sub_(k);
      }
      return s * l;
    }
    case Kind::Dense:
      return s * dense_factor_;
  }
  return {};
}

Eigen::MatrixXd CovarianceSpec::matrix(int n) const {
  const Eigen::MatrixXd l = factor(n);
  return l * l.transpose();
}

// MeanSpec / Ensemble ---------------------------------------------------------

MeanSpec MeanSpec::coefficient_vector(Eigen::VectorXd m) {
  MeanSpec s;
  s.kind = Kind::CoefficientVector;
  s.coefficients = std::move(m);
  return s;
}

MeanSpec MeanSpec::case1(double m) {
  MeanSpec s;
  s.kind = Kind::Case1;
  s.scale = m;
  return s;
}

MeanSpec MeanSpec::case2(double m, double anchor, std::function<double(double)> projected) {
  MeanSpec s;
  s.kind = Kind::Case2;
  s.scale = m;
  s.anchor = anchor;
  s.projected = std::move(projected);
  return s;
}

bool MeanSpec::is_zero() const {
  switch (kind) {
    case Kind::Zero:
      return true;
    case Kind::CoefficientVector:
      return !coefficients || coefficients->isZero(0.0);
    case Kind::Case1:
    case Kind::Case2:
      return scale == 0.0;
  }
  return true;
}

Ensemble::Ensemble(BasisSpec basis, CovarianceSpec covariance, MeanSpec mean, Interval domain)
    : basis_(std::move(basis)), covariance_(std::move(covariance)), mean_(std::move(mean)), domain_(domain) {
  if (!(domain_.lo < domain_.hi)) throw DomainError("ensemble domain must satisfy lo < hi");
  const int n = basis_.dimension();
  if (covariance_.dimension() != 0 && covariance_.dimension() != n)
    throw DomainError("covariance dimension " + std::to_string(covariance_.dimension()) +
                      " does not match basis dimension " + std::to_string(n));
  if (basis_.tail() && covariance_.kind() != CovarianceSpec::Kind::Identity)
    throw UnsupportedError("series bases with a kernel remainder require identity covariance");
  if (mean_.coefficients && mean_.coefficients->size() != n)
    throw DomainError("mean vector length does not match basis dimension");
  if (mean_.kind == MeanSpec::Kind::CoefficientVector && !mean_.coefficients)
    throw DomainError("coefficient-vector mean needs coefficients");
}

Ensemble Ensemble::with_mean(MeanSpec mean) const { return Ensemble(basis_, covariance_, std::move(mean), domain_); }

Ensemble Ensemble::with_covariance(CovarianceSpec covariance) const {
  return Ensemble(basis_, std::move(covariance), mean_, domain_);
}

// Densities -------------------------------------------------------------------

namespace {

void require_in_domain(const Ensemble& e, double t) {
  if (!std::isfinite(t) || !e.domain().contains(t))
    throw DomainError("t = " + std::to_string(t) + " is outside the ensemble domain [" +
                      std::to_string(e.domain().lo) + ", " + std::to_string(e.domain().hi) + "]");
}

// w(t) = Lᵀv(t) and w′(t), as returned by the evaluator (no extra scaling).
std::pair<VectorXd, VectorXd> whitened(const Ensemble& e, double t) {
  const int n = e.dimension();
  VectorXd v(n), dv(n);
  e.basis().evaluate(t, v, dv);
  if (!v.allFinite() || !dv.allFinite())
    throw EvaluationError("basis evaluator returned a non-finite value at t = " + std::to_string(t));
  return {e.covariance().whiten(v), e.covariance().whiten(dv)};
}

double dot(const VectorXd& x, const VectorXd& y) {
  CompensatedSum s;
  for (Eigen::Index k = 0; k < x.size(); ++k) s.add(x(k) * y(k));
  return s.value();
}

}  // namespace

double KernelJet::speed() const {
  if (!(a > 0.0)) throw EvaluationError("kernel A is not positive");
  return std::sqrt(std::max(gram, 0.0)) / a;
}

KernelJet kernel_jet(const Ensemble& e, double t) {
  require_in_domain(e, t);
  auto [w, dw] = whitened(e, t);
  const auto& tail = e.basis().tail();
  if (!tail) {
    // A common rescaling leaves every density unchanged; only use it to keep
    // the squares representable.
    const double big = std::max(w.cwiseAbs().maxCoeff(), dw.cwiseAbs().maxCoeff());
    if (big > 1e150 || (big < 1e-150 && big > 0.0)) {
      w /= big;
      dw /= big;
    }
  }
  KernelJet j;
  j.t = t;
  j.a = dot(w, w);
  j.b = dot(dw, w);
  j.d = dot(dw, dw);
  if (tail) {
    const Eigen::Vector3d r = tail->jet(t);
    j.a += r(0);
    j.b += r(1);
    j.d += r(2);
    j.gram = j.a * j.d - j.b * j.b;
  } else if (j.a > 0.0) {
    const VectorXd resid = dw - (j.b / j.a) * w;
    j.gram = j.a * dot(resid, resid);
  }
  if (!(j.a > 0.0) || !std::isfinite(j.a))
    throw EvaluationError("v·Cv is not positive at t = " + std::to_string(t));
  const double naive = j.a * j.d - j.b * j.b;
  if (naive < -1e-10 * j.a * j.d && j.gram < -1e-10 * j.a * j.d)
    throw EvaluationError("Cauchy-Schwarz violated beyond slack at t = " + std::to_string(t));
  return j;
}

double kernel_value(const Ensemble& e, double x, double y) {
  require_in_domain(e, x);
  require_in_domain(e, y);
  const auto wx = whitened(e, x).first;
  const auto wy = whitened(e, y).first;
  double k = dot(wx, wy);
  if (const auto& tail = e.basis().tail()) k += tail->kernel(x, y);
  return k;
}

double density_central(const Ensemble& e, double t) { return kernel_jet(e, t).speed() / kPi; }

double density_central_logderiv(const Ensemble& e, double t, double h) {
  require_in_domain(e, t);
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  const VectorXd wp = whitened(e, t + h).first;
  const VectorXd wm = whitened(e, t - h).first;
  double kpp = dot(wp, wp);
  double kmm = dot(wm, wm);
  double kpm = dot(wp, wm);
  double stencil;
  if (const auto& tail = e.basis().tail()) {
    kpp += tail->kernel(t + h, t + h);
    kmm += tail->kernel(t - h, t - h);
    kpm += tail->kernel(t + h, t - h);
    if (!(kpp > 0.0 && kmm > 0.0 && kpm > 0.0))
      throw EvaluationError("kernel is not positive near t = " + std::to_string(t));
    stencil = std::log(kpp) + std::log(kmm) - 2.0 * std::log(kpm);
  } else {
    if (!(kpp > 0.0 && kmm > 0.0 && kpm > 0.0))
      throw EvaluationError("kernel is not positive near t = " + std::to_string(t));
    // log K(+,+) + log K(−,−) − 2 log K(+,−) = log1p((K₊₊K₋₋ − K₊₋²)/K₊₋²), and
    // the Gram determinant equals K₊₊·‖w₋ − (K₊₋/K₊₊)w₊‖² without cancellation.
    const VectorXd resid = wm - (kpm / kpp) * wp;
    stencil = std::log1p(kpp * dot(resid, resid) / (kpm * kpm));
  }
  const double mixed = stencil / (4.0 * h * h);
  return std::sqrt(std::max(mixed, 0.0)) / kPi;
}

namespace {

double projected_mean(const Ensemble& e, double t) {
  const MeanSpec& m = e.mean();
  switch (m.kind) {
    case MeanSpec::Kind::Zero:
      return 0.0;
    case MeanSpec::Kind::Case1:
      return m.scale;
    case MeanSpec::Kind::Case2: {
      if (m.projected) return m.projected(t);
      if (t == m.anchor) return m.scale;
      const double lo = std::min(t, m.anchor), hi = std::max(t, m.anchor);
      const double sign = t > m.anchor ? 1.0 : -1.0;
      const QuadResult q =
          integrate_adaptive([&](double x) { return kernel_jet(e, x).speed(); }, Interval::make(lo, hi), 1e-13);
      return m.scale * std::exp(sign * q.value);
    }
    case MeanSpec::Kind::CoefficientVector: {
      const int n = e.dimension();
      VectorXd v(n), dv(n);
      e.basis().evaluate(t, v, dv);
      const VectorXd w = e.covariance().whiten(v);
      double a = dot(w, w);
      if (const auto& tail = e.basis().tail()) a += tail->jet(t)(0);
      if (!(a > 0.0)) throw EvaluationError("v·Cv is not positive at t = " + std::to_string(t));
      return dot(*m.coefficients, v) / std::sqrt(a);
    }
  }
  return 0.0;
}

}  // namespace

MeanProjection mean_projection(const Ensemble& e, double t) {
  require_in_domain(e, t);
  if (e.mean().is_zero()) throw DomainError("mean_projection requires a nonzero mean");
  MeanProjection p;
  p.gamma_speed = kernel_jet(e, t).speed();
  if (!(p.gamma_speed > 0.0))
    throw EvaluationError("projected curve has zero speed at t = " + std::to_string(t));
  p.m0 = projected_mean(e, t);
  if (e.mean().kind == MeanSpec::Kind::Case1) {
    p.m1 = 0.0;
  } else {
    const double h = std::max(1e-6, 1e-6 * std::abs(t));
    const double d0 = (projected_mean(e, t + h) - projected_mean(e, t - h)) / (2.0 * h);
    p.m1 = d0 / p.gamma_speed;
  }
  return p;
}

double density_noncentral(const Ensemble& e, double t) {
  if (e.mean().is_zero()) return density_central(e, t);
  const MeanProjection p = mean_projection(e, t);
  const double m1 = p.m1;
  const double bracket = std::exp(-0.5 * m1 * m1) + std::sqrt(0.5 * kPi) * m1 * erf(m1 / std::sqrt(2.0));
  return p.gamma_speed / kPi * std::exp(-0.5 * p.m0 * p.m0) * bracket;
}

double density(const Ensemble& e, double t) {
  return e.mean().is_zero() ? density_central(e, t) : density_noncentral(e, t);
}

namespace {

std::vector<Interval> split_at_breakpoints(const Ensemble& e, const Interval& interval) {
  std::vector<double> cuts;
  for (double b : e.basis().breakpoints())
    if (b > interval.lo && b < interval.hi) cuts.push_back(b);
  std::vector<Interval> pieces;
  double lo = interval.lo;
  for (double c : cuts) {
    pieces.push_back({lo, c});
    lo = c;
  }
  pieces.push_back({lo, interval.hi});
  return pieces;
}

void require_subinterval(const Ensemble& e, const Interval& interval) {
  if (!(interval.lo < interval.hi)) throw DomainError("interval must satisfy lo < hi");
  if (!e.domain().contains(interval))
    throw DomainError("interval [" + std::to_string(interval.lo) + ", " + std::to_string(interval.hi) +
                      "] is not inside the ensemble domain");
}

}  // namespace

QuadResult expected_zeros(const Ensemble& e, const Interval& interval, double tol) {
  require_subinterval(e, interval);
  const auto pieces = split_at_breakpoints(e, interval);
  const double piece_tol = tol / static_cast<double>(pieces.size());
  const bool central = e.mean().is_zero();
  QuadResult total;
  CompensatedSum value;
  for (const auto& piece : pieces) {
    const QuadResult q = integrate_adaptive(
        [&](double t) { return central ? density_central(e, t) : density_noncentral(e, t); }, piece, piece_tol);
    value.add(q.value);
    total.err_estimate += q.err_estimate;
    total.evaluations += q.evaluations;
  }
  total.value = value.value();
  return total;
}

double projected_arclength(const Ensemble& e, const Interval& interval, double tol) {
  require_subinterval(e, interval);
  if (!e.mean().is_zero()) throw DomainError("projected_arclength requires a central ensemble");
  if (e.basis().tail()) throw UnsupportedError("projected_arclength needs a finite basis");
  auto gamma = [&](double t) {
    VectorXd w = whitened(e, t).first;
    const double norm = std::sqrt(dot(w, w));
    if (!(norm > 0.0)) throw EvaluationError("w(t) vanishes at t = " + std::to_string(t));
    return VectorXd(w / norm);
  };
  auto speed = [&](double t) {
    const double h = 1e-5 * std::max(1.0, std::abs(t));
    const VectorXd diff = gamma(t + h) - gamma(t - h);
    return std::sqrt(dot(diff, diff)) / (2.0 * h);
  };
  const auto pieces = split_at_breakpoints(e, interval);
  CompensatedSum length;
  for (const auto& piece : pieces)
    length.add(integrate_adaptive(speed, piece, tol / static_cast<double>(pieces.size())).value);
  return length.value();
}

}  // namespace rz
