#include "randzeros/systems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <sstream>

#include "randzeros/ensembles.hpp"

namespace rz {

namespace {

using Eigen::VectorXd;
using Tag = SystemFamily::Tag;

void require_m(int m) {
  if (m < 1) throw DomainError("number of equations must be at least 1");
}

void require_dim(const SystemFamily& f, const VectorXd& t) {
  if (t.size() != f.m)
    throw DomainError("point has " + std::to_string(t.size()) + " coordinates, family has m = " + std::to_string(f.m));
  if (!t.allFinite()) throw DomainError("point must be finite");
}

double harmonic_expected(int d, int m) { return std::pow(static_cast<double>(d) * (d + m - 1) / m, 0.5 * m); }

double kostlan_expected(const std::vector<int>& degrees) {
  double p = 1.0;
  for (int d : degrees) p *= d;
  return std::sqrt(p);
}

}  // namespace

SystemFamily SystemFamily::hypercube_kac(int d, int m) {
  require_m(m);
  if (d < 1) throw DomainError("degree must be at least 1");
  SystemFamily f;
  f.tag = Tag::HypercubeKac;
  f.d = d;
  f.m = m;
  return f;
}

SystemFamily SystemFamily::kostlan(std::vector<int> degrees) {
  if (degrees.empty()) throw DomainError("number of equations must be at least 1");
  for (int d : degrees)
    if (d < 1) throw DomainError("degrees must be at least 1");
  SystemFamily f;
  f.tag = Tag::KostlanMultihomogeneous;
  f.m = static_cast<int>(degrees.size());
  f.d = degrees.front();
  f.degrees = std::move(degrees);
  return f;
}

SystemFamily SystemFamily::harmonic(int d, int m) {
  require_m(m);
  if (d < 1) throw DomainError("degree must be at least 1");
  SystemFamily f;
  f.tag = Tag::Harmonic;
  f.d = d;
  f.m = m;
  return f;
}

SystemFamily SystemFamily::power_series(int m) {
  require_m(m);
  SystemFamily f;
  f.tag = Tag::PowerSeries;
  f.m = m;
  return f;
}

SystemFamily SystemFamily::entire(int m) {
  require_m(m);
  SystemFamily f;
  f.tag = Tag::Entire;
  f.m = m;
  return f;
}

std::string SystemFamily::name() const {
  const std::string ms = std::to_string(m);
  switch (tag) {
    case Tag::HypercubeKac:
      return "hypercube_kac(d=" + std::to_string(d) + ", m=" + ms + ")";
    case Tag::KostlanMultihomogeneous: {
      std::string s = "kostlan(";
      for (std::size_t i = 0; i < degrees.size(); ++i) s += (i ? "," : "") + std::to_string(degrees[i]);
      return s + ")";
    }
    case Tag::Harmonic:
      return "harmonic(d=" + std::to_string(d) + ", m=" + ms + ")";
    case Tag::PowerSeries:
      return "power_series(m=" + ms + ")";
    case Tag::Entire:
      return "entire(m=" + ms + ")";
  }
  return "?";
}

double systems_constant(int m) {
  require_m(m);
  return std::exp(log_gamma(0.5 * (m + 1)) - 0.5 * (m + 1) * std::log(kPi));
}

double systems_expected(const SystemFamily& f) {
  switch (f.tag) {
    case Tag::HypercubeKac: {
      const double e1 = expected_zeros(make_ensemble(ClosedFormFamily::kac(f.d)), Interval::real_line(), 1e-12).value;
      return systems_constant(f.m) * std::pow(kPi * e1, f.m);
    }
    case Tag::KostlanMultihomogeneous:
      return kostlan_expected(f.degrees);
    case Tag::Harmonic:
      return harmonic_expected(f.d, f.m);
    case Tag::PowerSeries:
    case Tag::Entire:
      return kInf;
  }
  return 0.0;
}

double systems_density(const SystemFamily& f, const VectorXd& t) {
  require_dim(f, t);
  const double c = systems_constant(f.m);
  const double r2 = t.squaredNorm();
  switch (f.tag) {
    case Tag::HypercubeKac: {
      const ClosedFormFamily kac = ClosedFormFamily::kac(f.d);
      double p = c;
      for (Eigen::Index i = 0; i < t.size(); ++i) p *= kPi * closed_form_density(kac, t(i));
      return p;
    }
    case Tag::KostlanMultihomogeneous:
      return c * kostlan_expected(f.degrees) / std::pow(1.0 + r2, 0.5 * (f.m + 1));
    case Tag::Harmonic:
      return c * harmonic_expected(f.d, f.m) / std::pow(1.0 + r2, 0.5 * (f.m + 1));
    case Tag::PowerSeries: {
      double p = c;
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (!(std::abs(t(i)) < 1.0)) throw DomainError("power series system needs |t_k| < 1");
        p /= (1.0 - t(i)) * (1.0 + t(i));
      }
      return p;
    }
    case Tag::Entire:
      return c;
  }
  return 0.0;
}

MultiKernel system_kernel(const SystemFamily& f) {
  switch (f.tag) {
    case Tag::HypercubeKac: {
      const int d = f.d;
      return [d](const VectorXd& x, const VectorXd& y) {
        double k = 1.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double z = x(i) * y(i);
          double s = 0.0, p = 1.0;
          for (int j = 0; j <= d; ++j) {
            s += p;
            p *= z;
          }
          k *= s;
        }
        return k;
      };
    }
    case Tag::KostlanMultihomogeneous: {
      for (int d : f.degrees)
        if (d != f.degrees.front())
          throw UnsupportedError("mixed-degree Kostlan systems have no common kernel");
      const int d = f.degrees.front();
      return [d](const VectorXd& x, const VectorXd& y) { return std::pow(1.0 + x.dot(y), d); };
    }
    case Tag::Harmonic: {
      const HarmonicCoeffs hc = harmonic_coeffs(f.d, f.m);
      const int d = f.d;
      // Σ βₖ (x̂·x̂)ᵏ (ŷ·ŷ)ᵏ (x̂·ŷ)^(d−2k) with x̂ = (1, x)
      return [hc, d](const VectorXd& x, const VectorXd& y) {
        const double xx = 1.0 + x.squaredNorm();
        const double yy = 1.0 + y.squaredNorm();
        const double xy = 1.0 + x.dot(y);
        double k = 0.0;
        for (std::size_t j = 0; j < hc.beta.size(); ++j) {
          const int jj = static_cast<int>(j);
          k += hc.beta[j] * std::pow(xx * yy, jj) * std::pow(xy, d - 2 * jj);
        }
        return k;
      };
    }
    case Tag::PowerSeries:
      return [](const VectorXd& x, const VectorXd& y) {
        double k = 1.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) k /= 1.0 - x(i) * y(i);
        return k;
      };
    case Tag::Entire:
      return [](const VectorXd& x, const VectorXd& y) { return std::exp(x.dot(y)); };
  }
  throw UnsupportedError("unknown system family");
}

double systems_density_general(const MultiKernel& kernel, const VectorXd& t, double h) {
  const int m = static_cast<int>(t.size());
  if (m < 1 || m > 3) throw UnsupportedError("systems_density_general supports 1 <= m <= 3");
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  auto log_k = [&](const VectorXd& x, const VectorXd& y) {
    const double k = kernel(x, y);
    if (!(k > 0.0) || !std::isfinite(k)) throw EvaluationError("kernel is not positive near the evaluation point");
    return std::log(k);
  };
  Eigen::MatrixXd hess(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      VectorXd xp = t, xm = t, yp = t, ym = t;
      xp(i) += h;
      xm(i) -= h;
      yp(j) += h;
      ym(j) -= h;
      hess(i, j) = (log_k(xp, yp) - log_k(xp, ym) - log_k(xm, yp) + log_k(xm, ym)) / (4.0 * h * h);
    }
  }
  const Eigen::MatrixXd sym = 0.5 * (hess + hess.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const VectorXd lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -1e-8) throw EvaluationError("log-kernel Hessian is not positive semidefinite");
  double det = 1.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) det *= std::max(lambda(i), 0.0);
  return systems_constant(m) * std::sqrt(det);
}

double systems_expected_numeric(const SystemFamily& f, double tol) {
  Interval axis = Interval::real_line();
  if (f.tag == Tag::PowerSeries || f.tag == Tag::Entire)
    throw DomainError("the expected count of " + f.name() + " is infinite");
  if (f.m == 1) {
    return integrate_adaptive([&](double x) { return systems_density(f, VectorXd::Constant(1, x)); }, axis, tol).value;
  }
  if (f.m != 2) throw UnsupportedError("systems_expected_numeric supports m <= 2");
  auto inner = [&](double x) {
    return integrate_adaptive([&](double y) { return systems_density(f, Eigen::Vector2d(x, y)); }, axis, tol).value;
  };
  return integrate_adaptive(inner, axis, tol).value;
}

// Exact rationals ---------------------------------------------------------------

namespace {

void add_factors(std::map<long, int>& exps, long n, int power) {
  for (long p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      exps[p] += power;
      n /= p;
    }
  }
  if (n > 1) exps[n] += power;
}

void prune(std::map<long, int>& exps) {
  for (auto it = exps.begin(); it != exps.end();) it = it->second == 0 ? exps.erase(it) : std::next(it);
}

}  // namespace

FactoredRational FactoredRational::integer(long n) {
  FactoredRational r;
  if (n == 0) return r;
  r.sign_ = n < 0 ? -1 : 1;
  add_factors(r.exps_, std::abs(n), 1);
  return r;
}

FactoredRational FactoredRational::double_factorial(int n) {
  if (n < -1) throw DomainError("double factorial needs n >= -1");
  FactoredRational r = integer(1);
  for (int k = n; k >= 2; k -= 2) add_factors(r.exps_, k, 1);
  return r;
}

FactoredRational FactoredRational::factorial(int n) {
  if (n < 0) throw DomainError("factorial needs n >= 0");
  FactoredRational r = integer(1);
  for (int k = 2; k <= n; ++k) add_factors(r.exps_, k, 1);
  return r;
}

FactoredRational operator*(const FactoredRational& a, const FactoredRational& b) {
  FactoredRational r;
  r.sign_ = a.sign_ * b.sign_;
  if (r.sign_ == 0) return r;
  r.exps_ = a.exps_;
  for (const auto& [p, e] : b.exps_) r.exps_[p] += e;
  prune(r.exps_);
  return r;
}

FactoredRational operator/(const FactoredRational& a, const FactoredRational& b) {
  if (b.sign_ == 0) throw DomainError("division by zero");
  FactoredRational r;
  r.sign_ = a.sign_ * b.sign_;
  if (r.sign_ == 0) return r;
  r.exps_ = a.exps_;
  for (const auto& [p, e] : b.exps_) r.exps_[p] -= e;
  prune(r.exps_);
  return r;
}

FactoredRational operator-(const FactoredRational& a) {
  FactoredRational r = a;
  r.sign_ = -r.sign_;
  return r;
}

double FactoredRational::to_double() const {
  if (sign_ == 0) return 0.0;
  double log_abs = 0.0;
  for (const auto& [p, e] : exps_) log_abs += e * std::log(static_cast<double>(p));
  return sign_ * std::exp(log_abs);
}

std::string FactoredRational::str() const {
  if (sign_ == 0) return "0";
  std::ostringstream num, den;
  bool any_num = false, any_den = false;
  for (const auto& [p, e] : exps_) {
    auto& os = e > 0 ? num : den;
    bool& any = e > 0 ? any_num : any_den;
    os << (any ? "*" : "") << p;
    if (std::abs(e) != 1) os << "^" << std::abs(e);
    any = true;
  }
  std::string s = sign_ < 0 ? "-" : "";
  s += any_num ? num.str() : "1";
  if (any_den) s += "/" + den.str();
  return s;
}

// Harmonic coefficients ------------------------------------------------------------

FactoredRational harmonic_beta_exact(int d, int m, int k) {
  if (d < 1 || m < 1) throw DomainError("harmonic coefficients need d, m >= 1");
  if (d > 30) throw DomainError("exact harmonic coefficients support d <= 30; use harmonic_coeffs");
  if (k < 0 || 2 * k > d) throw DomainError("harmonic coefficient index out of range");
  using R = FactoredRational;
  const R num = R::factorial(d) * R::double_factorial(m + 2 * d - 2 * k - 3);
  const R den = R::integer(1L << k) * R::factorial(k) * R::factorial(d - 2 * k) * R::double_factorial(m + 2 * d - 3);
  const R ratio = num / den;
  return k % 2 == 0 ? ratio : -ratio;
}

bool harmonic_recurrence_holds(int d, int m) {
  using R = FactoredRational;
  R prev = harmonic_beta_exact(d, m, 0);
  if (!(prev == R::integer(1))) return false;
  for (int k = 1; 2 * k <= d; ++k) {
    const R cur = harmonic_beta_exact(d, m, k);
    // 2k(m+2d−2k−1)βₖ = −(d−2k+2)(d−2k+1)βₖ₋₁
    const R lhs = R::integer(2L * k * (m + 2 * d - 2 * k - 1)) * cur;
    const R rhs = -(R::integer(static_cast<long>(d - 2 * k + 2) * (d - 2 * k + 1)) * prev);
    if (!(lhs == rhs)) return false;
    prev = cur;
  }
  return true;
}

HarmonicCoeffs harmonic_coeffs(int d, int m) {
  if (d < 1 || m < 1) throw DomainError("harmonic coefficients need d, m >= 1");
  HarmonicCoeffs hc;
  hc.d = d;
  hc.m = m;
  hc.beta.push_back(1.0);
  for (int k = 1; 2 * k <= d; ++k)
    hc.beta.push_back(-hc.beta.back() * (d - 2 * k + 2) * (d - 2 * k + 1) / (2.0 * k * (m + 2 * d - 2 * k - 1)));
  if (d <= 30) {
    if (!harmonic_recurrence_holds(d, m))
      throw EvaluationError("harmonic coefficients fail their defining recurrence");
    hc.exact_verified = true;
  }
  return hc;
}

}  // namespace rz
