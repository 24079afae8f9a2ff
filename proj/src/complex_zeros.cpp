#include "randzeros/complex_zeros.hpp"

#include <algorithm>
#include <cmath>

namespace rz {

namespace {

using Tag = VarianceGeneratingFunction::Tag;

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

// Mean and variance of k under weights σₖ² xᵏ, accumulated in log space with a
// running maximum so neither huge nor tiny weights overflow.
Moments weighted_moments(const VarianceGeneratingFunction& phi, double r) {
  const double log_x = 2.0 * std::log(r);
  const int deg = phi.degree();
  double log_max = -kInf;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  auto add = [&](int k, double log_w) {
    if (log_w > log_max) {
      const double f = std::exp(log_max - log_w);
      s0 *= f;
      s1 *= f;
      s2 *= f;
      log_max = log_w;
    }
    const double w = std::exp(log_w - log_max);
    s0 += w;
    s1 += w * k;
    s2 += w * static_cast<double>(k) * k;
  };
  if (deg >= 0) {
    for (int k = 0; k <= deg; ++k) {
      const double v = phi.variance(k);
      if (v > 0.0) add(k, std::log(v) + k * log_x);
    }
  } else {
    // Series: stop once the terms decrease geometrically with ratio q < 1 and
    // the dominated tail k²·w·q/(1−q)³ is below 1e−17 of the sum.
    double prev = -kInf;
    constexpr int kMaxTerms = 10'000'000;
    for (int k = 0; k < kMaxTerms; ++k) {
      const double v = phi.variance(k);
      const double log_w = v > 0.0 ? std::log(v) + k * log_x : -kInf;
      if (log_w > -kInf) add(k, log_w);
      if (k > 2 && log_w > -kInf && prev > -kInf) {
        const double q = std::exp(log_w - prev);
        if (q < 1.0) {
          const double kk = k + 1.0;
          const double bound = std::exp(log_w - log_max) * kk * kk * q / std::pow(1.0 - q, 3);
          if (bound < 1e-17 * s0) break;
        }
      }
      if (k + 1 == kMaxTerms) throw ConvergenceError("variance series did not converge at r = " + std::to_string(r));
      if (log_w > -kInf) prev = log_w;
    }
  }
  if (!(s0 > 0.0)) throw EvaluationError("variance generating function vanishes");
  Moments m;
  m.mean = s1 / s0;
  m.var = std::max(s2 / s0 - m.mean * m.mean, 0.0);
  return m;
}

void require_radius(const VarianceGeneratingFunction& phi, double r) {
  if (!(r >= 0.0) || std::isnan(r)) throw DomainError("radius must be nonnegative");
  if (phi.tag == Tag::Custom && phi.degree() < 0 && !(r < phi.radius))
    throw DomainError("radius " + std::to_string(r) + " is outside the radius of convergence");
}

}  // namespace

VarianceGeneratingFunction VarianceGeneratingFunction::kac_complex(int n) {
  if (n < 1) throw DomainError("degree must be at least 1");
  VarianceGeneratingFunction v;
  v.tag = Tag::KacComplex;
  v.n = n;
  return v;
}

VarianceGeneratingFunction VarianceGeneratingFunction::kostlan_complex(int n) {
  if (n < 1) throw DomainError("degree must be at least 1");
  VarianceGeneratingFunction v;
  v.tag = Tag::KostlanComplex;
  v.n = n;
  return v;
}

VarianceGeneratingFunction VarianceGeneratingFunction::entire_order_type(double rho, double tau) {
  if (!(rho > 0.0) || !(tau > 0.0)) throw DomainError("order and type must be positive");
  VarianceGeneratingFunction v;
  v.tag = Tag::EntireOrderType;
  v.rho = rho;
  v.tau = tau;
  return v;
}

VarianceGeneratingFunction VarianceGeneratingFunction::custom(std::vector<double> sigma2) {
  if (sigma2.empty()) throw DomainError("custom variances must be nonempty");
  for (double s : sigma2)
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("variances must be finite and nonnegative");
  VarianceGeneratingFunction v;
  v.tag = Tag::Custom;
  v.custom_degree = static_cast<int>(sigma2.size()) - 1;
  v.sigma2 = [s = std::move(sigma2)](int k) { return s[static_cast<std::size_t>(k)]; };
  return v;
}

VarianceGeneratingFunction VarianceGeneratingFunction::custom(std::function<double(int)> sigma2, double radius) {
  if (!sigma2) throw DomainError("custom variances need a generator");
  if (!(radius > 0.0)) throw DomainError("radius of convergence must be positive");
  VarianceGeneratingFunction v;
  v.tag = Tag::Custom;
  v.sigma2 = std::move(sigma2);
  v.radius = radius;
  return v;
}

int VarianceGeneratingFunction::degree() const {
  switch (tag) {
    case Tag::KacComplex:
    case Tag::KostlanComplex:
      return n;
    case Tag::EntireOrderType:
      return -1;
    case Tag::Custom:
      return custom_degree;
  }
  return -1;
}

double VarianceGeneratingFunction::variance(int k) const {
  switch (tag) {
    case Tag::KacComplex:
      return k <= n ? 1.0 : 0.0;
    case Tag::KostlanComplex:
      if (k > n) return 0.0;
      return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
    case Tag::EntireOrderType:
      throw UnsupportedError("order/type profiles are analytic; no coefficient variances");
    case Tag::Custom:
      return sigma2(k);
  }
  return 0.0;
}

std::string VarianceGeneratingFunction::name() const {
  switch (tag) {
    case Tag::KacComplex:
      return "kac_complex(" + std::to_string(n) + ")";
    case Tag::KostlanComplex:
      return "kostlan_complex(" + std::to_string(n) + ")";
    case Tag::EntireOrderType:
      return "entire_order_type(" + std::to_string(rho) + ", " + std::to_string(tau) + ")";
    case Tag::Custom:
      return "custom";
  }
  return "?";
}

double radial_count(const VarianceGeneratingFunction& phi, double r) {
  require_radius(phi, r);
  if (phi.tag == Tag::EntireOrderType) return phi.tau * phi.rho * std::pow(r, phi.rho);
  if (r == 0.0) return 0.0;
  if (std::isinf(r)) return phi.degree() >= 0 ? static_cast<double>(phi.degree()) : kInf;
  return weighted_moments(phi, r).mean;
}

double radial_density(const VarianceGeneratingFunction& phi, double r) {
  require_radius(phi, r);
  if (phi.tag == Tag::EntireOrderType) return phi.tau * phi.rho * phi.rho * std::pow(r, phi.rho - 1.0);
  if (r == 0.0 || std::isinf(r)) return 0.0;
  return 2.0 * weighted_moments(phi, r).var / r;
}

RadialProfile radial_profile(const VarianceGeneratingFunction& phi, const std::vector<double>& radii) {
  RadialProfile p;
  p.radii = radii;
  p.n_of_r.reserve(radii.size());
  for (double r : radii) p.n_of_r.push_back(radial_count(phi, r));
  return p;
}

double dirichlet_strip_count(double x1, double x2, double y1, double y2) {
  if (!(x1 > 0.5)) throw DomainError("strip must lie right of the critical line (x1 > 1/2)");
  if (!(x2 >= x1) || !(y2 >= y1)) throw DomainError("strip needs x1 <= x2 and y1 <= y2");
  if (x1 == x2 || y1 == y2) return 0.0;
  auto log_deriv = [](double x) { return zeta_derivs(2.0 * x, 1) / zeta_derivs(2.0 * x, 0); };
  return (log_deriv(x2) - log_deriv(x1)) * (y2 - y1) / (2.0 * kPi);
}

}  // namespace rz
