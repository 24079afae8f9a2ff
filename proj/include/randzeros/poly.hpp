#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <utility>

namespace rz {

/// Univariate polynomial with coefficients stored in ascending degree.
///
/// The zero polynomial is represented by a single zero coefficient and has
/// degree 0. Trailing (high-degree) zeros are removed on construction so the
/// leading coefficient is nonzero for every other polynomial.
template <typename Scalar>
class BasicPoly {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicPoly() : coeffs_(Coeffs::Zero(1)) {}
  explicit BasicPoly(Coeffs c) : coeffs_(std::move(c)) { trim(); }
  BasicPoly(std::initializer_list<Scalar> c) : coeffs_(static_cast<Eigen::Index>(c.size())) {
    std::copy(c.begin(), c.end(), coeffs_.data());
    trim();
  }

  static BasicPoly constant(Scalar c) { return BasicPoly(Coeffs::Constant(1, c)); }
  static BasicPoly monomial(int k, Scalar c = Scalar(1)) {
    Coeffs v = Coeffs::Zero(k + 1);
    v(k) = c;
    return BasicPoly(std::move(v));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_(0) == Scalar(0); }
  Scalar operator[](int k) const { return k <= degree() ? coeffs_(k) : Scalar(0); }
  Scalar leading() const { return coeffs_(degree()); }
  const Coeffs& coeffs() const { return coeffs_; }

  /// Max-abs coefficient; the scale used for relative tolerances.
  double norm_inf() const { return coeffs_.cwiseAbs().maxCoeff(); }

 private:
  void trim() {
    if (coeffs_.size() == 0) {
      coeffs_ = Coeffs::Zero(1);
      return;
    }
    Eigen::Index n = coeffs_.size();
    while (n > 1 && coeffs_(n - 1) == Scalar(0)) --n;
    coeffs_.conservativeResize(n);
  }

  Coeffs coeffs_;
};

using Poly = BasicPoly<double>;
using ComplexPoly = BasicPoly<std::complex<double>>;

template <typename S>
BasicPoly<S> operator+(const BasicPoly<S>& p, const BasicPoly<S>& q) {
  const int n = std::max(p.degree(), q.degree());
  typename BasicPoly<S>::Coeffs c(n + 1);
  for (int k = 0; k <= n; ++k) c(k) = p[k] + q[k];
  return BasicPoly<S>(std::move(c));
}

template <typename S>
BasicPoly<S> operator-(const BasicPoly<S>& p, const BasicPoly<S>& q) {
  const int n = std::max(p.degree(), q.degree());
  typename BasicPoly<S>::Coeffs c(n + 1);
  for (int k = 0; k <= n; ++k) c(k) = p[k] - q[k];
  return BasicPoly<S>(std::move(c));
}

template <typename S>
BasicPoly<S> operator*(S a, const BasicPoly<S>& p) {
  return BasicPoly<S>(typename BasicPoly<S>::Coeffs(a * p.coeffs()));
}

/// Product by direct convolution.
template <typename S>
BasicPoly<S> mul(const BasicPoly<S>& p, const BasicPoly<S>& q) {
  typename BasicPoly<S>::Coeffs c = BasicPoly<S>::Coeffs::Zero(p.degree() + q.degree() + 1);
  for (int i = 0; i <= p.degree(); ++i)
    for (int j = 0; j <= q.degree(); ++j) c(i + j) += p[i] * q[j];
  return BasicPoly<S>(std::move(c));
}

template <typename S>
BasicPoly<S> operator*(const BasicPoly<S>& p, const BasicPoly<S>& q) {
  return mul(p, q);
}

template <typename S>
BasicPoly<S> diff(const BasicPoly<S>& p) {
  if (p.degree() == 0) return BasicPoly<S>();
  typename BasicPoly<S>::Coeffs c(p.degree());
  for (int k = 1; k <= p.degree(); ++k) c(k - 1) = S(k) * p[k];
  return BasicPoly<S>(std::move(c));
}

/// Horner evaluation; X may be real or complex independently of the coefficient type.
template <typename S, typename X>
auto eval(const BasicPoly<S>& p, X x) {
  using R = decltype(S() * X());
  R acc = R(p.leading());
  for (int k = p.degree() - 1; k >= 0; --k) acc = acc * x + R(p[k]);
  return acc;
}

/// Value and first derivative by a single fused Horner pass.
template <typename S, typename X>
auto eval_with_deriv(const BasicPoly<S>& p, X x) {
  using R = decltype(S() * X());
  R value = R(p.leading());
  R deriv = R(0);
  for (int k = p.degree() - 1; k >= 0; --k) {
    deriv = deriv * x + value;
    value = value * x + R(p[k]);
  }
  return std::pair<R, R>{value, deriv};
}

/// Polynomial division p = q*d + r. The divisor must be nonzero.
template <typename S>
std::pair<BasicPoly<S>, BasicPoly<S>> divmod(const BasicPoly<S>& p, const BasicPoly<S>& d) {
  using Coeffs = typename BasicPoly<S>::Coeffs;
  if (p.degree() < d.degree()) return {BasicPoly<S>(), p};
  Coeffs r = p.coeffs();
  Coeffs q = Coeffs::Zero(p.degree() - d.degree() + 1);
  const S lead = d.leading();
  for (int k = p.degree() - d.degree(); k >= 0; --k) {
    const S factor = r(k + d.degree()) / lead;
    q(k) = factor;
    for (int j = 0; j <= d.degree(); ++j) r(k + j) -= factor * d[j];
    r(k + d.degree()) = S(0);
  }
  Coeffs rem = d.degree() > 0 ? Coeffs(r.head(d.degree())) : Coeffs::Zero(1);
  return {BasicPoly<S>(std::move(q)), BasicPoly<S>(std::move(rem))};
}

}  // namespace rz
