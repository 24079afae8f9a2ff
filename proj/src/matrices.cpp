#include "randzeros/matrices.hpp"

#include <cmath>
#include <string>

namespace rz {

double real_eigen_expected(int n) {
  if (n < 1) throw DomainError("matrix order must be at least 1");
  // Successive double-factorial ratios by multiplication; lgamma differences lose digits for large n.
  CompensatedSum s;
  if (n % 2 == 0) {
    double r = 1.0;  // (4k−1)!!/(4k)!!
    for (int k = 0; k <= n / 2 - 1; ++k) {
      if (k > 0) r *= (4.0 * k - 3) * (4.0 * k - 1) / ((4.0 * k - 2) * (4.0 * k));
      s.add(r);
    }
    return std::sqrt(2.0) * s.value();
  }
  double r = 0.5;  // (4k−3)!!/(4k−2)!!
  for (int k = 1; k <= (n - 1) / 2; ++k) {
    if (k > 1) r *= (4.0 * k - 5) * (4.0 * k - 3) / ((4.0 * k - 4) * (4.0 * k - 2));
    s.add(r);
  }
  return 1.0 + std::sqrt(2.0) * s.value();
}

double real_eigen_asymptotic(int n) {
  if (n < 1) throw DomainError("matrix order must be at least 1");
  return std::sqrt(2.0 * n / kPi);
}

double matrix_poly_factor(int p) {
  if (p < 1) throw DomainError("matrix size must be at least 1");
  return std::sqrt(kPi) * std::exp(log_gamma(0.5 * (p + 1)) - log_gamma(0.5 * p));
}

Eigen::MatrixXd kac_matrix(int n) {
  if (n < 1) throw DomainError("kac_matrix needs n >= 1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int k = 0; k < n; ++k) {
    m(k, k + 1) = n - k;
    m(k + 1, k) = k + 1;
  }
  return m;
}

Poly char_poly(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n < 1 || a.cols() != n) throw DomainError("char_poly needs a nonempty square matrix");
  if (n > 12) throw DomainError("char_poly is limited to order 12, got " + std::to_string(n));
  Eigen::VectorXd c(n + 1);
  c(n) = 1.0;
  Eigen::MatrixXd mk = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = a * mk + c(n - k + 1) * id;
    c(n - k) = -(a * mk).trace() / static_cast<double>(k);
  }
  return Poly(std::move(c));
}

PolyMatrix matrix_polynomial(const std::vector<Eigen::MatrixXd>& coeffs) {
  if (coeffs.empty()) throw DomainError("matrix polynomial needs at least one coefficient");
  const Eigen::Index p = coeffs.front().rows();
  for (const auto& c : coeffs)
    if (c.rows() != p || c.cols() != p) throw DomainError("matrix coefficients must be square of equal order");
  PolyMatrix m(p, std::vector<Poly>(p));
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      Eigen::VectorXd e(coeffs.size());
      for (std::size_t k = 0; k < coeffs.size(); ++k) e(static_cast<Eigen::Index>(k)) = coeffs[k](i, j);
      m[i][j] = Poly(std::move(e));
    }
  return m;
}

Poly poly_det(const PolyMatrix& m) {
  const std::size_t p = m.size();
  if (p == 0) throw DomainError("poly_det needs a nonempty matrix");
  if (p > 4) throw DomainError("poly_det supports order <= 4");
  for (const auto& row : m)
    if (row.size() != p) throw DomainError("poly_det needs a square matrix");
  if (p == 1) return m[0][0];
  Poly det;
  for (std::size_t j = 0; j < p; ++j) {
    PolyMatrix minor;
    for (std::size_t i = 1; i < p; ++i) {
      std::vector<Poly> row;
      for (std::size_t k = 0; k < p; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(std::move(row));
    }
    const Poly term = m[0][j] * poly_det(minor);
    det = j % 2 == 0 ? det + term : det - term;
  }
  return det;
}

}  // namespace rz
