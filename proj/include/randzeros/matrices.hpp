#pragma once

#include <Eigen/Dense>

#include <vector>

#include "randzeros/numerics.hpp"

namespace rz {

/// Expected number of real eigenvalues of an n×n matrix with iid standard normal entries.
double real_eigen_expected(int n);

/// √(2n/π).
double real_eigen_asymptotic(int n);

/// √π Γ((p+1)/2)/Γ(p/2): expected real solutions of det(A₀f₀ + ⋯ + Aₙfₙ) = 0 with
/// p×p Gaussian matrices, relative to the scalar (p = 1) case.
double matrix_poly_factor(int p);

/// (n+1)×(n+1) tridiagonal matrix with superdiagonal n, n−1, …, 1 and subdiagonal
/// 1, 2, …, n. Its eigenvalues are 2k − n for k = 0 … n.
Eigen::MatrixXd kac_matrix(int n);

/// det(λI − A) by the Faddeev–LeVerrier recurrence; monic, ascending coefficients.
/// Orders above 12 are refused (the recurrence loses accuracy quickly).
Poly char_poly(const Eigen::MatrixXd& a);

/// Square matrix with polynomial entries.
using PolyMatrix = std::vector<std::vector<Poly>>;

/// Σₖ Aₖ tᵏ as a matrix of polynomials; all Aₖ square of equal order.
PolyMatrix matrix_polynomial(const std::vector<Eigen::MatrixXd>& coeffs);

/// Determinant by cofactor expansion over polynomial arithmetic (order ≤ 4).
Poly poly_det(const PolyMatrix& m);

}  // namespace rz
