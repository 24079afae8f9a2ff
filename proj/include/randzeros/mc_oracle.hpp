#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "randzeros/complex_zeros.hpp"
#include "randzeros/kernel_engine.hpp"

namespace rz {

struct MCConfig {
  long samples = 10'000;
  std::uint64_t master_seed = 0;
  int workers_hint = 0;  // 0: one worker per hardware thread
  int scan_grid = 20'000;  // sign-scan cells for non-polynomial bases
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
  std::uint64_t seed = 0;
  long resampled = 0;        // samples redrawn after a degenerate or failed count
  long boundary_events = 0;  // e.g. fixed points at infinity
};

/// Distinct real roots of p in the open interval, by a Sturm chain of scaled
/// remainders. Endpoints that are roots are nudged by 1e−12·max(1, |x|) inward.
/// Throws DegeneracyError when the chain ends in a nonconstant common factor.
int sturm_count(const Poly& p, const Interval& interval);

/// Sign changes of f on a cell-centred grid (a tan-substituted grid on
/// unbounded intervals), each located by bisection. Misses root pairs closer
/// than the grid step.
std::vector<double> sign_scan_roots(const std::function<double(double)>& f, const Interval& interval, int grid);
int sign_scan_count(const std::function<double(double)>& f, const Interval& interval, int grid);

struct AberthOptions {
  int max_iterations = 200;
  double residual_tol = 1e-10;
  /// Source of the angular jitter of the starting circle; a fixed offset when absent.
  std::optional<GaussianStream> jitter;
  std::uint64_t jitter_offset = 0;
};

/// All complex roots by Aberth–Ehrlich iteration from a circle of radius given by
/// the Cauchy bound. Throws ConvergenceError when a root's normalized residual
/// |p(z)|/(‖p‖·max(1,|z|)^deg) exceeds the tolerance after max_iterations.
std::vector<std::complex<double>> aberth_roots(const ComplexPoly& p, const AberthOptions& opts = {});
std::vector<std::complex<double>> aberth_roots(const Poly& p, const AberthOptions& opts = {});

/// Runs sample(i, stream) for i < samples in parallel and averages the results in
/// index order. A sample that throws DegeneracyError or ConvergenceError is redrawn
/// from a reserved substream, at most three times.
MCEstimate mc_run(const MCConfig& cfg, const std::function<double(std::uint64_t, const GaussianStream&)>& sample);

/// Real zeros in I of coefficient vectors drawn as mean + L·z.
MCEstimate mc_real_zeros(const Ensemble& e, const Interval& interval, const MCConfig& cfg);

/// Real fixed points of p/q with independent Kostlan p, q of degree n.
MCEstimate mc_fixed_points(int n, const MCConfig& cfg);

/// Real eigenvalues of n×n iid standard normal matrices (1 ≤ n ≤ 8).
MCEstimate mc_real_eigenvalues(int n, const MCConfig& cfg);

/// Real roots of det(A₀ + A₁t + ⋯ + Aₙtⁿ) with iid Gaussian p×p matrices (p ≤ 3, n ≤ 4).
MCEstimate mc_matrix_poly(int n, int p, const MCConfig& cfg);

struct RadialEstimate {
  std::vector<double> radii;
  std::vector<double> mean;
  std::vector<double> std_error;
  long n = 0;
  std::uint64_t seed = 0;
  long resampled = 0;
};

/// Empirical counts of roots in |z| < r for polynomial families (degree ≤ 100).
RadialEstimate mc_complex_radial(const VarianceGeneratingFunction& phi, const std::vector<double>& radii,
                                 const MCConfig& cfg);

}  // namespace rz
