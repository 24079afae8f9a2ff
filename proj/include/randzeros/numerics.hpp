#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <span>

#include "randzeros/errors.hpp"
#include "randzeros/poly.hpp"

namespace rz {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Integration domain; either endpoint may be infinite.
struct Interval {
  double lo;
  double hi;

  /// Throws DomainError unless lo < hi.
  static Interval make(double lo, double hi);
  static Interval real_line() { return {-kInf, kInf}; }

  bool lower_unbounded() const { return lo == -kInf; }
  bool upper_unbounded() const { return hi == kInf; }
  bool bounded() const { return !lower_unbounded() && !upper_unbounded(); }
  bool contains(double t) const { return lo <= t && t <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;
  long evaluations = 0;
};

struct QuadOptions {
  long max_evaluations = 1'000'000;
};

// Special functions ---------------------------------------------------------

double erf(double x);

/// Γ(0, x) = E₁(x) for x > 0.
double exp_integral_gamma0(double x);

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// ζ(s), ζ′(s) or ζ″(s) for s > 1 (order 0, 1, 2).
double zeta_derivs(double s, int order);

/// Σ_{k≥N} (−ln k)^order k^(−s), the Euler–Maclaurin remainder of the ζ sums.
/// Requires s > 1 and N ≥ 2.
double zeta_tail(double s, long n_start, int order);

/// a!!/b!! with (−1)!! = 0!! = 1.
double double_factorial_ratio(int a, int b);

/// ln(n!!) for n ≥ −1.
double log_double_factorial(int n);

// Quadrature ----------------------------------------------------------------

/// Globally adaptive 7/15-point Gauss–Kronrod quadrature with bisection.
///
/// Infinite endpoints are mapped through t = tan θ. The integrand may be
/// singular at the endpoints (they are never sampled). Refinement stops when
/// the summed error estimate falls below `tol`; segments too narrow to bisect
/// further are frozen, so the returned err_estimate can exceed `tol` when the
/// integrand is noisy at the rounding level. Throws ConvergenceError when the
/// evaluation budget is exhausted.
QuadResult integrate_adaptive(const std::function<double(double)>& f, const Interval& domain,
                              double tol, const QuadOptions& opts = {});

// Gaussian streams ----------------------------------------------------------

/// Counter-based stream of standard normal deviates.
///
/// Deviate i is a pure function of (master_seed, stream_index, i): uniforms
/// come from a SplitMix64 finaliser applied to a keyed counter, and pairs of
/// uniforms are mapped to normals by the Box–Muller transform (even i takes
/// the cosine branch, odd i the sine branch). The value is immutable and
/// safe to share between threads.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t master_seed, std::uint64_t stream_index);

  double operator[](std::uint64_t i) const;
  void fill(std::span<double> out, std::uint64_t offset = 0) const;
  Eigen::VectorXd draw(Eigen::Index n, std::uint64_t offset = 0) const;

  /// Uniform deviate in (0, 1) for counter i; shares the key with the normals.
  double uniform(std::uint64_t i) const;

 private:
  std::uint64_t key_;
};

/// Cursor over a GaussianStream for sequential consumption by one owner.
class GaussianCursor {
 public:
  explicit GaussianCursor(GaussianStream stream) : stream_(stream) {}
  double next() { return stream_[pos_++]; }
  Eigen::VectorXd next(Eigen::Index n) {
    Eigen::VectorXd v = stream_.draw(n, pos_);
    pos_ += static_cast<std::uint64_t>(n);
    return v;
  }
  std::uint64_t position() const { return pos_; }

 private:
  GaussianStream stream_;
  std::uint64_t pos_ = 0;
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace rz
