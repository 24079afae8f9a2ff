#include "randzeros/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "randzeros/matrices.hpp"

namespace rz {

namespace {

using Eigen::VectorXd;

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

Poly normalized(const Poly& p) {
  const double s = p.norm_inf();
  return s > 0.0 ? (1.0 / s) * p : p;
}

// −rem(a, b) with coefficients at the rounding level of the division treated as zero.
Poly negated_remainder(const Poly& a, const Poly& b) {
  auto [q, r] = divmod(a, b);
  const double tol = 1e-11 * (a.norm_inf() + q.norm_inf() * b.norm_inf());
  Eigen::VectorXd c = -r.coeffs();
  Eigen::Index n = c.size();
  while (n > 0 && std::abs(c(n - 1)) <= tol) --n;
  if (n == 0) return Poly();
  return Poly(Eigen::VectorXd(c.head(n)));
}

int sign_changes_at(const std::vector<Poly>& chain, double x) {
  int changes = 0, last = 0;
  for (const auto& p : chain) {
    int s;
    if (std::isinf(x)) {
      s = sign_of(p.leading());
      if (x < 0.0 && p.degree() % 2 == 1) s = -s;
    } else {
      s = sign_of(eval(p, x));
    }
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// Nudge a finite endpoint that is a root of p toward the interior.
double clear_endpoint(const Poly& p, double x, double direction) {
  if (std::isinf(x)) return x;
  for (int i = 0; i < 8 && eval(p, x) == 0.0; ++i) x += direction * 1e-12 * std::max(1.0, std::abs(x)) * (1 << i);
  return x;
}

constexpr std::uint64_t kRetryStride = std::uint64_t{1} << 40;
constexpr int kMaxRetries = 3;

template <typename T, typename F>
std::vector<T> run_samples(const MCConfig& cfg, F&& sample, long& resampled) {
  if (cfg.samples < 1) throw DomainError("MC needs at least one sample");
  if (static_cast<std::uint64_t>(cfg.samples) >= kRetryStride) throw DomainError("too many MC samples");
  const std::size_t n = static_cast<std::size_t>(cfg.samples);
  std::vector<T> results(n);
  std::vector<unsigned char> retries(n, 0);
  unsigned hw = std::thread::hardware_concurrency();
  const unsigned workers = std::max(1u, cfg.workers_hint > 0 ? static_cast<unsigned>(cfg.workers_hint) : (hw ? hw : 1u));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  constexpr std::size_t kChunk = 256;

  auto work = [&] {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= n) return;
        const std::size_t end = std::min(n, begin + kChunk);
        for (std::size_t i = begin; i < end; ++i) {
          for (int attempt = 0;; ++attempt) {
            const std::uint64_t index = i + static_cast<std::uint64_t>(attempt) * kRetryStride;
            try {
              results[i] = sample(static_cast<std::uint64_t>(i), GaussianStream(cfg.master_seed, index));
              retries[i] = static_cast<unsigned char>(attempt);
              break;
            } catch (const DegeneracyError&) {
              if (attempt == kMaxRetries) throw;
            } catch (const ConvergenceError&) {
              if (attempt == kMaxRetries) throw;
            }
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  resampled = 0;
  for (unsigned char r : retries) resampled += r;
  return results;
}

MCEstimate summarize(const MCConfig& cfg, const std::vector<double>& values, long resampled) {
  MCEstimate est;
  est.n = static_cast<long>(values.size());
  est.seed = cfg.master_seed;
  est.resampled = resampled;
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  est.mean = sum.value() / static_cast<double>(est.n);
  if (est.n > 1) {
    CompensatedSum sq;
    for (double v : values) sq.add((v - est.mean) * (v - est.mean));
    est.std_error = std::sqrt(sq.value() / static_cast<double>(est.n - 1) / static_cast<double>(est.n));
  }
  return est;
}

double bisect_root(const std::function<double(double)>& f, double a, double b, double fa) {
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (sign_of(fm) == sign_of(fa)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

int sturm_count(const Poly& p, const Interval& interval) {
  if (p.is_zero()) throw DomainError("sturm_count needs a nonzero polynomial");
  if (!(interval.lo < interval.hi)) throw DomainError("interval must satisfy lo < hi");
  if (p.degree() == 0) return 0;
  std::vector<Poly> chain{normalized(p), normalized(diff(p))};
  for (;;) {
    Poly r = negated_remainder(chain[chain.size() - 2], chain.back());
    if (r.is_zero()) break;
    chain.push_back(normalized(r));
  }
  if (chain.back().degree() > 0)
    throw DegeneracyError("Sturm chain ended in a common factor of degree " + std::to_string(chain.back().degree()));
  const double lo = clear_endpoint(p, interval.lo, 1.0);
  const double hi = clear_endpoint(p, interval.hi, -1.0);
  const int count = sign_changes_at(chain, lo) - sign_changes_at(chain, hi);
  if (count < 0) throw DegeneracyError("Sturm count came out negative");
  return count;
}

std::vector<double> sign_scan_roots(const std::function<double(double)>& f, const Interval& interval, int grid) {
  if (grid < 2) throw DomainError("sign scan needs at least 2 grid cells");
  if (!(interval.lo < interval.hi)) throw DomainError("interval must satisfy lo < hi");
  const bool mapped = !interval.bounded();
  const double a = mapped ? std::atan(interval.lo) : interval.lo;
  const double b = mapped ? std::atan(interval.hi) : interval.hi;
  const double h = (b - a) / grid;
  auto at = [&](int i) {
    const double x = a + (i + 0.5) * h;
    return mapped ? std::tan(x) : x;
  };
  std::vector<double> roots;
  double prev_t = 0.0, prev_f = 0.0;
  bool have_prev = false;
  for (int i = 0; i < grid; ++i) {
    const double t = at(i);
    const double ft = f(t);
    if (ft == 0.0) continue;
    if (have_prev && sign_of(ft) != sign_of(prev_f)) roots.push_back(bisect_root(f, prev_t, t, prev_f));
    prev_t = t;
    prev_f = ft;
    have_prev = true;
  }
  return roots;
}

int sign_scan_count(const std::function<double(double)>& f, const Interval& interval, int grid) {
  return static_cast<int>(sign_scan_roots(f, interval, grid).size());
}

std::vector<std::complex<double>> aberth_roots(const ComplexPoly& p, const AberthOptions& opts) {
  using C = std::complex<double>;
  const int n = p.degree();
  if (n < 1 || p.is_zero()) throw DomainError("aberth_roots needs degree >= 1");
  const C lead = p.leading();
  double bound = 0.0;
  for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(p[k] / lead));
  const double radius = 1.0 + bound;
  const ComplexPoly dp = diff(p);

  const double offset = opts.jitter ? 2.0 * kPi * opts.jitter->uniform(opts.jitter_offset) : 0.7;
  std::vector<C> z(n);
  for (int k = 0; k < n; ++k) {
    double jitter = 0.0;
    if (opts.jitter) jitter = 0.25 * (opts.jitter->uniform(opts.jitter_offset + 1 + k) - 0.5);
    z[k] = std::polar(radius, (2.0 * kPi * (k + jitter) + offset) / n);
  }
  std::vector<bool> done(n, false);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < opts.max_iterations; ++it) {
    bool all_done = true;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      const C pv = eval(p, z[i]);
      if (pv == C(0.0)) {
        done[i] = true;
        continue;
      }
      const C dv = eval(dp, z[i]);
      const C ratio = pv / dv;
      C s = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      const C w = ratio / (1.0 - ratio * s);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        all_done = false;
        continue;
      }
      z[i] -= w;
      if (std::abs(w) <= 4.0 * eps * std::abs(z[i]) || std::abs(w) < 1e-300) done[i] = true;
      else all_done = false;
    }
    if (all_done) break;
  }
  double l1 = 0.0;
  for (int k = 0; k <= n; ++k) l1 += std::abs(p[k]);
  double worst = 0.0;
  for (const C& r : z) {
    const double scale = l1 * std::pow(std::max(1.0, std::abs(r)), n);
    worst = std::max(worst, std::abs(eval(p, r)) / scale);
  }
  if (!(worst <= opts.residual_tol))
    throw ConvergenceError("Aberth iteration did not converge (worst normalized residual " + std::to_string(worst) + ")");
  return z;
}

std::vector<std::complex<double>> aberth_roots(const Poly& p, const AberthOptions& opts) {
  ComplexPoly::Coeffs c = p.coeffs().cast<std::complex<double>>();
  return aberth_roots(ComplexPoly(std::move(c)), opts);
}

MCEstimate mc_run(const MCConfig& cfg, const std::function<double(std::uint64_t, const GaussianStream&)>& sample) {
  long resampled = 0;
  const auto values = run_samples<double>(cfg, sample, resampled);
  return summarize(cfg, values, resampled);
}

MCEstimate mc_real_zeros(const Ensemble& e, const Interval& interval, const MCConfig& cfg) {
  if (!e.domain().contains(interval)) throw DomainError("interval is not inside the ensemble domain");
  const MeanSpec& mean = e.mean();
  if (!mean.is_zero() && !mean.coefficients)
    throw UnsupportedError("the ensemble mean has no coefficient representation to sample from");
  const int n = e.dimension();
  const VectorXd mu = mean.is_zero() ? VectorXd::Zero(n) : *mean.coefficients;
  // Sturm chains are quadratic in the degree; long series are scanned instead.
  const bool polynomial = e.basis().to_polynomial(VectorXd::Zero(n)).has_value() && n <= 65;
  return mc_run(cfg, [&](std::uint64_t, const GaussianStream& stream) {
    const VectorXd a = mu + e.covariance().colour(stream.draw(n));
    if (polynomial) {
      const Poly p = *e.basis().to_polynomial(a);
      if (p.is_zero()) throw DegeneracyError("sampled polynomial is identically zero");
      return static_cast<double>(sturm_count(p, interval));
    }
    VectorXd v(n), dv(n);
    auto f = [&](double t) {
      e.basis().evaluate(t, v, dv);
      return a.dot(v);
    };
    return static_cast<double>(sign_scan_count(f, interval, cfg.scan_grid));
  });
}

MCEstimate mc_fixed_points(int n, const MCConfig& cfg) {
  if (n < 1) throw DomainError("mc_fixed_points needs n >= 1");
  VectorXd scale(n + 1);
  for (int k = 0; k <= n; ++k)
    scale(k) = std::sqrt(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
  std::atomic<long> at_infinity{0};
  MCEstimate est = mc_run(cfg, [&](std::uint64_t, const GaussianStream& stream) {
    const VectorXd z = stream.draw(2 * (n + 1));
    const VectorXd p = scale.cwiseProduct(z.head(n + 1));
    const VectorXd q = scale.cwiseProduct(z.tail(n + 1));
    // p(t) − t·q(t); degree n+1 unless q's leading coefficient vanishes, in which
    // case ∞ is a fixed point.
    VectorXd h(n + 2);
    h(0) = p(0);
    for (int k = 1; k <= n; ++k) h(k) = p(k) - q(k - 1);
    h(n + 1) = -q(n);
    double count = 0.0;
    if (q(n) == 0.0) {
      ++at_infinity;
      count += 1.0;
    }
    const Poly poly(h);
    if (poly.is_zero()) throw DegeneracyError("fixed-point polynomial is identically zero");
    return count + sturm_count(poly, Interval::real_line());
  });
  est.boundary_events = at_infinity.load();
  return est;
}

MCEstimate mc_real_eigenvalues(int n, const MCConfig& cfg) {
  if (n < 1 || n > 8) throw DomainError("mc_real_eigenvalues supports 1 <= n <= 8");
  return mc_run(cfg, [&](std::uint64_t, const GaussianStream& stream) {
    if (n == 1) return 1.0;
    const VectorXd z = stream.draw(n * n);
    const Eigen::MatrixXd a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        z.data(), n, n);
    const double r = 1.0 + a.norm();
    return static_cast<double>(sturm_count(char_poly(a), {-r, r}));
  });
}

MCEstimate mc_matrix_poly(int n, int p, const MCConfig& cfg) {
  if (p < 1 || p > 3) throw DomainError("mc_matrix_poly supports 1 <= p <= 3");
  if (n < 1 || n > 4) throw DomainError("mc_matrix_poly supports 1 <= n <= 4");
  return mc_run(cfg, [&](std::uint64_t, const GaussianStream& stream) {
    const VectorXd z = stream.draw((n + 1) * p * p);
    std::vector<Eigen::MatrixXd> coeffs;
    for (int k = 0; k <= n; ++k)
      coeffs.emplace_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          z.data() + k * p * p, p, p));
    const Poly det = poly_det(matrix_polynomial(coeffs));
    if (det.is_zero()) throw DegeneracyError("determinant polynomial is identically zero");
    return static_cast<double>(sturm_count(det, Interval::real_line()));
  });
}

RadialEstimate mc_complex_radial(const VarianceGeneratingFunction& phi, const std::vector<double>& radii,
                                 const MCConfig& cfg) {
  const int deg = phi.degree();
  if (deg < 1 || deg > 100) throw UnsupportedError("mc_complex_radial needs a polynomial family of degree 1..100");
  if (radii.empty()) throw DomainError("mc_complex_radial needs at least one radius");
  VectorXd sigma(deg + 1);
  for (int k = 0; k <= deg; ++k) sigma(k) = std::sqrt(phi.variance(k));
  long resampled = 0;
  const auto counts = run_samples<std::vector<double>>(
      cfg,
      [&](std::uint64_t, const GaussianStream& stream) {
        const VectorXd z = stream.draw(2 * (deg + 1));
        ComplexPoly::Coeffs c(deg + 1);
        for (int k = 0; k <= deg; ++k) c(k) = sigma(k) * std::complex<double>(z(2 * k), z(2 * k + 1));
        const ComplexPoly p(std::move(c));
        if (p.degree() != deg) throw DegeneracyError("leading coefficient vanished");
        AberthOptions opts;
        opts.jitter = stream;
        opts.jitter_offset = 2 * static_cast<std::uint64_t>(deg + 1);
        const auto roots = aberth_roots(p, opts);
        std::vector<double> out(radii.size(), 0.0);
        for (const auto& root : roots) {
          const double m = std::abs(root);
          for (std::size_t j = 0; j < radii.size(); ++j)
            if (m < radii[j]) out[j] += 1.0;
        }
        return out;
      },
      resampled);
  RadialEstimate est;
  est.radii = radii;
  est.n = cfg.samples;
  est.seed = cfg.master_seed;
  est.resampled = resampled;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    std::vector<double> col(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) col[i] = counts[i][j];
    const MCEstimate s = summarize(cfg, col, resampled);
    est.mean.push_back(s.mean);
    est.std_error.push_back(s.std_error);
  }
  return est;
}

}  // namespace rz
