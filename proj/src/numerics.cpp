#include "randzeros/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace rz {

Interval Interval::make(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
    throw DomainError("interval requires lo < hi, got [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return {lo, hi};
}

// Special functions ---------------------------------------------------------

double erf(double x) { return std::erf(x); }

double exp_integral_gamma0(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_gamma0 requires x > 0");
  // libstdc++ defines expint as Ei; E₁(x) = −Ei(−x).
  return -std::expint(-x);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
  return std::lgamma(x);
}

namespace {

// d^j/ds^j of c(s)·N^{−(s+p)} given c and its first two s-derivatives.
double power_term_deriv(int order, double c, double dc, double d2c, double log_n, double p,
                        double s) {
  const double e = std::exp(-(s + p) * log_n);
  switch (order) {
    case 0: return c * e;
    case 1: return (dc - log_n * c) * e;
    default: return (d2c - 2.0 * log_n * dc + log_n * log_n * c) * e;
  }
}

long zeta_truncation(double s) {
  const double n = std::ceil(10.0 / (s - 1.0));
  return static_cast<long>(std::clamp(n, 50.0, 1.0e6));
}

}  // namespace

double zeta_tail(double s, long n_start, int order) {
  if (!(s > 1.0)) throw DomainError("zeta_tail requires s > 1");
  if (order < 0 || order > 2) throw DomainError("zeta_tail order must be 0, 1 or 2");
  if (n_start < 2) throw DomainError("zeta_tail requires N >= 2");

  // Euler–Maclaurin through the B₄ term for f(x) = x^{−s}; the order-j sums
  // are the s-derivatives of the same expansion.
  const double log_n = std::log(static_cast<double>(n_start));
  const double u = s - 1.0;
  const double eu = std::exp(-u * log_n);
  double integral = 0.0;
  switch (order) {
    case 0: integral = eu / u; break;
    case 1: integral = -eu * (log_n / u + 1.0 / (u * u)); break;
    default: integral = eu * (log_n * log_n / u + 2.0 * log_n / (u * u) + 2.0 / (u * u * u)); break;
  }
  const double half = power_term_deriv(order, 0.5, 0.0, 0.0, log_n, 0.0, s);
  const double b2 = power_term_deriv(order, s / 12.0, 1.0 / 12.0, 0.0, log_n, 1.0, s);
  const double b4 = power_term_deriv(order, -(s * s * s + 3.0 * s * s + 2.0 * s) / 720.0,
                                     -(3.0 * s * s + 6.0 * s + 2.0) / 720.0,
                                     -(6.0 * s + 6.0) / 720.0, log_n, 3.0, s);
  return integral + half + b2 + b4;
}

double zeta_derivs(double s, int order) {
  if (!(s > 1.0)) throw DomainError("zeta_derivs requires s > 1");
  if (order < 0 || order > 2) throw DomainError("zeta_derivs order must be 0, 1 or 2");
  const long n = zeta_truncation(s);
  CompensatedSum sum;
  for (long k = n - 1; k >= 1; --k) {
    const double lk = std::log(static_cast<double>(k));
    const double base = std::exp(-s * lk);
    switch (order) {
      case 0: sum.add(base); break;
      case 1: sum.add(-lk * base); break;
      default: sum.add(lk * lk * base); break;
    }
  }
  sum.add(zeta_tail(s, n, order));
  return sum.value();
}

double log_double_factorial(int n) {
  if (n < -1) throw DomainError("double factorial requires n >= -1");
  double acc = 0.0;
  for (int k = n; k > 1; k -= 2) acc += std::log(static_cast<double>(k));
  return acc;
}

double double_factorial_ratio(int a, int b) {
  if (a < -1 || b < -1) throw DomainError("double factorial requires arguments >= -1");
  if (std::max(a, b) > 300) return std::exp(log_double_factorial(a) - log_double_factorial(b));
  // Interleave numerator and denominator factors so partial products stay O(1).
  double ratio = 1.0;
  int i = a;
  int j = b;
  while (i > 1 || j > 1) {
    if (i > 1) {
      ratio *= i;
      i -= 2;
    }
    if (j > 1) {
      ratio /= j;
      j -= 2;
    }
  }
  return ratio;
}

// Quadrature ----------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

template <typename G>
Segment kronrod15(const G& g, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 7> fv1{};
  std::array<double, 7> fv2{};

  const double fc = g(centre);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = half * kXgk[jtw];
    const double f1 = g(centre - absc);
    const double f2 = g(centre + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = half * kXgk[jtwm1];
    const double f1 = g(centre - absc);
    const double f2 = g(centre + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  const double ah = std::abs(half);
  resabs *= ah;
  resasc *= ah;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk * half, err};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, const Interval& domain,
                              double tol, const QuadOptions& opts) {
  if (!(tol > 0.0)) throw DomainError("integrate_adaptive requires tol > 0");
  if (!(domain.lo < domain.hi)) throw DomainError("integrate_adaptive requires lo < hi");

  long evaluations = 0;
  const bool mapped = !domain.bounded();
  auto g = [&](double x) {
    ++evaluations;
    double y;
    if (mapped) {
      const double t = std::tan(x);
      y = f(t) * (1.0 + t * t);
    } else {
      y = f(x);
    }
    if (!std::isfinite(y))
      throw EvaluationError("integrand is not finite at " + std::to_string(mapped ? std::tan(x) : x));
    return y;
  };
  const double a = mapped ? (domain.lower_unbounded() ? -0.5 * kPi : std::atan(domain.lo)) : domain.lo;
  const double b = mapped ? (domain.upper_unbounded() ? 0.5 * kPi : std::atan(domain.hi)) : domain.hi;

  std::priority_queue<Segment> active;
  std::vector<Segment> frozen;
  constexpr int kInitial = 4;
  for (int i = 0; i < kInitial; ++i) {
    const double lo = a + (b - a) * i / kInitial;
    const double hi = i + 1 == kInitial ? b : a + (b - a) * (i + 1) / kInitial;
    active.push(kronrod15(g, lo, hi));
  }

  auto totals = [&]() {
    CompensatedSum value;
    double err = 0.0;
    auto copy = active;
    while (!copy.empty()) {
      value.add(copy.top().value);
      err += copy.top().err;
      copy.pop();
    }
    for (const auto& s : frozen) {
      value.add(s.value);
      err += s.err;
    }
    return std::pair<double, double>{value.value(), err};
  };

  double total_err = 0.0;
  {
    auto copy = active;
    while (!copy.empty()) {
      total_err += copy.top().err;
      copy.pop();
    }
  }
  long iteration = 0;
  while (total_err > tol && !active.empty()) {
    if (evaluations + 30 > opts.max_evaluations) {
      const auto [v, e] = totals();
      throw ConvergenceError("integrate_adaptive: evaluation budget of " +
                             std::to_string(opts.max_evaluations) + " exhausted (estimate " +
                             std::to_string(v) + ", error " + std::to_string(e) + ")");
    }
    Segment worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const double width = worst.b - worst.a;
    if (width <= 64.0 * std::numeric_limits<double>::epsilon() *
                     std::max({1.0, std::abs(worst.a), std::abs(worst.b)})) {
      frozen.push_back(worst);
      continue;
    }
    const Segment left = kronrod15(g, worst.a, mid);
    const Segment right = kronrod15(g, mid, worst.b);
    total_err += left.err + right.err - worst.err;
    active.push(left);
    active.push(right);
    if (++iteration % 64 == 0) total_err = totals().second;
  }
  const auto [value, err] = totals();
  return {value, err, evaluations};
}

// Gaussian streams ----------------------------------------------------------

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

GaussianStream::GaussianStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : key_(splitmix64(splitmix64(master_seed) + splitmix64(stream_index ^ 0x632be59bd9b4e019ULL))) {}

double GaussianStream::uniform(std::uint64_t i) const {
  const std::uint64_t bits = splitmix64(key_ ^ splitmix64(i));
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::operator[](std::uint64_t i) const {
  const std::uint64_t pair = i & ~std::uint64_t{1};
  const double u1 = uniform(pair);
  const double u2 = uniform(pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  return (i & 1U) ? r * std::sin(angle) : r * std::cos(angle);
}

void GaussianStream::fill(std::span<double> out, std::uint64_t offset) const {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (*this)[offset + k];
}

Eigen::VectorXd GaussianStream::draw(Eigen::Index n, std::uint64_t offset) const {
  Eigen::VectorXd v(n);
  fill(std::span<double>(v.data(), static_cast<std::size_t>(n)), offset);
  return v;
}

}  // namespace rz
