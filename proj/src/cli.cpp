#include "randzeros/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "randzeros/acceptance.hpp"
#include "randzeros/complex_zeros.hpp"
#include "randzeros/ensembles.hpp"
#include "randzeros/matrices.hpp"
#include "randzeros/mc_oracle.hpp"
#include "randzeros/systems.hpp"

namespace rz::cli {

namespace {

using json = nlohmann::ordered_json;
using Job = std::function<void(std::ostream&, std::ostream&)>;

// Raised while validating arguments; maps to exit code 2.
struct ArgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kFamilies = {"kac",     "kostlan",   "power_series", "correlated_power_series",
                                            "entire",  "trig",      "dirichlet",    "sine_exp"};

struct FamilyArgs {
  std::string family = "kac";
  int n = 0;
  double r = 0.0;
  std::vector<double> sigma, nu;
  SeriesOptions series;
  double mean = 0.0;
  std::string mean_case = "coefficients";
  double anchor = 0.0;
  CLI::Option* mean_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  std::optional<double> lo, hi;
};

void add_family_options(CLI::App* app, FamilyArgs& a, bool with_mean) {
  app->add_option("--family", a.family, "Random function family")
      ->check(CLI::IsMember(kFamilies))
      ->capture_default_str();
  a.n_opt = app->add_option("--n", a.n, "Degree (kac, kostlan)");
  app->add_option("--r", a.r, "Correlation of neighbouring coefficients (correlated_power_series)");
  app->add_option("--sigma", a.sigma, "Trig scales, comma separated")->delimiter(',');
  app->add_option("--nu", a.nu, "Trig frequencies, comma separated")->delimiter(',');
  app->add_option("--delta", a.series.delta, "Distance kept from the edge of the convergence domain")
      ->capture_default_str();
  app->add_option("--radius", a.series.entire_radius, "Radius on which the entire series is accurate")
      ->capture_default_str();
  app->add_option("--truncation", a.series.dirichlet_truncation, "Explicit Dirichlet terms")->capture_default_str();
  if (with_mean) {
    a.mean_opt = app->add_option("--mean", a.mean, "Mean scale m");
    app->add_option("--mean-case", a.mean_case,
                    "coefficients: every coefficient has mean m; constant: m0(t) = m; growth: m1 = m0")
        ->check(CLI::IsMember({"coefficients", "constant", "growth"}))
        ->capture_default_str();
    app->add_option("--anchor", a.anchor, "Point where a growth mean has m0 = m")->capture_default_str();
  }
}

void add_interval_options(CLI::App* app, FamilyArgs& a) {
  app->add_option("--lo", a.lo, "Lower end of the interval (default: family domain)");
  app->add_option("--hi", a.hi, "Upper end of the interval (default: family domain)");
}

ClosedFormFamily closed_family(const FamilyArgs& a) {
  const std::string& f = a.family;
  if (f == "kac" || f == "kostlan") {
    if (a.n_opt == nullptr || a.n_opt->count() == 0) throw ArgError("--n is required for family " + f);
    return f == "kac" ? ClosedFormFamily::kac(a.n) : ClosedFormFamily::kostlan(a.n);
  }
  if (f == "power_series") return ClosedFormFamily::power_series();
  if (f == "correlated_power_series") return ClosedFormFamily::correlated_power_series(a.r);
  if (f == "entire") return ClosedFormFamily::entire();
  if (f == "trig") {
    if (a.sigma.empty() || a.sigma.size() != a.nu.size())
      throw ArgError("trig needs --sigma and --nu lists of equal length");
    return ClosedFormFamily::trig_sum(a.sigma, a.nu);
  }
  if (f == "dirichlet") return ClosedFormFamily::dirichlet();
  throw ArgError("family " + f + " has no closed form");
}

bool has_mean(const FamilyArgs& a) { return a.mean_opt != nullptr && a.mean_opt->count() > 0; }

Ensemble build_ensemble(const FamilyArgs& a) {
  if (a.family == "sine_exp") {
    if (has_mean(a)) throw ArgError("sine_exp takes no mean");
    return sine_exp_ensemble();
  }
  const ClosedFormFamily f = closed_family(a);
  Ensemble e = make_ensemble(f, a.series);
  if (!has_mean(a)) return e;
  if (a.mean == 0.0) return e;
  if (a.mean_case == "constant") return e.with_mean(case1_mean(f, a.mean, a.series));
  if (a.mean_case == "growth") return e.with_mean(case2_mean(f, a.mean, a.anchor, a.series));
  return e.with_mean(MeanSpec::coefficient_vector(Eigen::VectorXd::Constant(e.dimension(), a.mean)));
}

Interval chosen_interval(const FamilyArgs& a, const Ensemble& e) {
  const Interval d = e.domain();
  const double lo = a.lo.value_or(d.lo), hi = a.hi.value_or(d.hi);
  if (!(lo < hi)) throw ArgError("interval needs lo < hi");
  if (lo < d.lo || hi > d.hi)
    throw ArgError("interval leaves the domain [" + format_double(d.lo) + ", " + format_double(d.hi) + "]");
  return Interval::make(lo, hi);
}

// JSON has no infinities; unbounded ends are written as "-inf" / "inf".
json endpoint(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  return x;
}

json interval_json(const Interval& in) { return json::array({endpoint(in.lo), endpoint(in.hi)}); }

json family_meta(const FamilyArgs& a, const Ensemble& e) {
  json m;
  m["family"] = a.family;
  if (a.family == "kac" || a.family == "kostlan") m["n"] = a.n;
  if (a.family == "correlated_power_series") m["r"] = a.r;
  if (a.family == "trig") {
    m["sigma"] = a.sigma;
    m["nu"] = a.nu;
  }
  m["basis"] = e.basis().name();
  m["dimension"] = e.dimension();
  m["domain"] = interval_json(e.domain());
  if (a.family == "power_series" || a.family == "correlated_power_series" || a.family == "dirichlet")
    m["delta"] = a.series.delta;
  if (a.family == "entire") m["entire_radius"] = a.series.entire_radius;
  if (a.family == "dirichlet") m["dirichlet_truncation"] = a.series.dirichlet_truncation;
  if (has_mean(a)) {
    m["mean"] = a.mean;
    m["mean_case"] = a.mean_case;
    if (a.mean_case == "growth") m["anchor"] = a.anchor;
  }
  return m;
}

std::uint64_t resolve_seed(CLI::Option* opt, std::uint64_t value) {
  if (opt->count() > 0) return value;
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  errno = 0;
  const unsigned long long s = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') throw ArgError(std::string(kSeedEnv) + " is not an unsigned integer");
  return s;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const std::vector<std::vector<double>>& cols) {
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << format_double(cols[j][i]);
    out << '\n';
  }
}

// Curves go to stdout as CSV (metadata on stderr) or as one JSON object.
void emit_curve(std::ostream& out, std::ostream& err, const std::string& format, const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& cols, const json& meta) {
  if (format == "csv") {
    write_csv(out, header, cols);
    err << "# meta " << meta.dump() << '\n';
    return;
  }
  json j;
  for (std::size_t k = 0; k < header.size(); ++k) j[header[k]] = cols[k];
  j["meta"] = meta;
  out << j.dump(2) << '\n';
}

json mc_json(const MCEstimate& e, json meta) {
  json j;
  j["mean"] = e.mean;
  j["stderr"] = e.std_error;
  j["n"] = e.n;
  j["seed"] = e.seed;
  j["resampled"] = e.resampled;
  j["boundary_events"] = e.boundary_events;
  j["meta"] = std::move(meta);
  return j;
}

json mc_meta(const MCConfig& c) {
  return {{"samples", c.samples}, {"seed", c.master_seed}, {"workers_hint", c.workers_hint}, {"scan_grid", c.scan_grid}};
}

struct McArgs {
  long samples = 10'000;
  std::uint64_t seed = 0;
  int workers = 0;
  int scan_grid = 20'000;
  CLI::Option* seed_opt = nullptr;
};

void add_mc_options(CLI::App* app, McArgs& m) {
  app->add_option("--samples", m.samples, "Number of Monte Carlo samples")->capture_default_str();
  m.seed_opt = app->add_option("--seed", m.seed, std::string("Master seed (default: $") + kSeedEnv + " or 0)");
  app->add_option("--workers", m.workers, "Worker threads (0: one per hardware thread)")->capture_default_str();
  app->add_option("--scan-grid", m.scan_grid, "Sign-scan cells for non-polynomial bases")->capture_default_str();
}

MCConfig mc_config(const McArgs& m) {
  if (m.samples < 1) throw ArgError("--samples must be positive");
  if (m.workers < 0) throw ArgError("--workers must be non-negative");
  if (m.scan_grid < 2) throw ArgError("--scan-grid must be at least 2");
  MCConfig c;
  c.samples = m.samples;
  c.master_seed = resolve_seed(m.seed_opt, m.seed);
  c.workers_hint = m.workers;
  c.scan_grid = m.scan_grid;
  return c;
}

VarianceGeneratingFunction radial_family(const std::string& family, int n, double rho, double tau) {
  if (family == "kac") return VarianceGeneratingFunction::kac_complex(n);
  if (family == "kostlan") return VarianceGeneratingFunction::kostlan_complex(n);
  if (family == "entire_order_type") return VarianceGeneratingFunction::entire_order_type(rho, tau);
  throw ArgError("unknown complex family " + family);
}

SystemFamily system_family(const std::string& family, int d, int m, const std::vector<int>& degrees) {
  if (family == "kostlan") return degrees.empty() ? SystemFamily::kostlan(d, m) : SystemFamily::kostlan(degrees);
  if (family == "hypercube_kac") return SystemFamily::hypercube_kac(d, m);
  if (family == "harmonic") return SystemFamily::harmonic(d, m);
  if (family == "power_series") return SystemFamily::power_series(m);
  if (family == "entire") return SystemFamily::entire(m);
  throw ArgError("unknown system family " + family);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw ArgError("grid must look like lo:hi:count, got '" + text + "'");
  double lo, hi;
  long count;
  try {
    std::size_t p1, p2, p3;
    lo = std::stod(parts[0], &p1);
    hi = std::stod(parts[1], &p2);
    count = std::stol(parts[2], &p3);
    if (p1 != parts[0].size() || p2 != parts[1].size() || p3 != parts[2].size()) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw ArgError("grid must look like lo:hi:count, got '" + text + "'");
  }
  if (count < 1 || count > 10'000'000) throw ArgError("grid count must be between 1 and 1e7");
  if (!std::isfinite(lo) || !std::isfinite(hi) || (count > 1 && !(lo < hi)))
    throw ArgError("grid needs finite lo < hi");
  std::vector<double> g(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] = count == 1 ? lo : std::min(hi, lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  return g;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected real and complex zero counts of random functions", "randzeros"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  RunSpec spec;
  double tol = 1e-10;
  std::string format = "json";
  std::string grid_text;

  // density
  FamilyArgs density_args;
  std::string density_method = "direct";
  double logderiv_h = 1e-4;
  auto* density_cmd = app.add_subcommand("density", "Density of real zeros on a grid");
  add_family_options(density_cmd, density_args, true);
  density_cmd->add_option("--grid", grid_text, "Points lo:hi:count")->required();
  density_cmd->add_option("--method", density_method, "direct, logderiv or closed")
      ->check(CLI::IsMember({"direct", "logderiv", "closed"}))
      ->capture_default_str();
  density_cmd->add_option("--step", logderiv_h, "Step of the logderiv stencil")->capture_default_str();
  density_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  // expect
  FamilyArgs expect_args;
  bool expect_closed = false;
  auto* expect_cmd = app.add_subcommand("expect", "Expected number of real zeros in an interval");
  add_family_options(expect_cmd, expect_args, true);
  add_interval_options(expect_cmd, expect_args);
  expect_cmd->add_option("--tol", tol, "Quadrature tolerance")->capture_default_str();
  expect_cmd->add_flag("--closed", expect_closed, "Also report the closed form where one exists");

  // asymptotic
  int asym_n = 0;
  double asym_mean = 0.0;
  bool asym_compare = false;
  auto* asymptotic_cmd = app.add_subcommand("asymptotic", "Large-degree expansions for iid polynomial coefficients");
  asymptotic_cmd->add_option("--n", asym_n, "Degree")->required();
  auto* asym_mean_opt = asymptotic_cmd->add_option("--mean", asym_mean, "Common nonzero mean of the coefficients");
  asymptotic_cmd->add_flag("--compare", asym_compare, "Also integrate the exact density");

  // noncentral
  FamilyArgs nc_args;
  auto* noncentral_cmd = app.add_subcommand("noncentral", "Density or count for Gaussian coefficients with a mean");
  add_family_options(noncentral_cmd, nc_args, true);
  nc_args.mean_opt->required();
  add_interval_options(noncentral_cmd, nc_args);
  noncentral_cmd->add_option("--grid", grid_text, "Points lo:hi:count; without it the count is reported");
  noncentral_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  noncentral_cmd->add_option("--tol", tol, "Quadrature tolerance")->capture_default_str();

  // systems
  std::string sys_family = "kostlan";
  int sys_d = 1, sys_m = 1;
  std::vector<int> sys_degrees;
  std::vector<double> sys_point;
  bool sys_numeric = false, sys_beta = false;
  auto* systems_cmd = app.add_subcommand("systems", "Systems of m random equations in m unknowns");
  systems_cmd->add_option("--family", sys_family, "kostlan, hypercube_kac, harmonic, power_series or entire")
      ->check(CLI::IsMember({"kostlan", "hypercube_kac", "harmonic", "power_series", "entire"}))
      ->capture_default_str();
  systems_cmd->add_option("--d", sys_d, "Degree")->capture_default_str();
  systems_cmd->add_option("--m", sys_m, "Number of equations and unknowns")->capture_default_str();
  systems_cmd->add_option("--degrees", sys_degrees, "Kostlan degree of each equation")->delimiter(',');
  systems_cmd->add_option("--point", sys_point, "Point for the density, comma separated")->delimiter(',');
  systems_cmd->add_flag("--numeric", sys_numeric, "Integrate the density over R^m (m <= 2)");
  systems_cmd->add_flag("--beta", sys_beta, "Report the harmonic kernel coefficients");

  // matrix
  std::string matrix_kind = "eigen";
  int matrix_n = 2, matrix_p = 1;
  auto* matrix_cmd = app.add_subcommand("matrix", "Random matrices and matrix polynomials");
  matrix_cmd->add_option("--kind", matrix_kind, "eigen, kac-spectrum or poly-factor")
      ->check(CLI::IsMember({"eigen", "kac-spectrum", "poly-factor"}))
      ->capture_default_str();
  matrix_cmd->add_option("--n", matrix_n, "Matrix order (eigen, kac-spectrum)")->capture_default_str();
  matrix_cmd->add_option("--p", matrix_p, "Block size (poly-factor)")->capture_default_str();

  // complex
  std::string cx_family = "kostlan";
  int cx_n = 10;
  double cx_rho = 1.0, cx_tau = 1.0, x1 = 0.6, x2 = 2.0, y1 = 0.0, y2 = 10.0;
  auto* complex_cmd = app.add_subcommand("complex", "Complex zeros: radial counts and Dirichlet strips");
  complex_cmd->add_option("--family", cx_family, "kac, kostlan, entire_order_type or dirichlet_strip")
      ->check(CLI::IsMember({"kac", "kostlan", "entire_order_type", "dirichlet_strip"}))
      ->capture_default_str();
  complex_cmd->add_option("--n", cx_n, "Degree")->capture_default_str();
  complex_cmd->add_option("--rho", cx_rho, "Order")->capture_default_str();
  complex_cmd->add_option("--tau", cx_tau, "Type")->capture_default_str();
  complex_cmd->add_option("--radii", grid_text, "Radii lo:hi:count");
  complex_cmd->add_option("--x1", x1, "Strip: lower real part")->capture_default_str();
  complex_cmd->add_option("--x2", x2, "Strip: upper real part")->capture_default_str();
  complex_cmd->add_option("--y1", y1, "Strip: lower imaginary part")->capture_default_str();
  complex_cmd->add_option("--y2", y2, "Strip: upper imaginary part")->capture_default_str();
  complex_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  // mc
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimates");
  mc_cmd->require_subcommand(1);
  FamilyArgs mce_args;
  McArgs mce, mcf, mcg, mcp, mcr;
  auto* mc_expect = mc_cmd->add_subcommand("expect", "Mean number of real zeros in an interval");
  add_family_options(mc_expect, mce_args, true);
  add_interval_options(mc_expect, mce_args);
  add_mc_options(mc_expect, mce);
  int fp_n = 3;
  auto* mc_fixed = mc_cmd->add_subcommand("fixed-points", "Real fixed points of p/q with Kostlan p, q");
  mc_fixed->add_option("--n", fp_n, "Degree")->capture_default_str();
  add_mc_options(mc_fixed, mcf);
  int eig_n = 2;
  auto* mc_eigen = mc_cmd->add_subcommand("eigen", "Real eigenvalues of Gaussian matrices");
  mc_eigen->add_option("--n", eig_n, "Order (1 to 8)")->capture_default_str();
  add_mc_options(mc_eigen, mcg);
  int mp_n = 2, mp_p = 2;
  auto* mc_mpoly = mc_cmd->add_subcommand("matrix-poly", "Real roots of det(A0 + A1 t + ... + An t^n)");
  mc_mpoly->add_option("--n", mp_n, "Polynomial degree")->capture_default_str();
  mc_mpoly->add_option("--p", mp_p, "Block size")->capture_default_str();
  add_mc_options(mc_mpoly, mcp);
  std::string rad_family = "kostlan";
  int rad_n = 10;
  std::vector<double> rad_radii = {0.5, 1.0, 2.0};
  auto* mc_radial = mc_cmd->add_subcommand("radial", "Complex zeros inside circles");
  mc_radial->add_option("--family", rad_family, "kac or kostlan")
      ->check(CLI::IsMember({"kac", "kostlan"}))
      ->capture_default_str();
  mc_radial->add_option("--n", rad_n, "Degree")->capture_default_str();
  mc_radial->add_option("--radii", rad_radii, "Radii, comma separated")->delimiter(',')->capture_default_str();
  add_mc_options(mc_radial, mcr);

  // selftest
  std::vector<int> only;
  auto* selftest_cmd = app.add_subcommand("selftest", "Run the acceptance checks");
  selftest_cmd->add_option("--only", only, "Criterion numbers, comma separated")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  // Validation: everything up to building the job; no heavy work happens here.
  Job job;
  try {
    if (*density_cmd) {
      const Ensemble e = build_ensemble(density_args);
      const std::vector<double> ts = parse_grid(grid_text);
      const Interval d = e.domain();
      for (double t : ts)
        if (!d.contains(t)) throw ArgError("grid point " + format_double(t) + " lies outside the domain");
      std::optional<ClosedFormFamily> cf;
      double closed_value = 0.0;
      if (density_method == "closed") {
        if (!e.mean().is_zero()) throw ArgError("closed densities are for zero-mean families");
        cf = closed_family(density_args);
      }
      if (density_method == "logderiv" && !e.mean().is_zero())
        throw ArgError("the logderiv path computes central densities only");
      if (!(logderiv_h > 0.0)) throw ArgError("--step must be positive");
      json meta = family_meta(density_args, e);
      meta["method"] = density_method;
      if (density_method == "logderiv") meta["h"] = logderiv_h;
      spec.subcommand = "density";
      job = [=](std::ostream& o, std::ostream& er) {
        std::vector<double> rho(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
          if (density_method == "closed") rho[i] = closed_form_density(*cf, ts[i]);
          else if (density_method == "logderiv") rho[i] = density_central_logderiv(e, ts[i], logderiv_h);
          else rho[i] = density(e, ts[i]);
        }
        emit_curve(o, er, format, {"t", "rho"}, {ts, rho}, meta);
      };
    } else if (*expect_cmd) {
      const Ensemble e = build_ensemble(expect_args);
      const Interval in = chosen_interval(expect_args, e);
      if (!(tol > 0.0)) throw ArgError("--tol must be positive");
      std::optional<ClosedFormFamily> cf;
      double closed_value = 0.0;
      if (expect_closed) {
        if (!e.mean().is_zero()) throw ArgError("closed forms are for zero-mean families");
        cf = closed_family(expect_args);
        closed_value = closed_form_expected(*cf, in);  // cheap; refuses families without one
      }
      json meta = family_meta(expect_args, e);
      meta["interval"] = interval_json(in);
      meta["tol"] = tol;
      job = [=](std::ostream& o, std::ostream&) {
        const QuadResult q = expected_zeros(e, in, tol);
        json j;
        j["expected"] = q.value;
        j["error_estimate"] = q.err_estimate;
        j["evaluations"] = q.evaluations;
        if (cf) j["closed_form"] = closed_value;
        j["meta"] = meta;
        o << j.dump(2) << '\n';
      };
    } else if (*asymptotic_cmd) {
      if (asym_n < 1) throw ArgError("--n must be at least 1");
      const bool with_mean = asym_mean_opt->count() > 0;
      if (with_mean && (asym_mean == 0.0 || asym_n < 2)) throw ArgError("--mean needs a nonzero value and n >= 2");
      job = [=](std::ostream& o, std::ostream&) {
        json j;
        if (with_mean) {
          const NoncentralAsymptotic a = noncentral_asymptotic(asym_n, asym_mean);
          j["expected"] = a.expected;
          j["positive_zeros"] = a.positive_zeros;
          if (asym_compare) {
            const Ensemble e = kac_with_mean(asym_n, asym_mean);
            j["quadrature"] = expected_zeros(e, Interval::real_line()).value;
            j["quadrature_positive"] = expected_zeros(e, Interval::make(0.0, kInf)).value;
          }
        } else {
          const AsymptoticResult a = kac_asymptotic(asym_n);
          j["expected"] = a.value;
          json terms;
          for (const auto& [label, v] : a.terms) terms[label] = v;
          j["terms"] = terms;
          if (asym_compare)
            j["quadrature"] = expected_zeros(make_ensemble(ClosedFormFamily::kac(asym_n)), Interval::real_line(), 1e-12).value;
        }
        j["meta"] = {{"n", asym_n}, {"C1", kac_constant()}, {"euler_gamma", euler_gamma()}};
        if (with_mean) j["meta"]["mean"] = asym_mean;
        o << j.dump(2) << '\n';
      };
    } else if (*noncentral_cmd) {
      const Ensemble e = build_ensemble(nc_args);
      if (e.mean().is_zero()) throw ArgError("noncentral needs a nonzero --mean");
      json meta = family_meta(nc_args, e);
      if (!grid_text.empty()) {
        const std::vector<double> ts = parse_grid(grid_text);
        for (double t : ts)
          if (!e.domain().contains(t)) throw ArgError("grid point " + format_double(t) + " lies outside the domain");
        job = [=](std::ostream& o, std::ostream& er) {
          std::vector<double> rho(ts.size()), m0(ts.size()), m1(ts.size());
          for (std::size_t i = 0; i < ts.size(); ++i) {
            rho[i] = density(e, ts[i]);
            const MeanProjection p = mean_projection(e, ts[i]);
            m0[i] = p.m0;
            m1[i] = p.m1;
          }
          emit_curve(o, er, format, {"t", "rho", "m0", "m1"}, {ts, rho, m0, m1}, meta);
        };
      } else {
        const Interval in = chosen_interval(nc_args, e);
        if (!(tol > 0.0)) throw ArgError("--tol must be positive");
        meta["interval"] = interval_json(in);
        meta["tol"] = tol;
        const bool growth = nc_args.mean_case == "growth" && in.bounded();
        job = [=](std::ostream& o, std::ostream&) {
          json j;
          j["expected"] = expected_zeros(e, in, tol).value;
          if (growth) j["closed_form"] = case2_expected(mean_projection(e, in.lo).m0, mean_projection(e, in.hi).m0);
          j["meta"] = meta;
          o << j.dump(2) << '\n';
        };
      }
    } else if (*systems_cmd) {
      const SystemFamily f = system_family(sys_family, sys_d, sys_m, sys_degrees);
      std::optional<Eigen::VectorXd> point;
      if (!sys_point.empty()) {
        if (static_cast<int>(sys_point.size()) != f.m) throw ArgError("--point needs one coordinate per unknown");
        point = Eigen::Map<const Eigen::VectorXd>(sys_point.data(), static_cast<Eigen::Index>(sys_point.size()));
      }
      if (sys_numeric && f.m > 2) throw ArgError("--numeric supports m <= 2");
      if (sys_numeric && (f.tag == SystemFamily::Tag::PowerSeries || f.tag == SystemFamily::Tag::Entire))
        throw ArgError("--numeric needs a family with a finite count");
      if (point && f.tag == SystemFamily::Tag::PowerSeries && point->cwiseAbs().maxCoeff() >= 1.0)
        throw ArgError("power_series points need |t_k| < 1");
      if (sys_beta && f.tag != SystemFamily::Tag::Harmonic) throw ArgError("--beta is for the harmonic family");
      job = [=](std::ostream& o, std::ostream&) {
        json j;
        j["expected"] = systems_expected(f);
        if (point) {
          j["density"] = systems_density(f, *point);
          const bool shared_kernel =
              std::all_of(f.degrees.begin(), f.degrees.end(), [&](int d) { return d == f.degrees.front(); });
          if (f.m <= 3 && shared_kernel) j["density_general"] = systems_density_general(system_kernel(f), *point);
        }
        if (sys_numeric) j["numeric_expected"] = systems_expected_numeric(f);
        if (sys_beta) {
          const HarmonicCoeffs h = harmonic_coeffs(f.d, f.m);
          j["beta"] = h.beta;
          j["beta_exact_verified"] = h.exact_verified;
        }
        j["meta"] = {{"family", f.name()}, {"m", f.m}, {"constant", systems_constant(f.m)}};
        o << j.dump(2) << '\n';
      };
    } else if (*matrix_cmd) {
      if (matrix_kind == "eigen") {
        if (matrix_n < 1) throw ArgError("--n must be at least 1");
        job = [=](std::ostream& o, std::ostream&) {
          json j;
          j["expected"] = real_eigen_expected(matrix_n);
          j["asymptotic"] = real_eigen_asymptotic(matrix_n);
          j["meta"] = {{"kind", "eigen"}, {"n", matrix_n}};
          o << j.dump(2) << '\n';
        };
      } else if (matrix_kind == "kac-spectrum") {
        if (matrix_n < 1 || matrix_n > 11) throw ArgError("kac-spectrum supports 1 <= n <= 11");
        job = [=](std::ostream& o, std::ostream&) {
          const Poly p = char_poly(kac_matrix(matrix_n));
          json eig = json::array(), counts = json::array();
          for (int k = 0; k <= matrix_n; ++k) {
            const double x = 2.0 * k - matrix_n;
            eig.push_back(x);
            counts.push_back(sturm_count(p, Interval::make(x - 0.5, x + 0.5)));
          }
          json j;
          j["eigenvalues"] = eig;
          j["bracket_counts"] = counts;
          j["real_roots"] = sturm_count(p, Interval::real_line());
          j["meta"] = {{"kind", "kac-spectrum"}, {"n", matrix_n}, {"bracket_halfwidth", 0.5}};
          o << j.dump(2) << '\n';
        };
      } else {
        if (matrix_p < 1) throw ArgError("--p must be at least 1");
        job = [=](std::ostream& o, std::ostream&) {
          json j;
          j["factor"] = matrix_poly_factor(matrix_p);
          j["meta"] = {{"kind", "poly-factor"}, {"p", matrix_p}};
          o << j.dump(2) << '\n';
        };
      }
    } else if (*complex_cmd) {
      if (cx_family == "dirichlet_strip") {
        if (!(x1 > 0.5) || !(x1 <= x2) || !(y1 <= y2)) throw ArgError("strip needs 1/2 < x1 <= x2 and y1 <= y2");
        job = [=](std::ostream& o, std::ostream&) {
          json j;
          j["expected"] = dirichlet_strip_count(x1, x2, y1, y2);
          j["meta"] = {{"family", "dirichlet_strip"}, {"x1", x1}, {"x2", x2}, {"y1", y1}, {"y2", y2}};
          o << j.dump(2) << '\n';
        };
      } else {
        const VarianceGeneratingFunction phi = radial_family(cx_family, cx_n, cx_rho, cx_tau);
        if (grid_text.empty()) throw ArgError("--radii lo:hi:count is required");
        const std::vector<double> radii = parse_grid(grid_text);
        if (radii.front() < 0.0) throw ArgError("radii must be non-negative");
        json meta = {{"family", phi.name()}};
        job = [=](std::ostream& o, std::ostream& er) {
          const RadialProfile prof = radial_profile(phi, radii);
          std::vector<double> dn(radii.size());
          for (std::size_t i = 0; i < radii.size(); ++i) dn[i] = radial_density(phi, radii[i]);
          emit_curve(o, er, format, {"r", "n", "dn_dr"}, {prof.radii, prof.n_of_r, dn}, meta);
        };
      }
    } else if (*mc_cmd) {
      if (*mc_expect) {
        const Ensemble e = build_ensemble(mce_args);
        const Interval in = chosen_interval(mce_args, e);
        const MCConfig cfg = mc_config(mce);
        json meta = family_meta(mce_args, e);
        meta["interval"] = interval_json(in);
        meta.update(mc_meta(cfg));
        job = [=](std::ostream& o, std::ostream&) { o << mc_json(mc_real_zeros(e, in, cfg), meta).dump(2) << '\n'; };
      } else if (*mc_fixed) {
        if (fp_n < 1) throw ArgError("--n must be at least 1");
        const MCConfig cfg = mc_config(mcf);
        json meta = {{"target", "fixed-points"}, {"n", fp_n}, {"analytic", rational_fixed_points_mc_target(fp_n)}};
        meta.update(mc_meta(cfg));
        job = [=](std::ostream& o, std::ostream&) { o << mc_json(mc_fixed_points(fp_n, cfg), meta).dump(2) << '\n'; };
      } else if (*mc_eigen) {
        if (eig_n < 1 || eig_n > 8) throw ArgError("--n must be between 1 and 8");
        const MCConfig cfg = mc_config(mcg);
        json meta = {{"target", "eigen"}, {"n", eig_n}, {"analytic", real_eigen_expected(eig_n)}};
        meta.update(mc_meta(cfg));
        job = [=](std::ostream& o, std::ostream&) { o << mc_json(mc_real_eigenvalues(eig_n, cfg), meta).dump(2) << '\n'; };
      } else if (*mc_mpoly) {
        if (mp_n < 1 || mp_n > 4 || mp_p < 1 || mp_p > 3) throw ArgError("matrix-poly supports 1 <= n <= 4, 1 <= p <= 3");
        const MCConfig cfg = mc_config(mcp);
        json meta = {{"target", "matrix-poly"}, {"n", mp_n}, {"p", mp_p}};
        meta.update(mc_meta(cfg));
        job = [=](std::ostream& o, std::ostream&) {
          json m = meta;
          m["analytic"] = matrix_poly_factor(mp_p) *
                          expected_zeros(make_ensemble(ClosedFormFamily::kac(mp_n)), Interval::real_line()).value;
          o << mc_json(mc_matrix_poly(mp_n, mp_p, cfg), m).dump(2) << '\n';
        };
      } else {
        if (rad_n < 1 || rad_n > 100) throw ArgError("--n must be between 1 and 100");
        for (double r : rad_radii)
          if (!(r >= 0.0)) throw ArgError("radii must be non-negative");
        const VarianceGeneratingFunction phi = radial_family(rad_family, rad_n, 1.0, 1.0);
        const MCConfig cfg = mc_config(mcr);
        json meta = {{"target", "radial"}, {"family", phi.name()}};
        meta.update(mc_meta(cfg));
        job = [=](std::ostream& o, std::ostream&) {
          const RadialEstimate est = mc_complex_radial(phi, rad_radii, cfg);
          std::vector<double> analytic;
          for (double r : est.radii) analytic.push_back(radial_count(phi, r));
          json j;
          j["radii"] = est.radii;
          j["mean"] = est.mean;
          j["stderr"] = est.std_error;
          j["analytic"] = analytic;
          j["n"] = est.n;
          j["seed"] = est.seed;
          j["resampled"] = est.resampled;
          j["meta"] = meta;
          o << j.dump(2) << '\n';
        };
      }
    } else if (*selftest_cmd) {
      const std::vector<int> ids = acceptance::criterion_ids();
      for (int id : only)
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw ArgError("no criterion " + std::to_string(id));
      job = [=](std::ostream& o, std::ostream&) {
        if (!acceptance::run_all(o, only)) throw EvaluationError("acceptance checks failed");
      };
    }
  } catch (const ArgError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    job(out, err);
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rz::cli
