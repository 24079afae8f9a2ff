#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "randzeros/cli.hpp"

using rz::cli::dispatch;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("density grid as CSV") {
  const Run r = run({"density", "--family", "kac", "--n", "10", "--grid", "-3:3:601", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 602);
  CHECK(rows[0].rfind("t,rho", 0) == 0);
  // Row 301 is t = 0, where the Kac density is 1/π for every degree.
  const std::string& mid = rows[301];
  const auto comma = mid.find(',');
  CHECK(std::abs(std::strtod(mid.c_str(), nullptr)) < 1e-15);
  const double rho0 = std::strtod(mid.c_str() + comma + 1, nullptr);
  CHECK(std::abs(rho0 - 1 / M_PI) <= 1e-12);
  // Values are printed with full precision and survive a round trip.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", rho0);
  CHECK(std::strtod(buf, nullptr) == rho0);
  CHECK(r.err.find("# meta") != std::string::npos);
}

TEST_CASE("expected count as JSON") {
  const Run r = run({"expect", "--family", "kostlan", "--n", "9"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["expected"].get<double>() == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(j.contains("meta"));
  const Run kos = run({"expect", "--family", "kostlan", "--n", "4", "--closed"});
  REQUIRE(kos.code == 0);
  CHECK(nlohmann::json::parse(kos.out)["closed_form"].get<double>() == doctest::Approx(2.0).epsilon(1e-14));
  // Kac polynomials have no closed-form count; the request is refused up front.
  const Run kac = run({"expect", "--family", "kac", "--n", "4", "--closed"});
  CHECK(kac.code == 2);
  CHECK(kac.out.empty());
}

TEST_CASE("Monte Carlo runs are reproducible") {
  const std::vector<std::string> args = {"mc", "expect", "--family", "kac", "--n", "5", "--samples", "2000", "--seed", "77"};
  const Run a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::vector<std::string> more = args;
  more.insert(more.end(), {"--workers", "3"});
  CHECK(nlohmann::json::parse(run(more).out)["mean"] == nlohmann::json::parse(a.out)["mean"]);
}

TEST_CASE("seed from the environment") {
  const std::vector<std::string> args = {"mc", "eigen", "--n", "3", "--samples", "500"};
  ::setenv(rz::cli::kSeedEnv, "1234", 1);
  const Run env = run(args);
  ::unsetenv(rz::cli::kSeedEnv);
  std::vector<std::string> explicit_seed = args;
  explicit_seed.insert(explicit_seed.end(), {"--seed", "1234"});
  const Run flag = run(explicit_seed);
  REQUIRE(env.code == 0);
  REQUIRE(flag.code == 0);
  CHECK(nlohmann::json::parse(env.out)["mean"] == nlohmann::json::parse(flag.out)["mean"]);
  ::setenv(rz::cli::kSeedEnv, "not-a-number", 1);
  CHECK(run(args).code == 2);
  ::unsetenv(rz::cli::kSeedEnv);
}

TEST_CASE("help for every subcommand") {
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
      {{"--help"}, "density"},
      {{"density", "--help"}, "--grid"},
      {{"expect", "--help"}, "--tol"},
      {{"asymptotic", "--help"}, "--compare"},
      {{"noncentral", "--help"}, "--mean"},
      {{"systems", "--help"}, "--degrees"},
      {{"matrix", "--help"}, "--kind"},
      {{"complex", "--help"}, "--radii"},
      {{"mc", "--help"}, "fixed-points"},
      {{"mc", "expect", "--help"}, "--samples"},
      {{"mc", "radial", "--help"}, "--radii"},
      {{"selftest", "--help"}, "--only"},
  };
  for (const auto& [args, needle] : cases) {
    CAPTURE(args.front());
    const Run r = run(args);
    CHECK(r.code == 0);
    CHECK(r.out.find(needle) != std::string::npos);
  }
}

TEST_CASE("bad arguments exit with code 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"density", "--family", "kac", "--n", "5"}).code == 2);                       // no grid
  CHECK(run({"noncentral", "--family", "kac", "--n", "5", "--mean", "1", "--mean-case", "constant"}).code == 2);
  CHECK(run({"density", "--family", "nope", "--grid", "0:1:3"}).code == 2);               // unknown family
  CHECK(run({"density", "--family", "kac", "--n", "x", "--grid", "0:1:3"}).code == 2);    // not a number
  CHECK(run({"density", "--family", "power_series", "--grid", "0:2:5"}).code == 2);       // outside the domain
  CHECK(run({"expect", "--family", "kac", "--n", "3", "--lo", "2", "--hi", "1"}).code == 2);
  CHECK(run({"systems", "--family", "kostlan", "--d", "2", "--m", "3", "--numeric"}).code == 2);
  CHECK(run({"systems", "--family", "entire", "--m", "2", "--numeric"}).code == 2);
  CHECK(run({"matrix", "--kind", "eigen", "--n", "0"}).code == 2);
  CHECK(run({"mc", "eigen", "--n", "3", "--samples", "0"}).code == 2);
  const Run r = run({"density", "--family", "kac", "--n", "5"});
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("other subcommands produce JSON") {
  for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
           {"asymptotic", "--n", "1000"},
           {"noncentral", "--family", "kac", "--n", "50", "--mean", "1"},
           {"noncentral", "--family", "kostlan", "--n", "4", "--mean", "1", "--mean-case", "constant"},
           {"systems", "--family", "kostlan", "--d", "3", "--m", "2", "--point", "0.1,0.2"},
           {"matrix", "--kind", "eigen", "--n", "4"},
           {"matrix", "--kind", "kac-spectrum", "--n", "5"},
           {"complex", "--family", "kostlan", "--n", "6", "--radii", "0.5:2:4"},
           {"mc", "radial", "--family", "kac", "--n", "6", "--radii", "0.5,1,2", "--samples", "300", "--seed", "5"}}) {
    CAPTURE(args.front());
    const Run r = run(args);
    CHECK(r.code == 0);
    CHECK(nlohmann::json::accept(r.out));
  }
}
