#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rz::cli {

/// A parsed and validated command, echoed back in the output metadata.
struct RunSpec {
  std::string subcommand;
  std::map<std::string, std::string> params;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  double tol = 1e-10;
};

/// Name of the environment variable holding the default Monte Carlo seed.
inline constexpr const char* kSeedEnv = "RANDZEROS_SEED";

/// Exit codes: 0 success, 2 argument errors (usage on err), 1 numeric failures.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "lo:hi:count" with count ≥ 1 (count 1 yields lo alone).
std::vector<double> parse_grid(const std::string& text);

/// %.17g, which reads back to the same double.
std::string format_double(double x);

}  // namespace rz::cli
