#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rz::acceptance {

struct Outcome {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Criterion numbers 1 … 14.
std::vector<int> criterion_ids();

/// Runs one criterion; exceptions are reported as a failure with the message as detail.
Outcome run_criterion(int id);

/// One line per criterion, "[PASS] 3 kostlan exactness: ..." or "[FAIL] ...".
/// Returns true when every selected criterion passed. An empty selection runs all.
bool run_all(std::ostream& out, const std::vector<int>& only = {});

}  // namespace rz::acceptance
