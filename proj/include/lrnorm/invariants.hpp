#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lrnorm {

struct InvariantCheck {
  std::string module;
  std::string name;
  bool passed = false;
  // Worst observed statistic and the limit it is held against.
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct InvariantOptions {
  std::uint64_t seed = 1;
  // Fault injection into the Hermite recurrence; negative degree disables it.
  int hermite_fault_degree = -1;
  double hermite_fault_delta = 0.0;
};

struct InvariantReport {
  std::uint64_t seed = 0;
  std::vector<InvariantCheck> checks;
  std::size_t failures() const;
  bool all_passed() const { return failures() == 0; }
  /// Scorecard JSON; identical options give identical bytes.
  std::string to_json() const;
};

/// Runs every module invariant with seeds derived from options.seed.
/// Failures are entries in the report, not exceptions.
InvariantReport run_invariant_suite(const InvariantOptions& options = {});

}  // namespace lrnorm
