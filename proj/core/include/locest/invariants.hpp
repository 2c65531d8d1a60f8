#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace locest {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // worst observed value
  double bound = 0.0;     // limit it was held against
  std::string detail;
};

/// Names of all registered property checks, in execution order.
std::vector<std::string> invariant_names();

/// Runs every check whose name contains the filter substring (all when the
/// filter is empty). Output is deterministic: internal seeds are fixed and
/// results are independent of the worker count.
std::vector<CheckResult> run_invariants(const std::string& filter, unsigned workers);

/// Prints "PASS|FAIL name measured=... bound=... detail" lines; returns the
/// number of failures.
int report_invariants(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace locest
