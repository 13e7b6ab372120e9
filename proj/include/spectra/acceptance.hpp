#pragma once

// The numbered acceptance criteria, each a small-t desk-scale check with fixed
// tolerances and a wall-clock budget. Shared by the `verify` command and the
// acceptance test binary.

#include <iosfwd>
#include <string>
#include <vector>

namespace spectra::acceptance {

struct Check {
  std::string text;
  bool passed;
};

struct Outcome {
  int id;
  std::string title;
  bool passed;
  double seconds;
  double budget_seconds;
  std::vector<Check> checks;
  std::string error;  // set when the criterion threw
};

struct SuiteOptions {
  int jobs = 1;
  bool statistical = true;  // criterion 11 (Langevin) can be skipped
  std::vector<int> only;    // empty: all criteria
};

struct CriterionInfo {
  int id;
  const char* title;
  double budget_seconds;
  bool statistical;
};

const std::vector<CriterionInfo>& criteria();

Outcome run_criterion(int id, const SuiteOptions& opts = {});

/// Runs the selected criteria in order, printing one PASS/FAIL line each (plus
/// indented detail lines) as they finish.
std::vector<Outcome> run_suite(const SuiteOptions& opts, std::ostream& out);

void print_outcome(const Outcome& outcome, std::ostream& out);

}  // namespace spectra::acceptance
