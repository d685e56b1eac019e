#pragma once

// Acceptance suite shared by `tdlhf selftest` and the acceptance test binary.

#include <functional>
#include <string>
#include <vector>

namespace tdlhf::app {

enum class SelftestLevel { fast, full };

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail; // deterministic: no timings
  double seconds = 0.0;
};

struct SelftestReport {
  SelftestLevel level = SelftestLevel::full;
  std::vector<CriterionResult> results;

  bool all_passed() const;
  // One header line, then "[PASS] n title: detail" per criterion.
  std::string text() const;
};

// Runs criteria 1-8. `fast` shrinks panels, sweeps and propagation lengths;
// its runtime limits are not checked. Criterion 9 (determinism) is checked
// by comparing the text of two full runs.
SelftestReport run_selftest(
    SelftestLevel level,
    const std::function<void(const CriterionResult &)> &progress = {});

} // namespace tdlhf::app
