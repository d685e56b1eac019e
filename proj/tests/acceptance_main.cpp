// Acceptance criteria 1-9. Criteria 1-8 come from one full selftest run;
// criterion 9 repeats the run and compares the two reports byte for byte.

#include <cstdio>
#include <string>

#include "tdlhf/selftest.hpp"

int main() {
  using namespace tdlhf::app;
  auto show = [](const CriterionResult &c) {
    std::printf("criterion %d %s: %s: %s (%.1f s)\n", c.id, c.passed ? "PASS" : "FAIL",
                c.title.c_str(), c.detail.c_str(), c.seconds);
    std::fflush(stdout);
  };
  const SelftestReport first = run_selftest(SelftestLevel::full, show);
  const SelftestReport second = run_selftest(SelftestLevel::full);
  const bool same = first.text() == second.text();
  std::printf("criterion 9 %s: determinism: two full selftest reports are %s\n",
              same ? "PASS" : "FAIL", same ? "byte-identical" : "different");
  if (!same)
    std::printf("--- first\n%s--- second\n%s", first.text().c_str(),
                second.text().c_str());
  const bool ok = first.all_passed() && same;
  std::printf("%s\n", ok ? "all criteria passed" : "some criteria failed");
  return ok ? 0 : 1;
}
