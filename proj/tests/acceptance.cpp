// Acceptance gate: one PASS/FAIL line per criterion; nonzero exit on failure.

#include <iostream>
#include <string>

#include "prbm/acceptance.hpp"

int main(int argc, char** argv) {
  const std::string filter = argc > 1 ? argv[1] : "";
  const auto results = prbm::acceptance::run_all(std::cout, filter);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " acceptance criteria passed" << std::endl;
  return failed == 0 && !results.empty() ? 0 : 1;
}
