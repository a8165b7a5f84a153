#include <cstdio>
#include <iostream>

#include "gapbound/verify.hpp"

int main() {
  int failed = 0;
  gapbound::run_acceptance(gapbound::Suite::Full, 42, 1, [&](const gapbound::CriterionResult& r) {
    // Skips count as failures here: the full suite is expected to run everything.
    failed += !r.pass || r.skipped;
    std::cout << gapbound::format_result(r) << std::endl;
  });
  return failed == 0 ? 0 : 1;
}
