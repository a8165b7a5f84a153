#pragma once

// The acceptance suite, shared by `gapbound verify` and the test binary.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gapbound {

enum class Suite { Fast, Full };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool skipped = false;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<CriterionResult> run_acceptance(Suite suite, std::uint64_t seed, int threads,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS  3  name  (detail, 0.01 s)"
std::string format_result(const CriterionResult& r);

}  // namespace gapbound
