#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace basilica {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  std::int64_t millis = 0;
};

// Runs acceptance criterion `id` (1..10). Tolerances are pinned inside each
// criterion; `workers` only affects wall time, never results.
CriterionResult run_criterion(int id, int workers);

// Runs the listed criteria (all ten when `ids` is empty) in order.
std::vector<CriterionResult> run_acceptance(int workers,
                                            const std::vector<int>& ids = {});

}  // namespace basilica
