#pragma once

#include <functional>
#include <string>
#include <vector>

namespace scalarcf {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;  ///< measured values behind the verdict
};

/// "[PASS] 3 epsilon-bound: ..." style single line.
std::string format_result(const CriterionResult& result);

/// Runs acceptance criteria 1 to 10. Simulations shared between criteria
/// run once. `on_result` is called as each verdict is ready.
std::vector<CriterionResult> run_acceptance(
    const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace scalarcf
