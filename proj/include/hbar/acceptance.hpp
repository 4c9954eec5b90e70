#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hbar/common.hpp"

namespace hbar {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // deterministic: no timings
  double seconds = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  Exec exec = Exec::Parallel;
  /// Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

/// "all" is 1..16, "fast" a sub-minute subset, or a single criterion number.
/// Unknown names throw.
std::vector<int> suite_criteria(const std::string& suite);

/// Runs the criteria in order. Criterion 16 reruns the others serially on
/// one thread and compares the report bytes with the parallel run.
std::vector<CriterionResult> run_suite(const std::vector<int>& ids, const SuiteOptions& opt);

/// "criterion  6  PASS  doubling map entropy: ...".
std::string result_line(const CriterionResult& r);
/// Machine-readable summary without timings.
std::string suite_report_json(const std::vector<CriterionResult>& results);

}  // namespace hbar
