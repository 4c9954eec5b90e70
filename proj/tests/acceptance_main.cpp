// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: hbar_acceptance [suite] [seed]; the suite defaults to "all".
#include <cstdio>
#include <cstdlib>
#include <string>

#include "hbar/acceptance.hpp"

int main(int argc, char** argv) {
  const std::string suite = argc > 1 ? argv[1] : "all";
  hbar::SuiteOptions opt;
  if (argc > 2) opt.seed = std::strtoull(argv[2], nullptr, 10);
  opt.on_result = [](const hbar::CriterionResult& r) {
    std::printf("%s\n", hbar::result_line(r).c_str());
    std::fflush(stdout);
    std::fprintf(stderr, "  (criterion %d took %.1f s)\n", r.id, r.seconds);
  };
  try {
    const auto results = hbar::run_suite(hbar::suite_criteria(suite), opt);
    std::size_t failed = 0;
    for (const auto& r : results) failed += !r.pass;
    std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
