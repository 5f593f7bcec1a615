// Runs the acceptance criteria with 1, 4 and 8 workers and prints one line
// per criterion. Exit status 0 only when every criterion passes.

#include "sburgers/harness.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  std::uint64_t seed = 20240611;
  std::filesystem::path out = "acceptance-out";
  if (argc > 1) out = argv[1];
  if (argc > 2) seed = std::stoull(argv[2]);

  const sburgers::AcceptanceSummary summary = sburgers::run_acceptance(seed, {1, 4, 8}, out, &std::clog);
  for (const auto& c : summary.criteria) {
    std::cout << (c.pass() ? "PASS" : "FAIL") << "  [" << std::setw(2) << c.id << "] " << c.name
              << ": measured " << c.measured << ", threshold " << c.threshold;
    if (c.budget_s > 0.0)
      std::cout << ", time " << std::setprecision(3) << c.wall_time_s << " s of " << c.budget_s << " s";
    std::cout << '\n';
  }
  std::cout << (summary.all_pass() ? "acceptance: all criteria pass" : "acceptance: FAILED") << std::endl;
  return summary.all_pass() ? EXIT_SUCCESS : EXIT_FAILURE;
}
