#pragma once

// Property suites shared by the unit tests and the acceptance binary.
// Each returns how many checks ran and how many were violated.

#include <cstdint>
#include <string>
#include <vector>

namespace props {

struct Report {
  std::string name;
  long checks = 0;
  long violations = 0;
  std::vector<std::string> failures;  // first few, for diagnostics

  void expect(bool ok, const std::string& what);
};

Report tree_distance_axioms(std::uint64_t seed, int trials);
Report reward_monotonicity(std::uint64_t seed, int trials);
Report uct_hand_cases();
Report minimizer_descent(std::uint64_t seed, int starts);
Report determinism(std::uint64_t seed);

std::vector<Report> all(std::uint64_t seed);

}  // namespace props
