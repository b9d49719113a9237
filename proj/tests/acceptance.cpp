// Acceptance gate: prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "maximin/checks.hpp"

int main(int argc, char** argv) {
  using namespace maximin::checks;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  std::vector<CheckResult> results;
  for (auto suite : {Suite::Bisection, Suite::Identities, Suite::Clusters, Suite::Splines})
    for (auto& r : run_suite(suite, seed)) results.push_back(std::move(r));
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return std::stoi(a.id) < std::stoi(b.id); });
  int failed = 0;
  for (const auto& r : results) {
    std::cout << format(r) << '\n';
    if (!r.passed) ++failed;
  }
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
