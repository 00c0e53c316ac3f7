#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "charstrat/census.hpp"

namespace charstrat {

inline constexpr int kCriterionCount = 11;

struct VerifyConfig {
  std::uint64_t seed = 7;
  unsigned workers = 1;
  std::uint64_t budget = kDefaultCensusBudget;
  std::uint64_t mc_samples = 1000000;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// Errors inside a criterion are caught and reported as a failure.
CriterionResult run_criterion(int id, const VerifyConfig& cfg);
// All criteria when `ids` is empty.
std::vector<CriterionResult> run_acceptance(const VerifyConfig& cfg, const std::vector<int>& ids = {});
// "criterion  3 PASS  <title>: <detail> [12.3 s]"
std::string format_result(const CriterionResult& r);

}  // namespace charstrat
