#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hirank/io.hpp"

namespace hirank {

enum class AcceptLevel { Quick, Full };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  Json data;  // measured values
};

struct AcceptOptions {
  AcceptLevel level = AcceptLevel::Full;
  uint64_t seed = 0;
  std::vector<int> only;  // empty: all ten
  std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kCriteria = 10;

CriterionResult run_criterion(int id, const AcceptOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptOptions& opt);
std::string format_result_line(const CriterionResult& r);
Json acceptance_json(const std::vector<CriterionResult>& rs, const AcceptOptions& opt);

}  // namespace hirank
