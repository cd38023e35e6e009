#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracdim/config.hpp"

namespace fracdim {

enum class Suite { Fast, Full };

Suite suite_from_string(const std::string& text);
std::string to_string(Suite suite);

inline constexpr std::uint64_t kDefaultVerifySeed = 2024;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;        // numerical outcome; deterministic for a given seed
  Json values;              // the measured quantities behind `pass`
  double seconds = 0.0;     // wall time, kept out of the report body
  double time_limit = 0.0;  // 0 when the criterion has none
  bool within_time() const { return time_limit <= 0.0 || seconds < time_limit; }
  bool ok() const { return pass && within_time(); }
};

// Criteria 1..13. Criterion 13 runs the fast suite twice and compares the reports.
std::vector<int> suite_criteria(Suite suite);
CriterionResult run_criterion(int id, std::uint64_t seed);

using Progress = std::function<void(const CriterionResult&)>;
std::vector<CriterionResult> run_suite(Suite suite, std::uint64_t seed, const Progress& progress = {});

// Report body without timings; identical seeds give identical bytes.
Json suite_report(Suite suite, std::uint64_t seed, const std::vector<CriterionResult>& results);
Json suite_timings(const std::vector<CriterionResult>& results);

// "PASS  6  title" style summary line without timings.
std::string summary_line(const CriterionResult& r);

}  // namespace fracdim
