#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace okb {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

struct AcceptanceOptions {
  bool quick = false;          // caps the k ladders for fast runs
  std::string corrupt;         // test hook: criterion id whose tolerance is
                               // made impossible, to exercise failure paths
  std::string only;            // run a single criterion id when nonempty
  std::uint64_t seed = 0;
};

// Runs the acceptance battery; one result per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

// Formats "PASS  3  entropy-closed-form  (1.2s)  detail" lines.
std::string format_criterion_line(const CriterionResult& r);

}  // namespace okb
