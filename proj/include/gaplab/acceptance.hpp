#pragma once

#include <string>
#include <vector>

namespace gaplab {

/// One acceptance check: pinned tolerances, measured wall time, and a short
/// human-readable account of the values behind the verdict.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs the full acceptance suite in order. Quick mode shrinks refinement
/// levels and trial counts for CI-scale runtimes; the checked statements and
/// their tolerances stay the same unless noted in the criterion detail.
std::vector<CriterionResult> run_acceptance(bool quick);

/// "PASS  3 equilateral-gap (12.3s): ..." one-line rendering.
std::string format_criterion(const CriterionResult& r);

}  // namespace gaplab
