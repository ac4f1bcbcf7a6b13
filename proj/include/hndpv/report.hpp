#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hndpv/bnc.hpp"
#include "hndpv/hlp.hpp"

namespace hndpv {

// Structured run report. Built as a JSON document with a stable key order so
// reruns with identical inputs and seed are byte-identical apart from the
// cpu timing fields.
struct ReportInputs {
  const Instance* instance = nullptr;
  const SolverOptions* options = nullptr;
  const SolveResult* result = nullptr;
  const std::vector<double>* scenario_probs = nullptr; // stochastic runs
  const HlpComparison* baseline = nullptr;
  std::optional<double> baseline_discount_objective;
  bool baseline_heuristic = false;
};

std::string make_report(const ReportInputs& in);
void write_report(const ReportInputs& in, const std::string& path);

// Re-checks every self-consistency invariant of a report document:
// TC = LC + DC + HC, the stochastic expectation identity, and the exact
// vehicle-utilization formula. Returns human-readable problems, empty when
// the report is valid.
std::vector<std::string> validate_report_text(const std::string& text);
std::vector<std::string> validate_report_file(const std::string& path);

} // namespace hndpv
