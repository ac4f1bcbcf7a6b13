#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hndpv/benders.hpp"

namespace hndpv {

enum class SolveStatus { Optimal, TimeLimitFeasible, TimeLimitNoIncumbent, Infeasible };

const char* to_string(SolveStatus s);

struct SolverOptions {
  double time_limit = 3600.0;          // seconds
  double rel_gap_tolerance = 1e-6;
  double integrality_tolerance = 1e-6;
  CutMode cut_mode = CutMode::MultiCut;
  bool valid_inequalities = true;
  int root_fractional_rounds = 20;
  std::uint64_t seed = 0;
  int threads = 1;
  long node_limit = -1;   // safety ceiling for tests, -1 = unlimited
  std::string trace_path; // convergence CSV, empty = off
};

struct SolveStats {
  long bnodes = 0;
  long cuts = 0;
  long subproblem_calls = 0;
  double cpu_total_s = 0.0;
  double cpu_cuts_s = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Solution> incumbent;            // deterministic modes
  std::optional<StochasticSolution> stochastic; // scenario mode
  double objective = 0.0;    // incumbent objective when present
  double lower_bound = 0.0;
  double gap_percent = 0.0;  // 100*(UB-LB)/max(|UB|, 1e-9)
  SolveStats stats;

  bool has_incumbent() const { return incumbent.has_value() || stochastic.has_value(); }
};

// Branch-and-cut over the master relaxation with lazy feasibility cuts:
// integral LP optima are checked per scenario (closed form on complete
// networks, routing subproblem on general ones) and violated points are cut
// off and re-solved; fractional separation runs at the root only.
SolveResult solve(MasterModel& master, const SolverOptions& options);

// Convenience wrapper: builds the master and solves.
SolveResult solve_instance(const Instance& inst, const SolverOptions& options,
                           const ScenarioSet* scenarios = nullptr);

// Objective of the initial LP relaxation (no Benders cuts). Used to compare
// root bounds with and without the valid inequalities.
double root_relaxation_bound(MasterModel& master);

} // namespace hndpv
