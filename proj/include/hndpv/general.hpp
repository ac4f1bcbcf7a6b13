#pragma once

#include "hndpv/benders.hpp"
#include "hndpv/bnc.hpp"

namespace hndpv {

// Routing feasibility subproblem for general (incomplete-path) inter-hub
// networks: flow variables z_ihk with per-arc capacity Q*ybar and a
// conservation row per (hub, commodity).
struct GeneralSubproblem {
  LinearProgram lp;
  int n = 0;
  int nh = 0;

  int col_z(int i, int h, int k) const { return (i * nh + h) * nh + k; }
  int capacity_row(int h, int k) const { return h * nh + k; }
  int conservation_row(int h, int i) const { return nh * nh + h * n + i; }
};

// xbar must be integral; separation in general mode runs at integral
// candidates only.
GeneralSubproblem build_gbsp(const Matrix& xbar, const Matrix& ybar,
                             const Instance& inst, const Matrix& flow);

// Maps the Farkas ray of an infeasible subproblem onto a master cut
//   sum_hk Q*lambda_hk y_hk + sum_hi eta_hi (O_i x_hi - sum_j w_ij x_hj) <= 0.
// Diagonal capacity multipliers are zeroed (their rows are never binding and
// a nonzero weight would let the zero-cost diagonal absorb the cut). Throws
// NumericalError when the ray fails the dual-cone replay check or does not
// separate the trigger point.
FeasibilityCut extract_general_cut(const MasterModel& master,
                                   const GeneralSubproblem& sub,
                                   const LpInfeasible& cert, const Matrix& xbar,
                                   const Matrix& ybar, int scenario);

// Builds a general-mode master for the instance and runs the branch-and-cut.
SolveResult solve_general(const Instance& inst, const SolverOptions& options,
                          const ScenarioSet* scenarios = nullptr);

// Independent ground truth for tiny general instances: enumerates feasible
// assignments and, per assignment, searches integer vehicle vectors in
// nondecreasing cost order (per-arc count capped) until the routing
// subproblem is feasible.
Solution general_routing_oracle(const Instance& inst, long y_bound = 3,
                                const OracleOptions& opt = {});

} // namespace hndpv
