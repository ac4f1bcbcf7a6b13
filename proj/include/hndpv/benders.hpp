#pragma once

#include <iosfwd>
#include <optional>
#include <tuple>
#include <vector>

#include "hndpv/costs.hpp"
#include "hndpv/instance.hpp"
#include "hndpv/lp.hpp"

namespace hndpv {

enum class CutMode { MultiCut, WorstOnly };

struct MasterOptions {
  bool valid_inequalities = true;
};

// One feasibility cut over the master variables: sense <=, rhs 0. Closed-form
// cuts come from the analytic dual ray of a violated hub pair; Farkas cuts
// from an infeasible routing subproblem in general-network mode.
struct FeasibilityCut {
  enum class Source { ClosedForm, FarkasRay };
  Source source = Source::ClosedForm;
  int hub_from = -1; // hub position (closed-form)
  int hub_to = -1;
  int scenario = 0;
  std::vector<double> xbar_row;     // snapshot of the x row of hub_from
  LpRow row;                        // realized inequality
  double capacity_violation = 0.0;  // F - Q*ybar at the trigger point
  double trigger_violation = 0.0;   // cut left side at the trigger point
};

// Integer master: x assignment variables and per-scenario integer vehicle
// counts, solved as an LP relaxation inside the branch-and-cut. Diagonal y
// variables exist with zero cost; they absorb intra-hub flow and the
// right-hand sums of the fleet-size inequalities.
struct MasterModel {
  const Instance* instance = nullptr;
  std::vector<Matrix> flows;               // one per scenario (length 1 when deterministic)
  std::vector<double> probs;
  std::vector<std::vector<double>> origin; // O^s_i per scenario
  std::vector<std::vector<double>> dest;   // D^s_i per scenario
  bool stochastic = false;
  bool general = false;
  double y_upper = 0.0;

  LinearProgram lp;
  std::vector<double> base_lower, base_upper; // bounds before branching
  std::vector<FeasibilityCut> pool;
  int assignment_rows = 0;
  int linking_rows = 0;
  int capacity_rows = 0;
  int valid_inequality_rows = 0;

  int n = 0;
  int nh = 0;

  int scenario_count() const { return static_cast<int>(flows.size()); }
  int col_x(int h, int i) const { return h * n + i; }
  int col_y(int s, int h, int k) const {
    return nh * n + (s * nh + h) * nh + k;
  }
  int num_x() const { return nh * n; }
  int num_cols() const { return nh * n + scenario_count() * nh * nh; }

  // LP values reshaped per block.
  Matrix x_matrix(const std::vector<double>& primal) const;
  Matrix y_matrix(const std::vector<double>& primal, int s) const;

  void snapshot_bounds();
};

// Builds the relaxation (continuous y). Throws ValidationError when the
// model is infeasible by construction (a node no hub can host).
MasterModel build_master(const Instance& inst, const MasterOptions& options,
                         const ScenarioSet* scenarios = nullptr);

void add_valid_inequalities(MasterModel& master);

struct Violation {
  int hub_from = 0;
  int hub_to = 0;
  double amount = 0.0;
};

// All ordered hub pairs (diagonal included) with F_hk - Q*ybar_hk above tol.
std::vector<Violation> check_feasibility(const Matrix& xbar, const Matrix& ybar,
                                         const Matrix& flow, double capacity,
                                         double tol = 1e-6);

std::vector<Violation> select_violations(std::vector<Violation> violations,
                                         CutMode mode);

// Materializes the closed-form dual ray for the violated pair and realizes
// the master inequality. Throws ValidationError when the pair is not
// actually violated at (xbar, ybar).
FeasibilityCut make_cut(const MasterModel& master, int hub_from, int hub_to,
                        const Matrix& xbar, const Matrix& ybar, int scenario);

// Cut left side at an arbitrary master point.
double cut_activity(const MasterModel& master, const FeasibilityCut& cut,
                    const Matrix& xbar, const Matrix& ybar);

struct RayDiagnostic {
  bool dual_feasible = false;     // every lambda + mu + nu <= 1e-9
  bool objective_matches = false; // dual objective == Gamma*(F - Q*ybar)
  bool separating = false;        // dual objective > 0
  double objective = 0.0;
  double expected = 0.0;
  std::optional<std::tuple<int, int, int>> violated_triple; // (h, k, i)
};

RayDiagnostic verify_ray(const FeasibilityCut& cut, const Matrix& xbar,
                         const Matrix& ybar, const Matrix& flow,
                         double capacity);

// Audit dump: one line per pooled cut with source, pair, scenario, trigger
// violation, and a coefficient checksum for regression diffing.
void dump_cut_pool(const MasterModel& master, std::ostream& os);

} // namespace hndpv
