#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hndpv/instance.hpp"
#include "hndpv/matrix.hpp"

namespace hndpv {

// ceil(v - 1e-9), clamped at 0; the slack guards sums of products against
// accumulated rounding (600.0000000001 / 600 still needs one vehicle).
long guarded_ceil(double v);

// max(ceil(D/q), ceil(O/q)): vehicles start and end at the hub, so the
// larger of pickup and delivery trips drives the preprocessed count.
long secondary_vehicle_count(double origin, double dest, double q);

// Round-trip cost of serving node i from hub h by one secondary vehicle.
double access_cost(const Instance& inst, int hub, int node);

// Cost of one primary vehicle on hub arc (h, k).
double interhub_vehicle_cost(const Instance& inst, int h, int k);

// Minimum integer vehicle count with flow <= Q * count.
long forced_vehicle_count(double flow, double capacity);

// Single-allocation first-stage decision. assign[i] is the hub node serving
// node i; open_hubs is sorted and may contain hubs with no assigned nodes
// (needed when a p-hub count forces extra openings).
struct Assignment {
  std::vector<int> assign;
  std::vector<int> open_hubs;

  static Assignment from_map(std::vector<int> assign);
  bool is_open(int hub) const;
  // Throws ValidationError on any violated invariant. Capacity is checked
  // against origin totals of the given flow matrix.
  void validate(const Instance& inst, const Matrix& flow) const;
};

// Consolidated flow between hub pairs, indexed by hub position.
struct InterHubFlows {
  Matrix F; // F(h,k) = sum_i sum_j w_ij x_hi x_kj
};

InterHubFlows interhub_flows(const Instance& inst, const Assignment& a,
                             const Matrix& flow);

// Same aggregation for a fractional assignment snapshot (xbar is H x N).
Matrix interhub_flows_fractional(const Matrix& xbar, const Matrix& flow);

// Per-origin decomposition z_ihk = x_hi * sum_j w_ij x_kj.
double flow_decomposition(const Assignment& a, const Matrix& flow, int node,
                          int hub_from, int hub_to);

struct SolutionMetrics {
  long veh1 = 0;               // primary vehicles, off-diagonal
  long veh2 = 0;               // secondary vehicles
  std::optional<double> vutil; // 100 * hflow / (veh1 * Q), absent if veh1 = 0
  double hflow = 0.0;          // total inter-hub flow, off-diagonal
};

struct Solution {
  Assignment assignment;
  Matrix y; // H x H vehicle counts, diagonal reported as zero
  double LC = 0.0;
  double DC = 0.0;
  double HC = 0.0;
  double TC = 0.0;
  SolutionMetrics metrics;
};

// Optimal completion of a fixed assignment: forced vehicle counts, all cost
// components, and metrics, under the given flow matrix.
Solution evaluate_assignment(const Instance& inst, const Assignment& a,
                             const Matrix& flow);

struct OracleOptions {
  long budget = 10'000'000; // refuse when |H|^N exceeds this
  int threads = 1;
};

// Exhaustive ground truth: enumerates every feasible assignment, ties broken
// by lexicographically smallest assignment vector.
Solution brute_force_oracle(const Instance& inst, const OracleOptions& opt = {});

struct StochasticSolution {
  Assignment assignment;
  double objective = 0.0; // LC + sum_s p_s (DC_s + HC_s)
  double LC = 0.0;
  std::vector<Solution> per_scenario;
};

// Exhaustive ground truth for the scenario expansion. Capacity must hold
// under every scenario's origin totals.
StochasticSolution brute_force_oracle_stochastic(const Instance& inst,
                                                 const ScenarioSet& scen,
                                                 const OracleOptions& opt = {});

// Shared by the oracles and the classical baseline: calls fn(assign_vector,
// open_count) for every feasible assignment (capacity/p filtered).
void enumerate_assignments(const Instance& inst,
                           const std::vector<const Matrix*>& capacity_flows,
                           long budget,
                           const std::function<void(const std::vector<int>&, int)>& fn);

} // namespace hndpv
