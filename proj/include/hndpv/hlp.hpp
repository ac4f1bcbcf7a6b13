#pragma once

#include <optional>

#include "hndpv/costs.hpp"

namespace hndpv {

// Classical constant-discount cost factors: per unit of flow, collection
// from origin to hub, discounted transfer between hubs, distribution from
// hub to destination.
struct DiscountFactors {
  double collection = 3.0;
  double transfer = 0.75;
  double distribution = 2.0;
};

struct HlpResult {
  Assignment assignment;
  double discount_objective = 0.0;
  bool heuristic = false; // true when solved by local search above budget
};

// Minimizes LC(x) + sum_ij w_ij (chi d(i,a(i)) + alpha d(a(i),a(j)) +
// delta d(a(j),j)) over the same feasible assignments. Exact by enumeration
// within the budget; otherwise a first-improvement local search from a
// greedy seed, flagged heuristic.
HlpResult solve_classical_hlp(const Instance& inst, const DiscountFactors& f,
                              const OracleOptions& opt = {},
                              bool allow_heuristic = true);

// Re-costs a classical design under the vehicle model (minimum fleets).
Solution post_assign_vehicles(const Instance& inst, const Assignment& a);

struct ComparisonEntry {
  double base = 0.0;  // HNDPv value
  double other = 0.0; // HLP value
  std::optional<double> percent; // 100*(other-base)/base, absent if base = 0
  double absolute = 0.0;
};

struct HlpComparison {
  ComparisonEntry tc, veh1, veh2, vutil;
};

// Percent differences with the HNDPv solution as base; positive means the
// classical design is worse/larger on that metric.
HlpComparison compare(const Solution& hndpv, const Solution& hlp);

} // namespace hndpv
