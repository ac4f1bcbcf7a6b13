#include "doctest.h"

#include <cmath>
#include <random>

#include "hndpv/general.hpp"
#include "support.hpp"

using namespace hndpv;
using testsupport::t3;

namespace {

Matrix xbar_from(const Instance& inst, const std::vector<int>& assign) {
  Matrix x(inst.hub_count(), inst.n);
  for (int i = 0; i < inst.n; ++i) x(inst.hub_index(assign[i]), i) = 1.0;
  return x;
}

// Two far-apart demand clusters plus a cheap midpoint hub on the line
// between them, so indirect routing can pay off.
Instance corridor() {
  Instance inst;
  inst.n = 5;
  inst.has_coords = true;
  inst.coords = {{0, 0}, {2, 0}, {50, 0}, {98, 0}, {100, 0}};
  inst.flow = Matrix(5, 5);
  inst.flow(0, 4) = 55;
  inst.flow(1, 0) = 10;
  inst.flow(3, 4) = 10;
  inst.hubs = {0, 2, 4};
  inst.fixed_cost = {100, 5, 100};
  inst.hub_capacity.assign(3, kUnbounded);
  inst.vehicle = {50, 10, 40, 30, 0, 0};
  inst.finalize();
  return inst;
}

} // namespace

TEST_CASE("gbsp has the documented shape and balanced right-hand sides") {
  Instance inst = t3();
  Matrix xbar = xbar_from(inst, {0, 1, 1});
  Matrix ybar(3, 3);
  GeneralSubproblem sub = build_gbsp(xbar, ybar, inst, inst.flow);
  CHECK(sub.lp.num_rows() == 9 + 9); // |H|^2 + |H| N
  CHECK(sub.lp.num_columns() == 27); // N |H|^2

  for (int i = 0; i < 3; ++i) {
    double total = 0.0;
    for (int h = 0; h < 3; ++h) total += sub.lp.row(sub.conservation_row(h, i)).rhs;
    CHECK(total == doctest::Approx(0.0));
  }
}

TEST_CASE("gbsp feasibility matches routing intuition") {
  Instance inst = t3();

  Matrix xbar = xbar_from(inst, {0, 1, 1});
  Matrix huge(3, 3, 100.0);
  GeneralSubproblem relaxed = build_gbsp(xbar, huge, inst, inst.flow);
  auto relaxed_out = relaxed.lp.solve();
  CHECK(lp_optimal(relaxed_out));

  // No vehicles: node 0's net outbound supply at its hub has nowhere to go.
  Matrix zero(3, 3);
  GeneralSubproblem stuck = build_gbsp(xbar, zero, inst, inst.flow);
  auto stuck_out = stuck.lp.solve();
  CHECK(lp_infeasible(stuck_out));

  // Single open hub: every balance is zero, trivially feasible.
  Matrix single = xbar_from(inst, {1, 1, 1});
  GeneralSubproblem closed = build_gbsp(single, zero, inst, inst.flow);
  auto closed_out = closed.lp.solve();
  CHECK(lp_optimal(closed_out));
}

TEST_CASE("general cuts separate the trigger point and scale homogeneously") {
  Instance inst = t3();
  inst.network = NetworkMode::General;
  inst.finalize();
  MasterModel master = build_master(inst, {.valid_inequalities = false});

  Matrix xbar = xbar_from(inst, {0, 1, 1});
  Matrix ybar(3, 3);
  GeneralSubproblem sub = build_gbsp(xbar, ybar, inst, inst.flow);
  auto outcome = sub.lp.solve();
  const auto* cert = lp_infeasible(outcome);
  REQUIRE(cert);

  FeasibilityCut cut = extract_general_cut(master, sub, *cert, xbar, ybar, 0);
  CHECK(cut.trigger_violation > 1e-6);
  CHECK(cut.source == FeasibilityCut::Source::FarkasRay);
  // No diagonal vehicle coefficients survive.
  for (const auto& [col, v] : cut.row.coeffs) {
    (void)v;
    if (col >= master.num_x()) {
      int rel = col - master.num_x();
      CHECK(rel % master.nh != (rel / master.nh) % master.nh);
    }
  }

  LpInfeasible doubled = *cert;
  for (double& v : doubled.farkas) v *= 2.0;
  FeasibilityCut cut2 = extract_general_cut(master, sub, doubled, xbar, ybar, 0);
  CHECK(cut2.trigger_violation == doctest::Approx(2.0 * cut.trigger_violation));
}

TEST_CASE("general solve dominates complete solve on t3") {
  Instance inst = t3();
  SolveResult complete = solve_instance(inst, {});
  REQUIRE(complete.status == SolveStatus::Optimal);
  SolveResult general = solve_general(inst, {});
  REQUIRE(general.status == SolveStatus::Optimal);
  CHECK(general.objective <= complete.objective + 1e-6);

  // Single-hub optimum: no inter-hub flow, both modes coincide.
  CHECK(general.objective == doctest::Approx(1750));
  CHECK(general.incumbent->assignment.open_hubs == std::vector<int>{1});
}

TEST_CASE("general routing oracle agrees with the solver on tiny instances") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 4; ++trial) {
    int n = 4 + trial % 3;
    Instance inst = testsupport::random_instance(gen, n, CapacityMode::Uncapacitated,
                                                 testsupport::preset(1));
    // Restricted candidate sets keep the exhaustive routing oracle cheap;
    // totals small enough that three vehicles per arc always suffice.
    inst.hubs = trial % 2 ? std::vector<int>{0, 1, 2, 3}
                          : std::vector<int>{0, 1, 2};
    while (inst.hubs.back() >= n) inst.hubs.pop_back();
    inst.fixed_cost.resize(inst.hubs.size());
    inst.hub_capacity.assign(inst.hubs.size(), kUnbounded);
    double total = inst.total_flow();
    double cap = 2.5 * inst.vehicle.Q;
    if (total > cap) {
      for (auto& w : inst.flow.data()) w = std::floor(w * cap / total);
    }
    inst.network = NetworkMode::General;
    inst.finalize();

    SolveResult res = solve_general(inst, {});
    REQUIRE(res.status == SolveStatus::Optimal);
    Solution oracle = general_routing_oracle(inst);
    CHECK(res.objective == doctest::Approx(oracle.TC).epsilon(1e-6));

    Instance complete_inst = inst;
    complete_inst.network = NetworkMode::Complete;
    SolveResult complete = solve_instance(complete_inst, {});
    CHECK(res.objective <= complete.objective + 1e-6);
  }
}

TEST_CASE("an intermediate hub can carry transit flow in general mode") {
  Instance inst = corridor();
  SolveResult complete = solve_instance(inst, {});
  REQUIRE(complete.status == SolveStatus::Optimal);
  SolveResult general = solve_general(inst, {});
  REQUIRE(general.status == SolveStatus::Optimal);
  CHECK(general.objective <= complete.objective + 1e-6);
  Solution oracle = general_routing_oracle(inst);
  CHECK(general.objective == doctest::Approx(oracle.TC).epsilon(1e-6));
}
