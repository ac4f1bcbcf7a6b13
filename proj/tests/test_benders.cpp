#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "hndpv/benders.hpp"
#include "hndpv/bnc.hpp"
#include "support.hpp"

using namespace hndpv;
using testsupport::t3;

namespace {

Matrix xbar_from(const Instance& inst, const std::vector<int>& assign) {
  Matrix x(inst.hub_count(), inst.n);
  for (int i = 0; i < inst.n; ++i) x(inst.hub_index(assign[i]), i) = 1.0;
  return x;
}

std::map<int, double> coeff_map(const LpRow& row) {
  std::map<int, double> m;
  for (const auto& [col, v] : row.coeffs) m[col] += v;
  return m;
}

} // namespace

TEST_CASE("t3 master has the expected variable and row structure") {
  Instance inst = t3();
  MasterModel m = build_master(inst, {.valid_inequalities = false});
  CHECK(m.num_x() == 9);
  CHECK(m.lp.num_columns() == 18); // 9 x + 9 y
  CHECK(m.assignment_rows == 3);
  CHECK(m.linking_rows == 9);
  CHECK(m.capacity_rows == 0);
  for (int h = 0; h < 3; ++h)
    for (int k = 0; k < 3; ++k) {
      double c = m.lp.objective_coeff(m.col_y(0, h, k));
      if (h == k)
        CHECK(c == 0.0);
      else
        CHECK(c > 0.0);
    }
  // Finite vehicle bound: total flow 270, Q = 100.
  CHECK(m.y_upper == 3.0);
}

TEST_CASE("p-hub master keeps the oracle optimum feasible") {
  Instance inst = t3();
  inst.p_hubs = 1;
  inst.finalize();
  MasterModel m = build_master(inst, {});
  SolveResult res = solve(m, {});
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.incumbent->assignment.open_hubs == std::vector<int>{1});
  CHECK(res.objective == doctest::Approx(1750));
}

TEST_CASE("stochastic master duplicates the vehicle block per scenario") {
  Instance inst = t3();
  ScenarioSet scen;
  scen.flows = {inst.flow, inst.flow};
  scen.probabilities = {0.5, 0.5};
  MasterModel m = build_master(inst, {.valid_inequalities = false}, &scen);
  CHECK(m.lp.num_columns() == 9 + 18);
  CHECK(m.scenario_count() == 2);
}

TEST_CASE("infeasible-by-construction capacity is rejected") {
  Instance inst = t3();
  inst.hub_capacity = {50, 50, 50}; // node 0 has O = 110
  inst.finalize();
  CHECK_THROWS_AS(build_master(inst, {}), ValidationError);
}

TEST_CASE("check_feasibility reports the violated pairs with amounts") {
  Instance inst = t3();
  Matrix xbar = xbar_from(inst, {0, 1, 1});
  Matrix ybar(3, 3);

  auto violations = check_feasibility(xbar, ybar, inst.flow, inst.vehicle.Q);
  std::map<std::pair<int, int>, double> by_pair;
  for (const auto& v : violations) by_pair[{v.hub_from, v.hub_to}] = v.amount;
  CHECK(by_pair.at({0, 1}) == doctest::Approx(110));
  CHECK(by_pair.at({1, 0}) == doctest::Approx(50));
  CHECK(by_pair.at({1, 1}) == doctest::Approx(110)); // intra-hub diagonal
  CHECK(by_pair.count({0, 0}) == 0);                 // F_00 = 0

  ybar(0, 1) = 2;
  ybar(1, 0) = 1;
  ybar(1, 1) = 2;
  CHECK(check_feasibility(xbar, ybar, inst.flow, inst.vehicle.Q).empty());

  Matrix frac(3, 3, 1.0 / 3.0);
  Matrix big(3, 3, 10.0);
  CHECK(check_feasibility(frac, big, inst.flow, inst.vehicle.Q).empty());
}

TEST_CASE("select_violations modes") {
  std::vector<Violation> v = {{0, 1, 110.0}, {1, 0, 50.0}};
  CHECK(select_violations(v, CutMode::MultiCut).size() == 2);
  auto worst = select_violations(v, CutMode::WorstOnly);
  REQUIRE(worst.size() == 1);
  CHECK(worst[0].hub_from == 0);
  CHECK(worst[0].hub_to == 1);

  std::vector<Violation> tied = {{1, 0, 50.0}, {0, 1, 50.0}};
  auto pick = select_violations(tied, CutMode::WorstOnly);
  CHECK(pick[0].hub_from == 0); // lexicographic tie-break
  CHECK(pick[0].hub_to == 1);
}

TEST_CASE("make_cut materializes the closed-form inequality") {
  Instance inst = t3();
  MasterModel m = build_master(inst, {.valid_inequalities = false});
  Matrix xbar = xbar_from(inst, {0, 1, 1});
  Matrix ybar(3, 3);

  FeasibilityCut cut = make_cut(m, 0, 1, xbar, ybar, 0);
  CHECK(cut.capacity_violation == doctest::Approx(110));
  CHECK(cut.trigger_violation == doctest::Approx(110));

  // -100 y_01 - 110 (x_10 + x_20) + 60 x_11 + 50 x_12 <= 0
  auto coeffs = coeff_map(cut.row);
  CHECK(coeffs.at(m.col_y(0, 0, 1)) == doctest::Approx(-100));
  CHECK(coeffs.at(m.col_x(1, 0)) == doctest::Approx(-110));
  CHECK(coeffs.at(m.col_x(2, 0)) == doctest::Approx(-110));
  CHECK(coeffs.at(m.col_x(1, 1)) == doctest::Approx(60));
  CHECK(coeffs.at(m.col_x(1, 2)) == doctest::Approx(50));
  CHECK(cut.row.rhs == 0.0);
  CHECK(coeffs.size() == 5);

  // At the oracle optimum (everything on hub 1) the cut holds for any y:
  // the -110 x_10 term and the +60 x_11 + 50 x_12 terms cancel, leaving
  // -100 y_01 <= 0.
  Matrix xopt = xbar_from(inst, {1, 1, 1});
  Matrix yzero(3, 3);
  CHECK(cut_activity(m, cut, xopt, yzero) == doctest::Approx(0.0));
  Matrix yone(3, 3);
  yone(0, 1) = 1;
  CHECK(cut_activity(m, cut, xopt, yone) == doctest::Approx(-100.0));

  Matrix ysat(3, 3);
  ysat(0, 1) = 2;
  CHECK_THROWS_AS(make_cut(m, 0, 1, xbar, ysat, 0), ValidationError);
}

TEST_CASE("verify_ray validates the closed-form ray on the t3 trigger") {
  Instance inst = t3();
  MasterModel m = build_master(inst, {.valid_inequalities = false});
  Matrix xbar = xbar_from(inst, {0, 1, 1});
  Matrix ybar(3, 3);
  FeasibilityCut cut = make_cut(m, 0, 1, xbar, ybar, 0);

  RayDiagnostic diag = verify_ray(cut, xbar, ybar, inst.flow, inst.vehicle.Q);
  CHECK(diag.dual_feasible);
  CHECK(diag.objective_matches);
  CHECK(diag.separating);
  CHECK(diag.objective == doctest::Approx(110));

  // Corrupting the snapshot flips a mu sign and breaks dual feasibility.
  FeasibilityCut corrupted = cut;
  corrupted.xbar_row[0] = -1.0;
  RayDiagnostic bad = verify_ray(corrupted, xbar, ybar, inst.flow, inst.vehicle.Q);
  CHECK(!bad.dual_feasible);
  CHECK(bad.violated_triple.has_value());

  // Enough vehicles: the ray no longer separates.
  Matrix ysat(3, 3);
  ysat(0, 1) = 2;
  RayDiagnostic sat = verify_ray(cut, xbar, ysat, inst.flow, inst.vehicle.Q);
  CHECK(!sat.separating);
  CHECK(sat.objective <= 0.0);
}

TEST_CASE("valid inequalities never weaken the root relaxation") {
  Instance inst = t3();
  MasterModel plain = build_master(inst, {.valid_inequalities = false});
  MasterModel strong = build_master(inst, {.valid_inequalities = true});
  CHECK(strong.valid_inequality_rows > 0);

  double root_plain = root_relaxation_bound(plain);
  double root_strong = root_relaxation_bound(strong);
  CHECK(root_strong >= root_plain - 1e-9);

  // Hub 1 fully loaded: destination demand 270 over Q = 100 forces a
  // right-hand fleet of 2.7, coverable by the zero-cost diagonal y_11 = 3.
  InterHubFlows flows =
      interhub_flows(inst, Assignment{{1, 1, 1}, {1}}, inst.flow);
  CHECK(forced_vehicle_count(flows.F(1, 1), inst.vehicle.Q) == 3);
}

TEST_CASE("eq17 rows are omitted for zero hub-to-hub flow") {
  Instance inst = t3();
  inst.flow(0, 1) = 0.0;
  inst.finalize();
  MasterModel with17 = build_master(inst, {.valid_inequalities = true});
  // 6 fleet-bound rows plus one pair row per ordered pair with positive
  // flow: 5 of the 6 remain after zeroing w_01.
  CHECK(with17.valid_inequality_rows == 6 + 5);
}

TEST_CASE("cut pool stays sound across a full solve") {
  std::mt19937_64 gen(99);
  Instance inst = testsupport::random_instance(gen, 5, CapacityMode::Tight,
                                               testsupport::preset(4));
  MasterModel m = build_master(inst, {});
  SolveResult res = solve(m, {});
  REQUIRE(res.status == SolveStatus::Optimal);

  Solution opt = brute_force_oracle(inst);
  CHECK(res.objective == doctest::Approx(opt.TC).epsilon(1e-9));

  Matrix xopt = xbar_from(inst, opt.assignment.assign);
  InterHubFlows flows = interhub_flows(inst, opt.assignment, inst.flow);
  Matrix yopt = opt.y;
  for (int h = 0; h < inst.hub_count(); ++h)
    yopt(h, h) = static_cast<double>(
        forced_vehicle_count(flows.F(h, h), inst.vehicle.Q));
  for (const auto& cut : m.pool) {
    CHECK(cut_activity(m, cut, xopt, yopt) <= 1e-6);
    CHECK(cut.trigger_violation > 1e-6);
  }

  std::ostringstream os;
  dump_cut_pool(m, os);
  const std::string audit = os.str();
  CHECK(std::count(audit.begin(), audit.end(), '\n') ==
        static_cast<long>(m.pool.size()));
}

TEST_CASE("cut coefficients scale uniformly") {
  Instance inst = t3();
  MasterModel m = build_master(inst, {.valid_inequalities = false});
  Matrix xbar = xbar_from(inst, {0, 1, 1});
  Matrix ybar(3, 3);
  FeasibilityCut cut = make_cut(m, 0, 1, xbar, ybar, 0);
  FeasibilityCut scaled = cut;
  for (auto& [col, v] : scaled.row.coeffs) v *= 2.0;

  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix x(3, 3), y(3, 3);
    for (auto& v : x.data()) v = rng::uniform01(gen);
    for (auto& v : y.data()) v = rng::uniform(gen, 0, 3);
    double a = cut_activity(m, cut, x, y);
    double b = cut_activity(m, scaled, x, y);
    CHECK(b == doctest::Approx(2.0 * a).epsilon(1e-12));
    CHECK((a > 1e-9) == (b > 1e-9));
  }
}
