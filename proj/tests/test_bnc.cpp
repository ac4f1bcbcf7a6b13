#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "hndpv/bnc.hpp"
#include "support.hpp"

using namespace hndpv;
using testsupport::t3;

TEST_CASE("t3 solves to the oracle optimum") {
  Instance inst = t3();
  SolveResult res = solve_instance(inst, {});
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.objective == doctest::Approx(1750));
  CHECK(res.incumbent->assignment.open_hubs == std::vector<int>{1});
  CHECK(res.incumbent->TC == doctest::Approx(1750));
  CHECK(res.gap_percent <= 1e-4);
  CHECK(res.lower_bound <= res.objective + 1e-6);
}

TEST_CASE("t3 with two forced hubs matches the restricted oracle") {
  Instance inst = t3();
  inst.p_hubs = 2;
  inst.finalize();
  SolveResult res = solve_instance(inst, {});
  REQUIRE(res.status == SolveStatus::Optimal);
  Solution oracle = brute_force_oracle(inst);
  CHECK(res.objective == doctest::Approx(oracle.TC).epsilon(1e-9));
  CHECK(res.incumbent->assignment.open_hubs.size() == 2);
  CHECK(res.objective <= 2750 + 1e-9);
}

TEST_CASE("tiny time limit yields a valid bound") {
  std::mt19937_64 gen(7);
  Instance inst = testsupport::random_instance(gen, 6, CapacityMode::Tight,
                                               testsupport::preset(3));
  SolverOptions opt;
  opt.time_limit = 1e-4;
  SolveResult res = solve_instance(inst, opt);
  CHECK((res.status == SolveStatus::TimeLimitFeasible ||
         res.status == SolveStatus::TimeLimitNoIncumbent));
  Solution oracle = brute_force_oracle(inst);
  CHECK(res.lower_bound <= oracle.TC + 1e-6);
}

TEST_CASE("node ceiling is not reached on tiny instances") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 5; ++trial) {
    Instance inst = testsupport::random_instance(
        gen, 5, trial % 2 ? CapacityMode::Loose : CapacityMode::Uncapacitated,
        testsupport::preset(1 + trial % 4));
    SolverOptions opt;
    opt.node_limit = 100000;
    SolveResult res = solve_instance(inst, opt);
    CHECK(res.status == SolveStatus::Optimal);
    CHECK(res.objective ==
          doctest::Approx(brute_force_oracle(inst).TC).epsilon(1e-9));
  }
}

TEST_CASE("cut modes agree on the optimum") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 6; ++trial) {
    Instance inst = testsupport::random_instance(
        gen, 4 + trial % 3,
        trial % 3 == 0 ? CapacityMode::Tight : CapacityMode::Loose,
        testsupport::preset(1 + trial % 4));
    SolverOptions multi;
    multi.cut_mode = CutMode::MultiCut;
    SolverOptions single;
    single.cut_mode = CutMode::WorstOnly;
    SolveResult a = solve_instance(inst, multi);
    SolveResult b = solve_instance(inst, single);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-6));
  }
}

TEST_CASE("valid inequalities do not change the optimum") {
  std::mt19937_64 gen(31);
  Instance inst = testsupport::random_instance(gen, 5, CapacityMode::Loose,
                                               testsupport::preset(4));
  SolverOptions with;
  SolverOptions without;
  without.valid_inequalities = false;
  SolveResult a = solve_instance(inst, with);
  SolveResult b = solve_instance(inst, without);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));

  MasterModel m_with = build_master(inst, {.valid_inequalities = true});
  MasterModel m_without = build_master(inst, {.valid_inequalities = false});
  CHECK(root_relaxation_bound(m_with) >=
        root_relaxation_bound(m_without) - 1e-9);
}

TEST_CASE("solves are deterministic") {
  std::mt19937_64 gen(17);
  Instance inst = testsupport::random_instance(gen, 5, CapacityMode::Tight,
                                               testsupport::preset(2));
  SolveResult a = solve_instance(inst, {});
  SolveResult b = solve_instance(inst, {});
  CHECK(a.objective == b.objective);
  CHECK(a.stats.bnodes == b.stats.bnodes);
  CHECK(a.stats.cuts == b.stats.cuts);
  CHECK(a.stats.subproblem_calls == b.stats.subproblem_calls);
  CHECK(a.incumbent->assignment.assign == b.incumbent->assignment.assign);
}

TEST_CASE("stochastic solve matches the stochastic oracle") {
  Instance inst = t3();
  ScenarioSet scen = generate_scenarios(inst, 3, 42);
  SolveResult res = solve_instance(inst, {}, &scen);
  REQUIRE(res.status == SolveStatus::Optimal);
  StochasticSolution oracle = brute_force_oracle_stochastic(inst, scen);
  CHECK(res.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
  REQUIRE(res.stochastic.has_value());
  CHECK(res.stochastic->per_scenario.size() == 3);
}

TEST_CASE("identical scenarios collapse to the deterministic solve") {
  Instance inst = t3();
  ScenarioSet scen;
  scen.flows = {inst.flow, inst.flow, inst.flow};
  scen.probabilities = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  SolveResult stoch = solve_instance(inst, {}, &scen);
  SolveResult det = solve_instance(inst, {});
  REQUIRE(stoch.status == SolveStatus::Optimal);
  CHECK(stoch.objective == doctest::Approx(det.objective).epsilon(1e-9));
}

TEST_CASE("infeasible p-hub packing is detected") {
  // Two hubs forced open but capacities cannot host the third node's demand
  // anywhere: every assignment is capacity-infeasible even though each node
  // fits somewhere on its own.
  Instance inst = t3();
  inst.p_hubs = 1;
  inst.hub_capacity = {120, 130, 140}; // total demand 270 overwhelms any one
  inst.finalize();
  MasterModel m = build_master(inst, {});
  SolveResult res = solve(m, {});
  CHECK(res.status == SolveStatus::Infeasible);
}

TEST_CASE("trace rows are monotone and meet at the optimum") {
  std::mt19937_64 gen(3);
  Instance inst = testsupport::random_instance(gen, 6, CapacityMode::Tight,
                                               testsupport::preset(3));
  std::string path = "/tmp/hndpv_trace_test.csv";
  SolverOptions opt;
  opt.trace_path = path;
  SolveResult res = solve_instance(inst, opt);
  REQUIRE(res.status == SolveStatus::Optimal);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "time_s,lower_bound,upper_bound,cuts,nodes");
  double prev_time = -1.0, prev_lb = -1e300;
  double prev_ub = std::numeric_limits<double>::infinity();
  double last_lb = 0, last_ub = 0;
  std::string line;
  int rows = 0;
  bool first_ub_inf = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string t, lb, ub, cuts, nodes;
    std::getline(ls, t, ',');
    std::getline(ls, lb, ',');
    std::getline(ls, ub, ',');
    std::getline(ls, cuts, ',');
    std::getline(ls, nodes, ',');
    double tv = std::stod(t);
    double lbv = std::stod(lb);
    double ubv = ub == "inf" ? std::numeric_limits<double>::infinity() : std::stod(ub);
    if (rows == 0) first_ub_inf = ub == "inf";
    CHECK(tv >= prev_time);
    CHECK(lbv >= prev_lb - 1e-9);
    CHECK(ubv <= prev_ub + 1e-9);
    prev_time = tv;
    prev_lb = lbv;
    prev_ub = ubv;
    last_lb = lbv;
    last_ub = ubv;
    ++rows;
  }
  CHECK(rows >= 2);
  CHECK(first_ub_inf); // no incumbent yet at the first bound improvement
  CHECK(last_lb == doctest::Approx(last_ub).epsilon(1e-6));
  std::remove(path.c_str());
}

TEST_CASE("random instances match the oracle across modes") {
  std::mt19937_64 gen(1234);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 4 + trial % 4;
    CapacityMode mode = trial % 3 == 0   ? CapacityMode::Tight
                        : trial % 3 == 1 ? CapacityMode::Loose
                                         : CapacityMode::Uncapacitated;
    Instance inst = testsupport::random_instance(gen, n, mode,
                                                 testsupport::preset(1 + trial % 4));
    SolveResult res = solve_instance(inst, {});
    REQUIRE(res.status == SolveStatus::Optimal);
    Solution oracle = brute_force_oracle(inst);
    CHECK(res.objective ==
          doctest::Approx(oracle.TC).epsilon(1e-6).scale(std::abs(oracle.TC)));
  }
}
