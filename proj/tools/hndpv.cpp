// Command-line front end: solve deterministic/stochastic instances, run the
// enumeration oracles, import AP raw data, compare against the classical
// constant-discount baseline, and validate emitted reports.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "hndpv/bnc.hpp"
#include "hndpv/general.hpp"
#include "hndpv/hlp.hpp"
#include "hndpv/report.hpp"

using namespace hndpv;

namespace {

constexpr int kExitOptimal = 0;
constexpr int kExitFailure = 1;
constexpr int kExitTimeLimitFeasible = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInputError = 4;
constexpr int kExitTimeLimitNoIncumbent = 5;

int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return kExitOptimal;
    case SolveStatus::TimeLimitFeasible:
      return kExitTimeLimitFeasible;
    case SolveStatus::Infeasible:
      return kExitInfeasible;
    case SolveStatus::TimeLimitNoIncumbent:
      return kExitTimeLimitNoIncumbent;
  }
  return kExitFailure;
}

VehicleConfig parse_vehicle(const std::string& spec) {
  if (auto preset = vehicle_preset(spec)) return *preset;
  std::string body = spec;
  if (body.rfind("custom", 0) == 0) {
    body = body.substr(6);
    if (!body.empty() && (body[0] == ':' || body[0] == ',')) body = body.substr(1);
  }
  std::vector<double> vals;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      vals.push_back(std::stod(tok));
    } catch (...) {
      throw ParseError("vehicle spec: bad number '" + tok + "'");
    }
  }
  if (vals.size() != 6)
    throw ParseError("vehicle spec must be L1..L4 or Q,q,B,b,G,g");
  return {vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]};
}

CapacityMode parse_capacity(const std::string& s) {
  if (s == "tight" || s == "T") return CapacityMode::Tight;
  if (s == "loose" || s == "L") return CapacityMode::Loose;
  if (s == "uncap" || s == "U") return CapacityMode::Uncapacitated;
  throw ParseError("capacity must be tight|loose|uncap");
}

bool looks_like_json(const std::string& path) {
  std::ifstream in(path);
  char c;
  while (in.get(c)) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{';
  }
  return false;
}

struct CommonFlags {
  std::string capacity;
  std::string vehicle;
  std::string cuts = "multi";
  std::string valid_ineq = "on";
  std::string network;
  int p_hubs = -1;
  double time_limit = 3600.0;
  double gap = 1e-6;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string report_path;
  std::string trace_path;
  std::string cut_audit_path;
  long node_limit = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_model_flags) {
  if (with_model_flags) {
    cmd->add_option("--capacity", f.capacity,
                    "capacity column for AP raw input: tight|loose|uncap");
    cmd->add_option("--vehicle", f.vehicle,
                    "vehicle config: L1|L2|L3|L4 or Q,q,B,b,G,g");
    cmd->add_option("--network", f.network, "complete|general (overrides instance)");
    cmd->add_option("--p", f.p_hubs, "exact number of hubs to open");
    cmd->add_option("--cuts", f.cuts, "feasibility cut mode: multi|single");
    cmd->add_option("--valid-ineq", f.valid_ineq, "fleet-size inequalities: on|off");
    cmd->add_option("--time-limit", f.time_limit, "wall-clock limit in seconds");
    cmd->add_option("--gap", f.gap, "relative optimality gap tolerance");
    cmd->add_option("--trace", f.trace_path, "convergence trace CSV path");
    cmd->add_option("--cut-audit", f.cut_audit_path, "cut pool audit dump path");
    cmd->add_option("--node-limit", f.node_limit, "branch-and-bound node ceiling");
  }
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  cmd->add_option("--report", f.report_path, "write the run report to this path");
}

int resolved_threads(int flag) {
  if (flag > 0) return flag;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

Instance load_any_instance(const std::string& path, const CommonFlags& f) {
  Instance inst;
  if (looks_like_json(path)) {
    if (!f.capacity.empty())
      throw ParseError("--capacity applies only to AP raw input");
    inst = load_instance(path);
    if (!f.vehicle.empty()) {
      inst.vehicle = parse_vehicle(f.vehicle);
      inst.finalize();
    }
  } else {
    if (f.capacity.empty())
      throw ParseError("AP raw input requires --capacity tight|loose|uncap");
    VehicleConfig veh =
        f.vehicle.empty() ? *vehicle_preset("L1") : parse_vehicle(f.vehicle);
    inst = import_ap(path, parse_capacity(f.capacity), veh);
  }
  if (f.p_hubs >= 0) {
    inst.p_hubs = f.p_hubs;
    inst.finalize();
  }
  if (!f.network.empty()) {
    if (f.network == "complete")
      inst.network = NetworkMode::Complete;
    else if (f.network == "general")
      inst.network = NetworkMode::General;
    else
      throw ParseError("network must be complete|general");
  }
  for (const auto& w : instance_warnings(inst))
    std::cerr << "warning: " << w << "\n";
  return inst;
}

SolverOptions solver_options(const CommonFlags& f) {
  SolverOptions opt;
  opt.time_limit = f.time_limit;
  opt.rel_gap_tolerance = f.gap;
  if (f.cuts == "multi")
    opt.cut_mode = CutMode::MultiCut;
  else if (f.cuts == "single")
    opt.cut_mode = CutMode::WorstOnly;
  else
    throw ParseError("cuts must be multi|single");
  if (f.valid_ineq == "on")
    opt.valid_inequalities = true;
  else if (f.valid_ineq == "off")
    opt.valid_inequalities = false;
  else
    throw ParseError("valid-ineq must be on|off");
  opt.seed = f.seed;
  opt.threads = resolved_threads(f.threads);
  opt.node_limit = f.node_limit;
  opt.trace_path = f.trace_path;
  return opt;
}

void print_summary(const Instance& inst, const SolveResult& res) {
  std::cout << "instance " << inst.label() << " (" << inst.name << ")\n";
  std::cout << "status " << to_string(res.status) << "\n";
  if (res.has_incumbent()) {
    std::cout << "objective " << res.objective << "\n";
    std::cout << "lower_bound " << res.lower_bound << " gap% " << res.gap_percent
              << "\n";
    const Assignment& a = res.incumbent ? res.incumbent->assignment
                                        : res.stochastic->assignment;
    std::cout << "hubs";
    for (int h : a.open_hubs) std::cout << " " << h;
    std::cout << "\n";
  }
  std::cout << "nodes " << res.stats.bnodes << " cuts " << res.stats.cuts
            << " calls " << res.stats.subproblem_calls << " cpu_s "
            << res.stats.cpu_total_s << " cut_cpu_s " << res.stats.cpu_cuts_s
            << "\n";
}

int finish_solve(const Instance& inst, const CommonFlags& flags,
                 const SolverOptions& opt, MasterModel& master,
                 const SolveResult& res) {
  print_summary(inst, res);
  if (!flags.cut_audit_path.empty()) {
    std::ofstream audit(flags.cut_audit_path);
    dump_cut_pool(master, audit);
  }
  if (!flags.report_path.empty()) {
    ReportInputs in;
    in.instance = &inst;
    in.options = &opt;
    in.result = &res;
    in.scenario_probs = master.stochastic ? &master.probs : nullptr;
    write_report(in, flags.report_path);
  }
  return exit_code_for(res.status);
}

int cmd_solve(const std::string& path, const CommonFlags& flags) {
  Instance inst = load_any_instance(path, flags);
  SolverOptions opt = solver_options(flags);
  MasterModel master = build_master(
      inst, {.valid_inequalities = opt.valid_inequalities}, nullptr);
  SolveResult res = solve(master, opt);
  return finish_solve(inst, flags, opt, master, res);
}

int cmd_solve_stochastic(const std::string& path, const CommonFlags& flags,
                         const std::string& scen_path, int gen_m) {
  Instance inst = load_any_instance(path, flags);
  ScenarioSet scen;
  if (!scen_path.empty())
    scen = load_scenarios(scen_path, inst.n);
  else if (gen_m > 0)
    scen = generate_scenarios(inst, gen_m, flags.seed);
  else
    throw ParseError("stochastic solve needs --scenarios <file> or --gen <m>");
  SolverOptions opt = solver_options(flags);
  MasterModel master = build_master(
      inst, {.valid_inequalities = opt.valid_inequalities}, &scen);
  SolveResult res = solve(master, opt);
  return finish_solve(inst, flags, opt, master, res);
}

int cmd_oracle(const std::string& path, const CommonFlags& flags,
               const std::string& scen_path, long budget) {
  Instance inst = load_any_instance(path, flags);
  OracleOptions opt;
  opt.budget = budget;
  opt.threads = resolved_threads(flags.threads);
  if (!scen_path.empty()) {
    ScenarioSet scen = load_scenarios(scen_path, inst.n);
    StochasticSolution sol = brute_force_oracle_stochastic(inst, scen, opt);
    std::cout << "objective " << sol.objective << "\n";
    std::cout << "hubs";
    for (int h : sol.assignment.open_hubs) std::cout << " " << h;
    std::cout << "\n";
    return 0;
  }
  Solution sol = inst.network == NetworkMode::General
                     ? general_routing_oracle(inst, 3, opt)
                     : brute_force_oracle(inst, opt);
  std::cout << "objective " << sol.TC << "\n";
  std::cout << "hubs";
  for (int h : sol.assignment.open_hubs) std::cout << " " << h;
  std::cout << "\n";
  std::cout << "TC " << sol.TC << " LC " << sol.LC << " DC " << sol.DC << " HC "
            << sol.HC << "\n";
  return 0;
}

int cmd_import_ap(const std::string& raw, const std::string& out,
                  const CommonFlags& flags) {
  if (flags.capacity.empty())
    throw ParseError("import-ap requires --capacity tight|loose|uncap");
  VehicleConfig veh =
      flags.vehicle.empty() ? *vehicle_preset("L1") : parse_vehicle(flags.vehicle);
  Instance inst = import_ap(raw, parse_capacity(flags.capacity), veh);
  save_instance(inst, out);
  std::cout << "wrote " << out << " (" << inst.label() << ")\n";
  return 0;
}

int cmd_compare_hlp(const std::string& path, const CommonFlags& flags,
                    const std::string& factors_csv, long budget) {
  Instance inst = load_any_instance(path, flags);
  DiscountFactors factors;
  if (!factors_csv.empty()) {
    std::stringstream ss(factors_csv);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() != 3)
      throw ParseError("--factors expects chi,alpha,delta");
    factors.collection = vals[0];
    factors.transfer = vals[1];
    factors.distribution = vals[2];
  }

  SolverOptions opt = solver_options(flags);
  MasterModel master = build_master(
      inst, {.valid_inequalities = opt.valid_inequalities}, nullptr);
  SolveResult res = solve(master, opt);
  if (!res.incumbent) {
    print_summary(inst, res);
    return exit_code_for(res.status);
  }

  OracleOptions oracle_opt;
  oracle_opt.budget = budget;
  oracle_opt.threads = resolved_threads(flags.threads);
  HlpResult classical = solve_classical_hlp(inst, factors, oracle_opt);
  Solution recosted = post_assign_vehicles(inst, classical.assignment);
  HlpComparison cmp = compare(*res.incumbent, recosted);

  print_summary(inst, res);
  std::cout << "baseline TC " << recosted.TC
            << (classical.heuristic ? " (heuristic)" : " (exact)") << "\n";
  auto show = [](const char* name, const ComparisonEntry& e) {
    std::cout << name << " hndpv " << e.base << " hlp " << e.other;
    if (e.percent) std::cout << " diff% " << *e.percent;
    std::cout << " abs " << e.absolute << "\n";
  };
  show("TC", cmp.tc);
  show("veh1", cmp.veh1);
  show("veh2", cmp.veh2);
  show("vutil", cmp.vutil);

  if (!flags.report_path.empty()) {
    ReportInputs in;
    in.instance = &inst;
    in.options = &opt;
    in.result = &res;
    in.baseline = &cmp;
    in.baseline_discount_objective = classical.discount_objective;
    in.baseline_heuristic = classical.heuristic;
    write_report(in, flags.report_path);
  }
  return exit_code_for(res.status);
}

int cmd_gen_scenarios(const std::string& path, const CommonFlags& flags, int m,
                      const std::string& out) {
  Instance inst = load_any_instance(path, flags);
  ScenarioSet scen = generate_scenarios(inst, m, flags.seed);
  save_scenarios(scen, out);
  std::cout << "wrote " << out << " (" << m << " scenarios)\n";
  return 0;
}

int cmd_validate(const std::string& path) {
  auto problems = validate_report_file(path);
  if (problems.empty()) {
    std::cout << "report ok\n";
    return 0;
  }
  for (const auto& p : problems) std::cerr << "invalid: " << p << "\n";
  return kExitInputError;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver suite for vehicle-based hub network design"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string instance_path, scen_path, out_path, factors_csv;
  int gen_m = 0;
  long budget = 10'000'000;

  auto* solve_cmd = app.add_subcommand("solve", "solve a deterministic instance");
  solve_cmd->add_option("instance", instance_path)->required();
  add_common(solve_cmd, flags, true);

  auto* stoch_cmd =
      app.add_subcommand("solve-stochastic", "solve the scenario expansion");
  stoch_cmd->add_option("instance", instance_path)->required();
  stoch_cmd->add_option("--scenarios", scen_path, "scenario file");
  stoch_cmd->add_option("--gen", gen_m, "generate this many scenarios");
  add_common(stoch_cmd, flags, true);

  auto* oracle_cmd =
      app.add_subcommand("oracle", "exhaustive ground-truth solve (tiny instances)");
  oracle_cmd->add_option("instance", instance_path)->required();
  oracle_cmd->add_option("--scenarios", scen_path, "scenario file");
  oracle_cmd->add_option("--budget", budget, "enumeration budget on |H|^N");
  add_common(oracle_cmd, flags, true);

  auto* import_cmd = app.add_subcommand("import-ap", "convert AP raw data");
  import_cmd->add_option("raw", instance_path)->required();
  import_cmd->add_option("-o,--output", out_path)->required();
  add_common(import_cmd, flags, true);

  auto* cmp_cmd = app.add_subcommand(
      "compare-hlp", "solve and compare against the constant-discount baseline");
  cmp_cmd->add_option("instance", instance_path)->required();
  cmp_cmd->add_option("--factors", factors_csv, "chi,alpha,delta (default 3,0.75,2)");
  cmp_cmd->add_option("--budget", budget, "baseline enumeration budget");
  add_common(cmp_cmd, flags, true);

  auto* gen_cmd = app.add_subcommand("gen-scenarios", "sample a scenario file");
  gen_cmd->add_option("instance", instance_path)->required();
  gen_cmd->add_option("--m", gen_m)->required();
  gen_cmd->add_option("-o,--output", out_path)->required();
  add_common(gen_cmd, flags, true);

  auto* validate_cmd = app.add_subcommand("validate", "re-check a report file");
  validate_cmd->add_option("report", instance_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInputError;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(instance_path, flags);
    if (stoch_cmd->parsed())
      return cmd_solve_stochastic(instance_path, flags, scen_path, gen_m);
    if (oracle_cmd->parsed())
      return cmd_oracle(instance_path, flags, scen_path, budget);
    if (import_cmd->parsed()) return cmd_import_ap(instance_path, out_path, flags);
    if (cmp_cmd->parsed())
      return cmd_compare_hlp(instance_path, flags, factors_csv, budget);
    if (gen_cmd->parsed())
      return cmd_gen_scenarios(instance_path, flags, gen_m, out_path);
    if (validate_cmd->parsed()) return cmd_validate(instance_path);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const BudgetError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
