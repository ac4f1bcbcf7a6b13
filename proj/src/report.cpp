#include "hndpv/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hndpv {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json matrix_json(const Matrix& m) {
  auto arr = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    auto row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    arr.push_back(std::move(row));
  }
  return arr;
}

ordered_json metrics_json(const SolutionMetrics& m) {
  ordered_json j;
  j["veh1"] = m.veh1;
  j["veh2"] = m.veh2;
  if (m.vutil)
    j["vutil"] = *m.vutil;
  else
    j["vutil"] = nullptr;
  j["hflow"] = m.hflow;
  return j;
}

ordered_json solution_costs_json(double tc, double lc, double dc, double hc) {
  ordered_json j;
  j["TC"] = tc;
  j["LC"] = lc;
  j["DC"] = dc;
  j["HC"] = hc;
  return j;
}

ordered_json entry_json(const ComparisonEntry& e) {
  ordered_json j;
  j["hndpv"] = e.base;
  j["hlp"] = e.other;
  if (e.percent)
    j["percent"] = *e.percent;
  else
    j["percent"] = nullptr;
  j["absolute"] = e.absolute;
  return j;
}

} // namespace

std::string make_report(const ReportInputs& in) {
  const Instance& inst = *in.instance;
  const SolveResult& res = *in.result;
  const SolverOptions& opt = *in.options;

  ordered_json j;
  j["schema_version"] = 1;
  {
    ordered_json ji;
    ji["name"] = inst.name;
    ji["label"] = inst.label();
    ji["n"] = inst.n;
    ji["hubs"] = inst.hub_count();
    if (inst.capacity_mode)
      ji["capacity_mode"] = std::string(1, capacity_mode_letter(*inst.capacity_mode));
    ji["vehicle_label"] = vehicle_label(inst.vehicle);
    ji["vehicle"] = {{"Q", inst.vehicle.Q}, {"q", inst.vehicle.q},
                     {"B", inst.vehicle.B}, {"b", inst.vehicle.b},
                     {"G", inst.vehicle.G}, {"g", inst.vehicle.g}};
    ji["network"] = inst.network == NetworkMode::General ? "general" : "complete";
    if (inst.p_hubs) ji["p_hubs"] = *inst.p_hubs;
    j["instance"] = std::move(ji);
  }
  {
    ordered_json jo;
    jo["cuts"] = opt.cut_mode == CutMode::MultiCut ? "multi" : "single";
    jo["valid_inequalities"] = opt.valid_inequalities;
    jo["time_limit_s"] = opt.time_limit;
    jo["rel_gap_tolerance"] = opt.rel_gap_tolerance;
    jo["root_fractional_rounds"] = opt.root_fractional_rounds;
    jo["seed"] = opt.seed;
    jo["threads"] = opt.threads;
    j["options"] = std::move(jo);
  }
  j["status"] = to_string(res.status);
  if (res.has_incumbent()) {
    j["objective"] = res.objective;
    j["lower_bound"] = res.lower_bound;
    j["gap_percent"] = res.gap_percent;
  } else {
    j["objective"] = nullptr;
    j["lower_bound"] =
        std::isfinite(res.lower_bound) ? ordered_json(res.lower_bound) : ordered_json(nullptr);
    j["gap_percent"] = nullptr;
  }

  if (res.incumbent) {
    const Solution& sol = *res.incumbent;
    j["costs"] = solution_costs_json(sol.TC, sol.LC, sol.DC, sol.HC);
    j["hub_nodes"] = sol.assignment.open_hubs;
    j["assignment"] = sol.assignment.assign;
    j["y"] = matrix_json(sol.y);
    j["metrics"] = metrics_json(sol.metrics);
  } else if (res.stochastic) {
    const StochasticSolution& st = *res.stochastic;
    double exp_dc = 0.0, exp_hc = 0.0, exp_hflow = 0.0;
    double exp_veh1 = 0.0, exp_veh2 = 0.0;
    auto scen_arr = ordered_json::array();
    for (std::size_t s = 0; s < st.per_scenario.size(); ++s) {
      const Solution& sol = st.per_scenario[s];
      const double p = (*in.scenario_probs)[s];
      exp_dc += p * sol.DC;
      exp_hc += p * sol.HC;
      exp_hflow += p * sol.metrics.hflow;
      exp_veh1 += p * static_cast<double>(sol.metrics.veh1);
      exp_veh2 += p * static_cast<double>(sol.metrics.veh2);
      ordered_json js;
      js["probability"] = p;
      js["DC"] = sol.DC;
      js["HC"] = sol.HC;
      js["y"] = matrix_json(sol.y);
      js["metrics"] = metrics_json(sol.metrics);
      scen_arr.push_back(std::move(js));
    }
    j["costs"] = solution_costs_json(st.objective, st.LC, exp_dc, exp_hc);
    j["hub_nodes"] = st.assignment.open_hubs;
    j["assignment"] = st.assignment.assign;
    j["scenarios"] = std::move(scen_arr);
    ordered_json jm;
    jm["veh1"] = exp_veh1;
    jm["veh2"] = exp_veh2;
    if (exp_veh1 > 0)
      jm["vutil"] = 100.0 * exp_hflow / (exp_veh1 * inst.vehicle.Q);
    else
      jm["vutil"] = nullptr;
    jm["hflow"] = exp_hflow;
    j["metrics"] = std::move(jm);
  }

  {
    ordered_json js;
    js["bnodes"] = res.stats.bnodes;
    js["cuts"] = res.stats.cuts;
    js["calls"] = res.stats.subproblem_calls;
    js["cpu_total_s"] = res.stats.cpu_total_s;
    js["cpu_cuts_s"] = res.stats.cpu_cuts_s;
    j["stats"] = std::move(js);
  }

  if (in.baseline) {
    ordered_json jb;
    jb["heuristic"] = in.baseline_heuristic;
    if (in.baseline_discount_objective)
      jb["discount_objective"] = *in.baseline_discount_objective;
    jb["TC"] = entry_json(in.baseline->tc);
    jb["veh1"] = entry_json(in.baseline->veh1);
    jb["veh2"] = entry_json(in.baseline->veh2);
    jb["vutil"] = entry_json(in.baseline->vutil);
    j["baseline"] = std::move(jb);
  }
  return j.dump(2) + "\n";
}

void write_report(const ReportInputs& in, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write report: " + path);
  out << make_report(in);
}

namespace {

void check_metrics_block(const ordered_json& metrics, double q_capacity,
                         const std::string& where,
                         std::vector<std::string>& problems) {
  if (!metrics.contains("veh1") || !metrics.contains("hflow") ||
      !metrics.contains("vutil")) {
    problems.push_back(where + ": metrics block incomplete");
    return;
  }
  const double veh1 = metrics["veh1"].get<double>();
  if (veh1 >= 1.0) {
    if (metrics["vutil"].is_null()) {
      problems.push_back(where + ": vutil missing despite veh1 >= 1");
      return;
    }
    const double expected =
        100.0 * metrics["hflow"].get<double>() / (veh1 * q_capacity);
    if (metrics["vutil"].get<double>() != expected)
      problems.push_back(where + ": vutil does not equal 100*hflow/(veh1*Q)");
  } else if (!metrics["vutil"].is_null()) {
    problems.push_back(where + ": vutil present with veh1 = 0");
  }
}

} // namespace

std::vector<std::string> validate_report_text(const std::string& text) {
  std::vector<std::string> problems;
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    return {std::string("invalid JSON: ") + e.what()};
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
    problems.push_back("unknown schema_version");
  if (!j.contains("instance") || !j["instance"].contains("vehicle"))
    return {"instance/vehicle block missing"};
  const double Q = j["instance"]["vehicle"]["Q"].get<double>();

  if (j.contains("costs")) {
    const auto& c = j["costs"];
    const double tc = c["TC"].get<double>();
    const double sum =
        c["LC"].get<double>() + c["DC"].get<double>() + c["HC"].get<double>();
    if (std::abs(tc - sum) > 1e-9 * std::max(1.0, std::abs(tc)))
      problems.push_back("TC does not equal LC + DC + HC");
  }
  if (j.contains("metrics")) check_metrics_block(j["metrics"], Q, "metrics", problems);
  if (j.contains("scenarios")) {
    double expected_tc = j["costs"]["LC"].get<double>();
    int s = 0;
    for (const auto& js : j["scenarios"]) {
      const double p = js["probability"].get<double>();
      expected_tc += p * (js["DC"].get<double>() + js["HC"].get<double>());
      check_metrics_block(js["metrics"], Q, "scenario " + std::to_string(s), problems);
      ++s;
    }
    const double tc = j["costs"]["TC"].get<double>();
    if (std::abs(tc - expected_tc) > 1e-9 * std::max(1.0, std::abs(tc)))
      problems.push_back("stochastic TC does not equal LC + sum p_s (DC_s + HC_s)");
  }
  return problems;
}

std::vector<std::string> validate_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {"cannot open report: " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return validate_report_text(buf.str());
}

} // namespace hndpv
