#include "hndpv/general.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "hndpv/kernels.hpp"

namespace hndpv {

GeneralSubproblem build_gbsp(const Matrix& xbar, const Matrix& ybar,
                             const Instance& inst, const Matrix& flow) {
  GeneralSubproblem sub;
  sub.n = inst.n;
  sub.nh = inst.hub_count();
  const int n = sub.n, nh = sub.nh;
  const double Q = inst.vehicle.Q;

  for (int i = 0; i < n; ++i)
    for (int h = 0; h < nh; ++h)
      for (int k = 0; k < nh; ++k) sub.lp.add_column(0.0, kUnbounded, 0.0);

  // Arc capacities: sum_i z_ihk <= Q * ybar_hk.
  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nh; ++k) {
      LpRow row;
      for (int i = 0; i < n; ++i) row.coeffs.emplace_back(sub.col_z(i, h, k), 1.0);
      row.sense = RowSense::LessEqual;
      row.rhs = Q * ybar(h, k);
      sub.lp.add_row(std::move(row));
    }

  // Conservation at each hub for each origin node's commodity:
  // sum_k z_ihk - sum_k z_ikh = O_i xbar_hi - sum_j w_ij xbar_hj.
  for (int h = 0; h < nh; ++h)
    for (int i = 0; i < n; ++i) {
      LpRow row;
      for (int k = 0; k < nh; ++k) {
        if (k == h) continue; // z_ihh enters both sums and cancels
        row.coeffs.emplace_back(sub.col_z(i, h, k), 1.0);
        row.coeffs.emplace_back(sub.col_z(i, k, h), -1.0);
      }
      double origin_i = kernels::sum(flow.row(i), n);
      double inbound = kernels::dot(flow.row(i), xbar.row(h), n);
      row.sense = RowSense::Equal;
      row.rhs = origin_i * xbar(h, i) - inbound;
      sub.lp.add_row(std::move(row));
    }
  return sub;
}

FeasibilityCut extract_general_cut(const MasterModel& master,
                                   const GeneralSubproblem& sub,
                                   const LpInfeasible& cert, const Matrix& xbar,
                                   const Matrix& ybar, int scenario) {
  const Instance& inst = *master.instance;
  const int n = master.n, nh = master.nh;
  const double Q = inst.vehicle.Q;
  const Matrix& flow = master.flows[scenario];

  Matrix lambda(nh, nh);
  Matrix eta(nh, n);
  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nh; ++k) {
      double v = cert.farkas[sub.capacity_row(h, k)];
      if (h == k || std::abs(v) < 1e-12) v = 0.0;
      if (v > 1e-7)
        throw NumericalError("general cut: capacity multiplier has wrong sign");
      lambda(h, k) = std::min(v, 0.0);
    }
  for (int h = 0; h < nh; ++h)
    for (int i = 0; i < n; ++i) eta(h, i) = cert.farkas[sub.conservation_row(h, i)];

  // Dual-cone replay: lambda_hk + eta_hi - eta_ki <= 0 for every triple.
  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nh; ++k)
      for (int i = 0; i < n; ++i)
        if (lambda(h, k) + eta(h, i) - eta(k, i) > 1e-7)
          throw NumericalError("general cut: Farkas ray fails the dual cone check");

  FeasibilityCut cut;
  cut.source = FeasibilityCut::Source::FarkasRay;
  cut.scenario = scenario;
  cut.row.sense = RowSense::LessEqual;
  cut.row.rhs = 0.0;

  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nh; ++k)
      if (lambda(h, k) != 0.0)
        cut.row.coeffs.emplace_back(master.col_y(scenario, h, k), Q * lambda(h, k));

  // x_hj coefficient: eta_hj * O_j - sum_i eta_hi w_ij.
  for (int h = 0; h < nh; ++h) {
    std::vector<double> coef(n, 0.0);
    for (int j = 0; j < n; ++j) coef[j] = eta(h, j) * master.origin[scenario][j];
    std::vector<double> inbound(n, 0.0);
    kernels::weighted_row_sum(eta.row(h), flow.row(0), n, n, n, inbound.data());
    for (int j = 0; j < n; ++j) {
      double c = coef[j] - inbound[j];
      if (c != 0.0) cut.row.coeffs.emplace_back(master.col_x(h, j), c);
    }
  }

  cut.trigger_violation = cut_activity(master, cut, xbar, ybar);
  cut.capacity_violation = cut.trigger_violation;
  if (!(cut.trigger_violation > 1e-6))
    throw NumericalError("general cut does not separate the trigger point");
  return cut;
}

SolveResult solve_general(const Instance& inst, const SolverOptions& options,
                          const ScenarioSet* scenarios) {
  Instance copy = inst;
  copy.network = NetworkMode::General;
  copy.finalize();
  MasterModel master =
      build_master(copy, {.valid_inequalities = options.valid_inequalities},
                   scenarios);
  return solve(master, options);
}

namespace {

bool routing_feasible(const Instance& inst, const Matrix& xbar,
                      const Matrix& ybar, const Matrix& flow) {
  GeneralSubproblem sub = build_gbsp(xbar, ybar, inst, flow);
  auto out = sub.lp.solve();
  return lp_optimal(out) != nullptr;
}

struct YCandidate {
  double cost;
  std::vector<int> counts; // off-diagonal arcs, row-major order
  int last_bumped;

  bool operator>(const YCandidate& o) const {
    if (cost != o.cost) return cost > o.cost;
    return counts > o.counts;
  }
};

} // namespace

Solution general_routing_oracle(const Instance& inst, long y_bound,
                                const OracleOptions& opt) {
  const int n = inst.n, nh = inst.hub_count();
  const double Q = inst.vehicle.Q;

  std::vector<std::pair<int, int>> arcs;
  std::vector<double> arc_cost;
  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nh; ++k) {
      if (h == k) continue;
      arcs.emplace_back(h, k);
      arc_cost.push_back(interhub_vehicle_cost(inst, inst.hubs[h], inst.hubs[k]));
    }

  double best_tc = std::numeric_limits<double>::infinity();
  std::vector<int> best_assign;
  std::vector<int> best_open;
  Matrix best_y;
  double best_hflow = 0.0;
  double best_lc = 0.0, best_dc = 0.0, best_hc = 0.0;
  long best_veh2 = 0;

  enumerate_assignments(inst, {&inst.flow}, opt.budget, [&](const std::vector<int>& assign, int) {
    std::vector<int> open;
    for (int i = 0; i < n; ++i)
      if (assign[i] == i && inst.hub_index(i) >= 0) open.push_back(i);

    double lc = 0.0, dc = 0.0;
    long veh2 = 0;
    for (int h : open) lc += inst.fixed_cost[inst.hub_index(h)];
    for (int i = 0; i < n; ++i) {
      if (assign[i] == i) continue;
      long count = secondary_vehicle_count(inst.origin_total[i],
                                           inst.dest_total[i], inst.vehicle.q);
      dc += static_cast<double>(count) * access_cost(inst, assign[i], i);
      veh2 += count;
    }
    if (lc + dc >= best_tc) return;

    Matrix xbar(nh, n);
    for (int i = 0; i < n; ++i) xbar(inst.hub_index(assign[i]), i) = 1.0;

    // Cheapest-first search over integer vehicle vectors.
    std::priority_queue<YCandidate, std::vector<YCandidate>, std::greater<>> heap;
    heap.push({0.0, std::vector<int>(arcs.size(), 0), 0});
    long explored = 0;
    while (!heap.empty()) {
      YCandidate cand = heap.top();
      heap.pop();
      if (lc + dc + cand.cost >= best_tc) break;
      if (++explored > 200000)
        throw BudgetError("general routing oracle exceeded its search budget");

      Matrix ybar(nh, nh);
      double hc = 0.0;
      for (std::size_t a = 0; a < arcs.size(); ++a) {
        ybar(arcs[a].first, arcs[a].second) = cand.counts[a];
        hc += arc_cost[a] * cand.counts[a];
      }
      // Diagonal z variables appear in no conservation row, so z_ihh = 0 is
      // always routable and the diagonal ybar value is irrelevant.

      if (routing_feasible(inst, xbar, ybar, inst.flow)) {
        double tc = lc + dc + hc;
        if (tc < best_tc) {
          best_tc = tc;
          best_assign = assign;
          best_open = open;
          best_y = ybar;
          best_lc = lc;
          best_dc = dc;
          best_hc = hc;
          best_veh2 = veh2;
          GeneralSubproblem sub = build_gbsp(xbar, ybar, inst, inst.flow);
          auto out = sub.lp.solve();
          const auto* sol = lp_optimal(out);
          double hflow = 0.0;
          for (int h = 0; h < nh; ++h)
            for (int k = 0; k < nh; ++k) {
              if (h == k) continue;
              for (int i = 0; i < n; ++i) hflow += sol->primal[sub.col_z(i, h, k)];
            }
          best_hflow = hflow;
        }
        break; // first feasible in cost order is optimal for this assignment
      }
      for (std::size_t a = cand.last_bumped; a < arcs.size(); ++a) {
        if (cand.counts[a] >= y_bound) continue;
        YCandidate next = cand;
        ++next.counts[a];
        next.cost += arc_cost[a];
        next.last_bumped = static_cast<int>(a);
        heap.push(std::move(next));
      }
    }
  });

  if (best_assign.empty())
    throw ValidationError("no feasible assignment exists");

  Solution sol;
  sol.assignment.assign = best_assign;
  sol.assignment.open_hubs = best_open;
  sol.y = Matrix(nh, nh);
  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nh; ++k)
      if (h != k) sol.y(h, k) = best_y(h, k);
  sol.LC = best_lc;
  sol.DC = best_dc;
  sol.HC = best_hc;
  sol.TC = best_tc;
  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nh; ++k)
      if (h != k) sol.metrics.veh1 += static_cast<long>(sol.y(h, k));
  sol.metrics.veh2 = best_veh2;
  sol.metrics.hflow = best_hflow;
  if (sol.metrics.veh1 > 0)
    sol.metrics.vutil =
        100.0 * sol.metrics.hflow / (static_cast<double>(sol.metrics.veh1) * Q);
  return sol;
}

} // namespace hndpv
