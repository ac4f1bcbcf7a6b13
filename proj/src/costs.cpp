#include "hndpv/costs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

#include "hndpv/kernels.hpp"

namespace hndpv {

long guarded_ceil(double v) {
  long c = static_cast<long>(std::ceil(v - 1e-9));
  return c < 0 ? 0 : c;
}

long secondary_vehicle_count(double origin, double dest, double q) {
  return std::max(guarded_ceil(origin / q), guarded_ceil(dest / q));
}

double access_cost(const Instance& inst, int hub, int node) {
  const auto& v = inst.vehicle;
  return v.g + 2.0 * v.b * inst.distance(hub, node);
}

double interhub_vehicle_cost(const Instance& inst, int h, int k) {
  const auto& v = inst.vehicle;
  return v.G + v.B * inst.distance(h, k);
}

long forced_vehicle_count(double flow, double capacity) {
  return guarded_ceil(flow / capacity);
}

Assignment Assignment::from_map(std::vector<int> assign) {
  Assignment a;
  a.open_hubs = assign;
  std::sort(a.open_hubs.begin(), a.open_hubs.end());
  a.open_hubs.erase(std::unique(a.open_hubs.begin(), a.open_hubs.end()),
                    a.open_hubs.end());
  a.assign = std::move(assign);
  return a;
}

bool Assignment::is_open(int hub) const {
  return std::binary_search(open_hubs.begin(), open_hubs.end(), hub);
}

void Assignment::validate(const Instance& inst, const Matrix& flow) const {
  if (static_cast<int>(assign.size()) != inst.n)
    throw ValidationError("assignment must cover every node");
  for (int h : open_hubs) {
    if (inst.hub_index(h) < 0)
      throw ValidationError("open hub is not a candidate");
    if (assign[h] != h)
      throw ValidationError("an open hub must be assigned to itself");
  }
  for (int i = 0; i < inst.n; ++i) {
    if (!is_open(assign[i]))
      throw ValidationError("node assigned to a closed hub");
  }
  if (inst.p_hubs && static_cast<int>(open_hubs.size()) != *inst.p_hubs)
    throw ValidationError("open hub count differs from p_hubs");

  std::vector<double> origin(inst.n, 0.0);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) origin[i] += flow(i, j);
  for (int h : open_hubs) {
    double cap = inst.hub_capacity[inst.hub_index(h)];
    if (cap == kUnbounded) continue;
    double load = 0.0;
    for (int i = 0; i < inst.n; ++i)
      if (assign[i] == h) load += origin[i];
    if (load > cap + 1e-9)
      throw ValidationError("hub capacity exceeded");
  }
}

InterHubFlows interhub_flows(const Instance& inst, const Assignment& a,
                             const Matrix& flow) {
  const int nh = inst.hub_count();
  InterHubFlows out;
  out.F = Matrix(nh, nh);
  std::vector<int> pos(inst.n);
  for (int i = 0; i < inst.n; ++i) pos[i] = inst.hub_index(a.assign[i]);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) out.F(pos[i], pos[j]) += flow(i, j);
  return out;
}

Matrix interhub_flows_fractional(const Matrix& xbar, const Matrix& flow) {
  const int nh = xbar.rows();
  const int n = xbar.cols();
  // R(i,k) = sum_j w_ij * xbar(k,j)
  Matrix r(n, nh);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < nh; ++k)
      r(i, k) = kernels::dot(flow.row(i), xbar.row(k), n);
  Matrix f(nh, nh);
  for (int h = 0; h < nh; ++h)
    kernels::weighted_row_sum(xbar.row(h), r.row(0), n, nh, nh, f.row(h));
  return f;
}

double flow_decomposition(const Assignment& a, const Matrix& flow, int node,
                          int hub_from, int hub_to) {
  if (a.assign[node] != hub_from) return 0.0;
  double v = 0.0;
  for (int j = 0; j < flow.cols(); ++j)
    if (a.assign[j] == hub_to) v += flow(node, j);
  return v;
}

Solution evaluate_assignment(const Instance& inst, const Assignment& a,
                             const Matrix& flow) {
  a.validate(inst, flow);
  const int nh = inst.hub_count();
  const auto& veh = inst.vehicle;

  Solution sol;
  sol.assignment = a;

  for (int h : a.open_hubs) sol.LC += inst.fixed_cost[inst.hub_index(h)];

  std::vector<double> origin(inst.n, 0.0), dest(inst.n, 0.0);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) {
      origin[i] += flow(i, j);
      dest[j] += flow(i, j);
    }

  for (int i = 0; i < inst.n; ++i) {
    const int h = a.assign[i];
    if (h == i) continue; // a hub serves its own node inside the hub
    long count = secondary_vehicle_count(origin[i], dest[i], veh.q);
    sol.DC += static_cast<double>(count) * access_cost(inst, h, i);
    sol.metrics.veh2 += count;
  }

  InterHubFlows flows = interhub_flows(inst, a, flow);
  sol.y = Matrix(nh, nh);
  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nh; ++k) {
      if (h == k) continue;
      long count = forced_vehicle_count(flows.F(h, k), veh.Q);
      sol.y(h, k) = static_cast<double>(count);
      sol.HC +=
          static_cast<double>(count) * interhub_vehicle_cost(inst, inst.hubs[h], inst.hubs[k]);
      sol.metrics.veh1 += count;
      sol.metrics.hflow += flows.F(h, k);
    }

  sol.TC = sol.LC + sol.DC + sol.HC;
  if (sol.metrics.veh1 > 0)
    sol.metrics.vutil =
        100.0 * sol.metrics.hflow / (static_cast<double>(sol.metrics.veh1) * veh.Q);
  return sol;
}

namespace {

struct EnumerationPlan {
  std::vector<std::vector<int>> subsets; // open-hub node lists
};

EnumerationPlan make_plan(const Instance& inst, long budget) {
  const int nh = inst.hub_count();
  if (std::pow(static_cast<double>(nh), static_cast<double>(inst.n)) >
      static_cast<double>(budget))
    throw BudgetError("enumeration budget exceeded: |H|^N > " +
                      std::to_string(budget));
  EnumerationPlan plan;
  for (std::uint64_t mask = 1; mask < (1ull << nh); ++mask) {
    int count = __builtin_popcountll(mask);
    if (inst.p_hubs && count != *inst.p_hubs) continue;
    std::vector<int> open;
    for (int h = 0; h < nh; ++h)
      if (mask & (1ull << h)) open.push_back(inst.hubs[h]);
    plan.subsets.push_back(std::move(open));
  }
  return plan;
}

// Runs fn for every assignment completing the given open set, with capacity
// prechecked against each matrix in capacity_flows.
void enumerate_subset(const Instance& inst, const std::vector<int>& open,
                      const std::vector<const Matrix*>& capacity_flows,
                      const std::vector<std::vector<double>>& origins,
                      const std::function<void(const std::vector<int>&,
                                               const std::vector<int>&)>& fn) {
  const int n = inst.n;
  std::vector<int> assign(n, -1);
  std::vector<int> free_nodes;
  for (int h : open) assign[h] = h;
  for (int i = 0; i < n; ++i)
    if (assign[i] < 0) free_nodes.push_back(i);

  const int k = static_cast<int>(open.size());
  const int nf = static_cast<int>(free_nodes.size());
  std::vector<int> odo(nf, 0);
  for (int i = 0; i < nf; ++i) assign[free_nodes[i]] = open[0];

  auto capacity_ok = [&]() {
    for (std::size_t m = 0; m < capacity_flows.size(); ++m) {
      for (int h : open) {
        double cap = inst.hub_capacity[inst.hub_index(h)];
        if (cap == kUnbounded) continue;
        double load = 0.0;
        for (int i = 0; i < n; ++i)
          if (assign[i] == h) load += origins[m][i];
        if (load > cap + 1e-9) return false;
      }
    }
    return true;
  };

  for (;;) {
    if (capacity_ok()) fn(assign, open);
    int pos = nf - 1;
    while (pos >= 0) {
      if (++odo[pos] < k) {
        assign[free_nodes[pos]] = open[odo[pos]];
        break;
      }
      odo[pos] = 0;
      assign[free_nodes[pos]] = open[0];
      --pos;
    }
    if (pos < 0) break;
  }
}

std::vector<std::vector<double>> origin_totals(
    int n, const std::vector<const Matrix*>& flows) {
  std::vector<std::vector<double>> origins;
  for (const Matrix* f : flows) {
    std::vector<double> o(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) o[i] += (*f)(i, j);
    origins.push_back(std::move(o));
  }
  return origins;
}

} // namespace

void enumerate_assignments(
    const Instance& inst, const std::vector<const Matrix*>& capacity_flows,
    long budget,
    const std::function<void(const std::vector<int>&, int)>& fn) {
  EnumerationPlan plan = make_plan(inst, budget);
  auto origins = origin_totals(inst.n, capacity_flows);
  for (const auto& open : plan.subsets)
    enumerate_subset(inst, open, capacity_flows, origins,
                     [&](const std::vector<int>& assign, const std::vector<int>& o) {
                       fn(assign, static_cast<int>(o.size()));
                     });
}

namespace {

struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::vector<int> assign;
  std::vector<int> open;

  void offer(double v, const std::vector<int>& a, const std::vector<int>& o) {
    if (assign.empty() || v < value || (v == value && a < assign)) {
      value = v;
      assign = a;
      open = o;
    }
  }

  void merge(const Best& other) {
    if (other.assign.empty()) return;
    offer(other.value, other.assign, other.open);
  }
};

template <typename Objective>
Best enumerate_best(const Instance& inst,
                    const std::vector<const Matrix*>& capacity_flows,
                    const OracleOptions& opt, const Objective& objective) {
  EnumerationPlan plan = make_plan(inst, opt.budget);
  auto origins = origin_totals(inst.n, capacity_flows);
  const int nthreads =
      std::max(1, std::min<int>(opt.threads, static_cast<int>(plan.subsets.size())));

  auto worker = [&](std::size_t begin, std::size_t end, Best& best) {
    for (std::size_t s = begin; s < end; ++s)
      enumerate_subset(inst, plan.subsets[s], capacity_flows, origins,
                       [&](const std::vector<int>& assign, const std::vector<int>& open) {
                         best.offer(objective(assign, open), assign, open);
                       });
  };

  if (nthreads == 1) {
    Best best;
    worker(0, plan.subsets.size(), best);
    return best;
  }
  std::vector<Best> bests(nthreads);
  std::vector<std::thread> threads;
  const std::size_t chunk = (plan.subsets.size() + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    std::size_t begin = t * chunk;
    std::size_t end = std::min(plan.subsets.size(), begin + chunk);
    threads.emplace_back(worker, begin, end, std::ref(bests[t]));
  }
  for (auto& th : threads) th.join();
  Best best;
  for (const auto& b : bests) best.merge(b);
  return best;
}

Assignment to_assignment(const Best& best) {
  Assignment a;
  a.assign = best.assign;
  a.open_hubs = best.open;
  std::sort(a.open_hubs.begin(), a.open_hubs.end());
  return a;
}

} // namespace

Solution brute_force_oracle(const Instance& inst, const OracleOptions& opt) {
  Best best = enumerate_best(
      inst, {&inst.flow}, opt,
      [&](const std::vector<int>& assign, const std::vector<int>& open) {
        Assignment a;
        a.assign = assign;
        a.open_hubs = open;
        std::sort(a.open_hubs.begin(), a.open_hubs.end());
        return evaluate_assignment(inst, a, inst.flow).TC;
      });
  if (best.assign.empty())
    throw ValidationError("no feasible assignment exists");
  return evaluate_assignment(inst, to_assignment(best), inst.flow);
}

StochasticSolution brute_force_oracle_stochastic(const Instance& inst,
                                                 const ScenarioSet& scen,
                                                 const OracleOptions& opt) {
  scen.validate(inst.n);
  std::vector<const Matrix*> flows;
  for (const auto& f : scen.flows) flows.push_back(&f);

  auto objective = [&](const std::vector<int>& assign, const std::vector<int>& open) {
    Assignment a;
    a.assign = assign;
    a.open_hubs = open;
    std::sort(a.open_hubs.begin(), a.open_hubs.end());
    double lc = 0.0;
    for (int h : a.open_hubs) lc += inst.fixed_cost[inst.hub_index(h)];
    double expected = 0.0;
    for (int s = 0; s < scen.count(); ++s) {
      Solution sol = evaluate_assignment(inst, a, scen.flows[s]);
      expected += scen.probabilities[s] * (sol.DC + sol.HC);
    }
    return lc + expected;
  };

  Best best = enumerate_best(inst, flows, opt, objective);
  if (best.assign.empty())
    throw ValidationError("no feasible assignment exists under all scenarios");

  StochasticSolution out;
  out.assignment = to_assignment(best);
  out.objective = best.value;
  for (int h : out.assignment.open_hubs)
    out.LC += inst.fixed_cost[inst.hub_index(h)];
  for (int s = 0; s < scen.count(); ++s)
    out.per_scenario.push_back(
        evaluate_assignment(inst, out.assignment, scen.flows[s]));
  return out;
}

} // namespace hndpv
