#include "hndpv/hlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hndpv {

namespace {

double discount_objective(const Instance& inst, const DiscountFactors& f,
                          const std::vector<int>& assign,
                          const std::vector<int>& open) {
  double obj = 0.0;
  for (int h : open) obj += inst.fixed_cost[inst.hub_index(h)];
  for (int i = 0; i < inst.n; ++i) {
    const int hi = assign[i];
    double collect = f.collection * inst.distance(i, hi);
    for (int j = 0; j < inst.n; ++j) {
      const double w = inst.flow(i, j);
      if (w == 0.0) continue;
      obj += w * (collect + f.transfer * inst.distance(hi, assign[j]) +
                  f.distribution * inst.distance(assign[j], j));
    }
  }
  return obj;
}

std::vector<int> open_set_of(const Instance& inst, const std::vector<int>& assign) {
  std::vector<int> open;
  for (int i = 0; i < inst.n; ++i)
    if (assign[i] == i && inst.hub_index(i) >= 0) open.push_back(i);
  return open;
}

bool capacity_ok(const Instance& inst, const std::vector<int>& assign) {
  if (inst.uncapacitated()) return true;
  std::vector<double> load(inst.n, 0.0);
  for (int i = 0; i < inst.n; ++i) load[assign[i]] += inst.origin_total[i];
  for (int h = 0; h < inst.n; ++h) {
    if (load[h] == 0.0) continue;
    int idx = inst.hub_index(h);
    if (idx < 0) continue;
    if (inst.hub_capacity[idx] != kUnbounded &&
        load[h] > inst.hub_capacity[idx] + 1e-9)
      return false;
  }
  return true;
}

HlpResult heuristic_hlp(const Instance& inst, const DiscountFactors& f) {
  const int n = inst.n;

  // Greedy seed: open hubs one by one (cheapest fixed cost first) until every
  // node fits, assigning each node to the best open hub with room.
  std::vector<int> order(inst.hubs);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double fa = inst.fixed_cost[inst.hub_index(a)];
    double fb = inst.fixed_cost[inst.hub_index(b)];
    return fa != fb ? fa < fb : a < b;
  });

  auto assign_to_open = [&](const std::vector<int>& open,
                            std::vector<int>& assign) -> bool {
    std::vector<double> room(inst.n, 0.0);
    for (int h : open) {
      double cap = inst.hub_capacity[inst.hub_index(h)];
      room[h] = cap == kUnbounded ? std::numeric_limits<double>::infinity() : cap;
    }
    for (int h : open) {
      assign[h] = h;
      room[h] -= inst.origin_total[h];
      if (room[h] < -1e-9) return false;
    }
    std::vector<int> nodes;
    for (int i = 0; i < n; ++i)
      if (std::find(open.begin(), open.end(), i) == open.end()) nodes.push_back(i);
    std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
      return inst.origin_total[a] != inst.origin_total[b]
                 ? inst.origin_total[a] > inst.origin_total[b]
                 : a < b;
    });
    for (int i : nodes) {
      int pick = -1;
      double best_d = 0.0;
      for (int h : open) {
        if (room[h] < inst.origin_total[i] - 1e-9) continue;
        double d = inst.distance(i, h);
        if (pick < 0 || d < best_d) {
          pick = h;
          best_d = d;
        }
      }
      if (pick < 0) return false;
      assign[i] = pick;
      room[pick] -= inst.origin_total[i];
    }
    return true;
  };

  std::vector<int> open, assign(n, -1);
  const int want = inst.p_hubs.value_or(0);
  bool seeded = false;
  if (want > 0) {
    open.assign(order.begin(), order.begin() + want);
    std::sort(open.begin(), open.end());
    seeded = assign_to_open(open, assign);
  } else {
    for (int h : order) {
      open.push_back(h);
      std::sort(open.begin(), open.end());
      if (assign_to_open(open, assign)) {
        seeded = true;
        break;
      }
    }
  }
  if (!seeded) throw ValidationError("heuristic seed found no feasible design");

  double best = discount_objective(inst, f, assign, open_set_of(inst, assign));

  // First improvement: single-node reassignments, then open/close swaps.
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n && !improved; ++i) {
      if (assign[i] == i && inst.hub_index(i) >= 0) continue; // hub itself
      int old = assign[i];
      for (int h : open_set_of(inst, assign)) {
        if (h == old) continue;
        assign[i] = h;
        if (capacity_ok(inst, assign)) {
          double cand = discount_objective(inst, f, assign, open_set_of(inst, assign));
          if (cand < best - 1e-9) {
            best = cand;
            improved = true;
            break;
          }
        }
        assign[i] = old;
      }
      if (!improved) assign[i] = old;
    }
    if (improved) continue;
    // Hub swap: close h, open k, reassign h's nodes to k.
    std::vector<int> cur_open = open_set_of(inst, assign);
    for (int h : cur_open) {
      for (int k : inst.hubs) {
        if (std::find(cur_open.begin(), cur_open.end(), k) != cur_open.end())
          continue;
        std::vector<int> cand_assign = assign;
        for (int i = 0; i < n; ++i)
          if (cand_assign[i] == h) cand_assign[i] = k;
        cand_assign[k] = k;
        if (!capacity_ok(inst, cand_assign)) continue;
        double cand =
            discount_objective(inst, f, cand_assign, open_set_of(inst, cand_assign));
        if (cand < best - 1e-9) {
          assign = std::move(cand_assign);
          best = cand;
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
  }

  HlpResult out;
  out.assignment.assign = assign;
  out.assignment.open_hubs = open_set_of(inst, assign);
  out.discount_objective = best;
  out.heuristic = true;
  return out;
}

} // namespace

HlpResult solve_classical_hlp(const Instance& inst, const DiscountFactors& f,
                              const OracleOptions& opt, bool allow_heuristic) {
  const double count = std::pow(static_cast<double>(inst.hub_count()),
                                static_cast<double>(inst.n));
  if (count > static_cast<double>(opt.budget)) {
    if (!allow_heuristic)
      throw BudgetError("classical HLP enumeration exceeds the budget");
    return heuristic_hlp(inst, f);
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_assign, best_open;
  enumerate_assignments(inst, {&inst.flow}, opt.budget,
                        [&](const std::vector<int>& assign, int) {
                          std::vector<int> open = open_set_of(inst, assign);
                          double obj = discount_objective(inst, f, assign, open);
                          if (best_assign.empty() || obj < best ||
                              (obj == best && assign < best_assign)) {
                            best = obj;
                            best_assign = assign;
                            best_open = std::move(open);
                          }
                        });
  if (best_assign.empty())
    throw ValidationError("no feasible assignment exists");

  HlpResult out;
  out.assignment.assign = std::move(best_assign);
  out.assignment.open_hubs = std::move(best_open);
  out.discount_objective = best;
  out.heuristic = false;
  return out;
}

Solution post_assign_vehicles(const Instance& inst, const Assignment& a) {
  return evaluate_assignment(inst, a, inst.flow);
}

namespace {

ComparisonEntry make_entry(double base, double other) {
  ComparisonEntry e;
  e.base = base;
  e.other = other;
  e.absolute = other - base;
  if (base != 0.0) e.percent = 100.0 * (other - base) / base;
  return e;
}

} // namespace

HlpComparison compare(const Solution& hndpv, const Solution& hlp) {
  HlpComparison c;
  c.tc = make_entry(hndpv.TC, hlp.TC);
  c.veh1 = make_entry(static_cast<double>(hndpv.metrics.veh1),
                      static_cast<double>(hlp.metrics.veh1));
  c.veh2 = make_entry(static_cast<double>(hndpv.metrics.veh2),
                      static_cast<double>(hlp.metrics.veh2));
  c.vutil = make_entry(hndpv.metrics.vutil.value_or(0.0),
                       hlp.metrics.vutil.value_or(0.0));
  return c;
}

} // namespace hndpv
