#include "hndpv/bnc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "hndpv/general.hpp"

namespace hndpv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct BoundChange {
  int col;
  double lower, upper;
};

struct Node {
  std::vector<BoundChange> changes;
  double bound = -kInf;
  long id = 0;
};

class TraceWriter {
public:
  TraceWriter(const std::string& path, Clock::time_point start) : start_(start) {
    if (path.empty()) return;
    out_.open(path);
    if (out_) out_ << "time_s,lower_bound,upper_bound,cuts,nodes\n";
  }

  void emit(double lb, double ub, long cuts, long nodes) {
    if (!out_) return;
    if (lb < last_lb_) lb = last_lb_;
    if (ub > last_ub_) ub = last_ub_;
    if (emitted_ && lb == last_lb_ && ub == last_ub_) return;
    last_lb_ = lb;
    last_ub_ = ub;
    emitted_ = true;
    out_ << seconds_since(start_) << "," << lb << ",";
    if (ub == kInf)
      out_ << "inf";
    else
      out_ << ub;
    out_ << "," << cuts << "," << nodes << "\n";
    out_.flush();
  }

private:
  std::ofstream out_;
  Clock::time_point start_;
  double last_lb_ = -kInf;
  double last_ub_ = kInf;
  bool emitted_ = false;
};

class Search {
public:
  Search(MasterModel& master, const SolverOptions& opt)
      : master_(master), opt_(opt), start_(Clock::now()),
        trace_(opt.trace_path, start_) {}

  SolveResult run() {
    SolveResult result;
    nodes_.push_back(Node{});
    open_.push_back(0);
    bool root_infeasible = false;

    while (!open_.empty()) {
      if (hit_limit()) break;
      Node node = nodes_[pop_node()];
      if (incumbent_found_ && node.bound >= prune_threshold()) continue;

      ++stats_.bnodes;
      if (!process_node(node)) {
        if (node.id == 0) {
          root_infeasible = true;
          break;
        }
      }
    }

    if (root_infeasible) {
      result.status = SolveStatus::Infeasible;
    } else if (!timed_out_ && open_.empty()) {
      result.status =
          incumbent_found_ ? SolveStatus::Optimal : SolveStatus::Infeasible;
    } else {
      result.status = incumbent_found_ ? SolveStatus::TimeLimitFeasible
                                       : SolveStatus::TimeLimitNoIncumbent;
    }
    finalize(result);
    return result;
  }

private:
  MasterModel& master_;
  const SolverOptions& opt_;
  Clock::time_point start_;
  TraceWriter trace_;
  SolveStats stats_;

  std::vector<Node> nodes_;
  std::vector<long> open_;
  std::vector<int> applied_cols_;
  long next_id_ = 1;
  bool dive_next_ = false;
  bool incumbent_found_ = false;
  bool timed_out_ = false;
  double prune_value_ = kInf;
  double lower_bound_ = -kInf;
  double cpu_cuts_accum_ = 0.0;

  Assignment best_assignment_;
  std::vector<Matrix> best_y_;
  std::vector<double> best_hflow_;
  std::vector<double> hflow_scratch_; // general mode, filled per candidate

  double prune_threshold() const {
    return prune_value_ -
           opt_.rel_gap_tolerance * std::max(std::abs(prune_value_), 1e-9);
  }

  bool hit_limit() {
    if (opt_.node_limit >= 0 && stats_.bnodes >= opt_.node_limit)
      timed_out_ = true;
    else if (seconds_since(start_) >= opt_.time_limit)
      timed_out_ = true;
    return timed_out_;
  }

  std::size_t pop_node_index() {
    // Dive onto the child just pushed; otherwise fall back to best bound
    // once an incumbent exists.
    if (!incumbent_found_ || dive_next_) return open_.size() - 1;
    std::size_t pick = 0;
    for (std::size_t i = 1; i < open_.size(); ++i) {
      const Node& a = nodes_[open_[i]];
      const Node& b = nodes_[open_[pick]];
      if (a.bound < b.bound - 1e-12 ||
          (std::abs(a.bound - b.bound) <= 1e-12 && a.id < b.id))
        pick = i;
    }
    return pick;
  }

  long pop_node() {
    std::size_t pick = pop_node_index();
    dive_next_ = false;
    long idx = open_[pick];
    open_.erase(open_.begin() + static_cast<long>(pick));
    return idx;
  }

  void push_node(Node node) {
    nodes_.push_back(std::move(node));
    open_.push_back(static_cast<long>(nodes_.size()) - 1);
  }

  void apply_bounds(const Node& node) {
    for (int col : applied_cols_)
      master_.lp.set_bounds(col, master_.base_lower[col], master_.base_upper[col]);
    applied_cols_.clear();
    for (const auto& ch : node.changes) {
      master_.lp.set_bounds(ch.col, ch.lower, ch.upper);
      applied_cols_.push_back(ch.col);
    }
  }

  void update_lower_bound(double processing_bound) {
    double lb = processing_bound;
    for (long idx : open_) lb = std::min(lb, nodes_[idx].bound);
    if (lb > lower_bound_) {
      lower_bound_ = lb;
      trace_.emit(lower_bound_, prune_value_, stats_.cuts, stats_.bnodes);
    }
  }

  // Returns false when the node LP is infeasible.
  bool process_node(Node node) {
    apply_bounds(node);
    int fractional_rounds = 0;
    int integral_rounds = 0;

    for (;;) {
      if (seconds_since(start_) >= opt_.time_limit) {
        timed_out_ = true;
        push_node(std::move(node)); // keep its bound in the open set
        return true;
      }
      auto outcome = master_.lp.solve();
      if (lp_infeasible(outcome)) return false;
      const auto* relax = lp_optimal(outcome);
      if (!relax) throw NumericalError("master relaxation reported unbounded");
      node.bound = relax->objective;
      update_lower_bound(node.bound);
      if (incumbent_found_ && node.bound >= prune_threshold()) return true;

      int frac_x = fractional_x_column(relax->primal);
      if (frac_x < 0) {
        // Any integral assignment admits its forced completion as an
        // incumbent, whatever the current fleet values; record it before
        // cutting so every candidate contributes an upper bound.
        if (!master_.general && integral_rounds == 0) {
          try {
            accept_incumbent(relax->primal);
          } catch (const ValidationError&) {
          }
          if (incumbent_found_ && node.bound >= prune_threshold()) return true;
        }
        // The closed-form ray (and the routing Farkas ray) needs integral x
        // only; the capacity check runs against the current y block as is.
        // General-mode rounds per node are capped: its Farkas cuts tighten a
        // fractional fleet slowly, and branching is cheaper beyond a few.
        const bool may_separate =
            !master_.general || integral_rounds < 10 ||
            fractional_y_column(relax->primal) < 0;
        if (may_separate && separate_integral(relax->primal)) {
          ++integral_rounds;
          continue;
        }
        int frac_y = fractional_y_column(relax->primal);
        if (frac_y < 0) {
          accept_incumbent(relax->primal);
          return true;
        }
        if (master_.general && may_separate) {
          // Feasible routing at this fractional fleet: rounding the fleet up
          // keeps it feasible, so record the completion.
          try {
            accept_incumbent(relax->primal);
          } catch (const ValidationError&) {
          }
          if (incumbent_found_ && node.bound >= prune_threshold()) return true;
          branch(node, frac_y, relax->primal[frac_y]);
          return true;
        }
        if (master_.general) {
          branch(node, frac_y, relax->primal[frac_y]);
          return true;
        }
        // Cut-clean point with fractional vehicles: the forced completion of
        // this assignment is feasible, so record it before branching on y.
        try {
          accept_incumbent(relax->primal);
        } catch (const ValidationError&) {
          // Rounding an almost-integral x can nudge a binding capacity
          // over; the y branches below still resolve the node exactly.
        }
        if (incumbent_found_ && node.bound >= prune_threshold()) return true;
        // With the whole x block fixed by branching, the completion is the
        // subtree optimum; nothing below can improve on it.
        bool x_fixed = true;
        for (int col = 0; col < master_.num_x() && x_fixed; ++col)
          x_fixed = master_.lp.lower_bound(col) == master_.lp.upper_bound(col);
        if (x_fixed) return true;
        branch(node, frac_y, relax->primal[frac_y]);
        return true;
      }

      if (node.id == 0 && !master_.general &&
          fractional_rounds < opt_.root_fractional_rounds &&
          separate_fractional(relax->primal)) {
        ++fractional_rounds;
        continue;
      }

      branch(node, frac_x, relax->primal[frac_x]);
      return true;
    }
  }

  double fractionality(double v) const {
    double f = v - std::floor(v);
    return std::min(f, 1.0 - f);
  }

  // Most fractional hub opening first, then allocations; ties fall to the
  // smallest column index. Returns -1 when every x is integral.
  int fractional_x_column(const std::vector<double>& primal) {
    const Instance& inst = *master_.instance;
    int best = -1;
    double best_score = opt_.integrality_tolerance;
    for (int h = 0; h < master_.nh; ++h) {
      int col = master_.col_x(h, inst.hubs[h]);
      double score = fractionality(primal[col]);
      if (score > best_score + 1e-12) {
        best_score = score;
        best = col;
      }
    }
    if (best >= 0) return best;
    for (int col = 0; col < master_.num_x(); ++col) {
      double score = fractionality(primal[col]);
      if (score > best_score + 1e-12) {
        best_score = score;
        best = col;
      }
    }
    return best;
  }

  int fractional_y_column(const std::vector<double>& primal) {
    int best = -1;
    double best_score = opt_.integrality_tolerance;
    for (int col = master_.num_x(); col < master_.num_cols(); ++col) {
      double score = fractionality(primal[col]);
      if (score > best_score + 1e-12) {
        best_score = score;
        best = col;
      }
    }
    return best;
  }

  bool separate_integral(const std::vector<double>& primal) {
    auto t0 = Clock::now();
    const Instance& inst = *master_.instance;
    Matrix xbar = master_.x_matrix(primal);
    std::vector<FeasibilityCut> cuts;
    hflow_scratch_.assign(master_.scenario_count(), 0.0);

    for (int s = 0; s < master_.scenario_count(); ++s) {
      Matrix ybar = master_.y_matrix(primal, s);
      ++stats_.subproblem_calls;
      if (!master_.general) {
        auto violations =
            check_feasibility(xbar, ybar, master_.flows[s], inst.vehicle.Q);
        // Diagonal vehicles are free; incumbents are completed instead of cut.
        std::erase_if(violations,
                      [](const Violation& v) { return v.hub_from == v.hub_to; });
        if (violations.empty()) continue;
        for (const auto& v : select_violations(violations, opt_.cut_mode))
          cuts.push_back(make_cut(master_, v.hub_from, v.hub_to, xbar, ybar, s));
      } else {
        GeneralSubproblem sub = build_gbsp(xbar, ybar, inst, master_.flows[s]);
        auto sub_outcome = sub.lp.solve();
        if (const auto* routed = lp_optimal(sub_outcome)) {
          double hflow = 0.0;
          for (int h = 0; h < master_.nh; ++h)
            for (int k = 0; k < master_.nh; ++k) {
              if (h == k) continue;
              for (int i = 0; i < master_.n; ++i)
                hflow += routed->primal[sub.col_z(i, h, k)];
            }
          hflow_scratch_[s] = hflow;
        } else if (const auto* cert = lp_infeasible(sub_outcome)) {
          cuts.push_back(extract_general_cut(master_, sub, *cert, xbar, ybar, s));
        } else {
          throw NumericalError("routing subproblem reported unbounded");
        }
      }
    }

    for (auto& cut : cuts) {
      master_.lp.add_row(cut.row);
      master_.pool.push_back(std::move(cut));
      ++stats_.cuts;
    }
    cpu_cuts_accum_ += seconds_since(t0);
    return !cuts.empty();
  }

  bool separate_fractional(const std::vector<double>& primal) {
    auto t0 = Clock::now();
    const Instance& inst = *master_.instance;
    Matrix xbar = master_.x_matrix(primal);
    int added = 0;
    for (int s = 0; s < master_.scenario_count(); ++s) {
      Matrix ybar = master_.y_matrix(primal, s);
      ++stats_.subproblem_calls;
      auto violations =
          check_feasibility(xbar, ybar, master_.flows[s], inst.vehicle.Q);
      std::erase_if(violations,
                    [](const Violation& v) { return v.hub_from == v.hub_to; });
      for (const auto& v : select_violations(violations, opt_.cut_mode)) {
        FeasibilityCut cut =
            make_cut(master_, v.hub_from, v.hub_to, xbar, ybar, s);
        // The ray stays dual-feasible at fractional points, but the realized
        // inequality only separates when the cross terms stay small.
        if (cut.trigger_violation <= 1e-6) continue;
        master_.lp.add_row(cut.row);
        master_.pool.push_back(std::move(cut));
        ++stats_.cuts;
        ++added;
      }
    }
    cpu_cuts_accum_ += seconds_since(t0);
    return added > 0;
  }

  void branch(const Node& node, int col, double value) {
    const double floor_v = std::floor(value);
    Node down;
    down.changes = node.changes;
    down.changes.push_back({col, master_.lp.lower_bound(col), floor_v});
    down.bound = node.bound;
    down.id = next_id_++;

    Node up;
    up.changes = node.changes;
    up.changes.push_back({col, floor_v + 1.0, master_.lp.upper_bound(col)});
    up.bound = node.bound;
    up.id = next_id_++;

    // Depth-first pops the last push: plunge toward the nearer child.
    if (value - floor_v >= 0.5) {
      push_node(std::move(down));
      push_node(std::move(up));
    } else {
      push_node(std::move(up));
      push_node(std::move(down));
    }
    dive_next_ = true;
  }

  void accept_incumbent(const std::vector<double>& primal) {
    const Instance& inst = *master_.instance;
    Matrix xbar = master_.x_matrix(primal);

    Assignment a;
    a.assign.resize(master_.n);
    for (int i = 0; i < master_.n; ++i) {
      int pick = 0;
      for (int h = 1; h < master_.nh; ++h)
        if (xbar(h, i) > xbar(pick, i)) pick = h;
      a.assign[i] = inst.hubs[pick];
    }
    for (int h = 0; h < master_.nh; ++h)
      if (xbar(h, inst.hubs[h]) >= 0.5) a.open_hubs.push_back(inst.hubs[h]);
    std::sort(a.open_hubs.begin(), a.open_hubs.end());

    double objective = 0.0;
    std::vector<Matrix> ybars;
    std::vector<double> hflows;
    if (!master_.general) {
      for (int h : a.open_hubs) objective += inst.fixed_cost[inst.hub_index(h)];
      for (int s = 0; s < master_.scenario_count(); ++s) {
        Solution sol = evaluate_assignment(inst, a, master_.flows[s]);
        objective += master_.probs[s] * (sol.DC + sol.HC);
        ybars.push_back(sol.y);
        hflows.push_back(sol.metrics.hflow);
      }
    } else {
      // Rounding the fleet up keeps every routing subproblem feasible.
      for (int h : a.open_hubs) objective += inst.fixed_cost[inst.hub_index(h)];
      for (int s = 0; s < master_.scenario_count(); ++s) {
        Matrix y = master_.y_matrix(primal, s);
        double dc = 0.0, hc = 0.0;
        for (int h = 0; h < master_.nh; ++h)
          for (int k = 0; k < master_.nh; ++k) {
            if (h == k) {
              y(h, k) = 0.0;
              continue;
            }
            y(h, k) = std::max(
                0.0, std::ceil(y(h, k) - opt_.integrality_tolerance));
            hc += y(h, k) *
                  interhub_vehicle_cost(inst, inst.hubs[h], inst.hubs[k]);
          }
        for (int i = 0; i < master_.n; ++i) {
          int hub = a.assign[i];
          if (hub == i) continue;
          long count = secondary_vehicle_count(
              master_.origin[s][i], master_.dest[s][i], inst.vehicle.q);
          dc += static_cast<double>(count) * access_cost(inst, hub, i);
        }
        objective += master_.probs[s] * (dc + hc);
        ybars.push_back(std::move(y));
      }
      hflows = hflow_scratch_;
    }

    if (objective < prune_value_ - 1e-12) {
      prune_value_ = objective;
      incumbent_found_ = true;
      best_assignment_ = std::move(a);
      best_y_ = std::move(ybars);
      best_hflow_ = std::move(hflows);
      trace_.emit(lower_bound_, prune_value_, stats_.cuts, stats_.bnodes);
    }
  }

  void finalize(SolveResult& result) {
    result.stats = stats_;
    result.stats.cpu_cuts_s = cpu_cuts_accum_;
    result.stats.cpu_total_s = seconds_since(start_);
    if (result.status == SolveStatus::Optimal) lower_bound_ = prune_value_;
    if (result.status == SolveStatus::Infeasible) lower_bound_ = kInf;
    result.lower_bound = lower_bound_;
    if (incumbent_found_) {
      result.objective = prune_value_;
      build_solution(result);
      result.gap_percent = 100.0 * (prune_value_ - lower_bound_) /
                           std::max(std::abs(prune_value_), 1e-9);
      if (result.gap_percent < 0.0) result.gap_percent = 0.0;
      trace_.emit(lower_bound_, prune_value_, stats_.cuts, stats_.bnodes);
    } else {
      result.objective = kInf;
      result.gap_percent = kInf;
    }
  }

  void build_solution(SolveResult& result) {
    const Instance& inst = *master_.instance;
    if (!master_.stochastic) {
      result.incumbent = make_scenario_solution(0);
      return;
    }
    StochasticSolution st;
    st.assignment = best_assignment_;
    st.objective = prune_value_;
    for (int h : best_assignment_.open_hubs)
      st.LC += inst.fixed_cost[inst.hub_index(h)];
    for (int s = 0; s < master_.scenario_count(); ++s)
      st.per_scenario.push_back(make_scenario_solution(s));
    result.stochastic = std::move(st);
  }

  Solution make_scenario_solution(int s) {
    const Instance& inst = *master_.instance;
    if (!master_.general)
      return evaluate_assignment(inst, best_assignment_, master_.flows[s]);

    // General mode: vehicle counts are the decision; no forced completion.
    Solution sol;
    sol.assignment = best_assignment_;
    for (int h : best_assignment_.open_hubs)
      sol.LC += inst.fixed_cost[inst.hub_index(h)];
    std::vector<double> origin(master_.n, 0.0), dest(master_.n, 0.0);
    for (int i = 0; i < master_.n; ++i)
      for (int j = 0; j < master_.n; ++j) {
        origin[i] += master_.flows[s](i, j);
        dest[j] += master_.flows[s](i, j);
      }
    for (int i = 0; i < master_.n; ++i) {
      int h = sol.assignment.assign[i];
      if (h == i) continue;
      long count = secondary_vehicle_count(origin[i], dest[i], inst.vehicle.q);
      sol.DC += static_cast<double>(count) * access_cost(inst, h, i);
      sol.metrics.veh2 += count;
    }
    sol.y = best_y_[s];
    for (int h = 0; h < master_.nh; ++h)
      for (int k = 0; k < master_.nh; ++k) {
        if (h == k) continue;
        long count = static_cast<long>(sol.y(h, k));
        sol.HC += static_cast<double>(count) *
                  interhub_vehicle_cost(inst, inst.hubs[h], inst.hubs[k]);
        sol.metrics.veh1 += count;
      }
    sol.TC = sol.LC + sol.DC + sol.HC;
    sol.metrics.hflow = best_hflow_.empty() ? 0.0 : best_hflow_[s];
    if (sol.metrics.veh1 > 0)
      sol.metrics.vutil =
          100.0 * sol.metrics.hflow /
          (static_cast<double>(sol.metrics.veh1) * inst.vehicle.Q);
    return sol;
  }
};

} // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::TimeLimitFeasible:
      return "time_limit_feasible";
    case SolveStatus::TimeLimitNoIncumbent:
      return "time_limit_no_incumbent";
    case SolveStatus::Infeasible:
      return "infeasible";
  }
  return "unknown";
}

SolveResult solve(MasterModel& master, const SolverOptions& options) {
  Search search(master, options);
  return search.run();
}

SolveResult solve_instance(const Instance& inst, const SolverOptions& options,
                           const ScenarioSet* scenarios) {
  MasterModel master = build_master(
      inst, {.valid_inequalities = options.valid_inequalities}, scenarios);
  return solve(master, options);
}

double root_relaxation_bound(MasterModel& master) {
  auto outcome = master.lp.solve();
  const auto* opt = lp_optimal(outcome);
  if (!opt) throw ValidationError("root relaxation is infeasible");
  return opt->objective;
}

} // namespace hndpv
