#include "hndpv/benders.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hndpv/kernels.hpp"

namespace hndpv {

Matrix MasterModel::x_matrix(const std::vector<double>& primal) const {
  Matrix x(nh, n);
  for (int h = 0; h < nh; ++h)
    for (int i = 0; i < n; ++i) x(h, i) = primal[col_x(h, i)];
  return x;
}

Matrix MasterModel::y_matrix(const std::vector<double>& primal, int s) const {
  Matrix y(nh, nh);
  for (int h = 0; h < nh; ++h)
    for (int k = 0; k < nh; ++k) y(h, k) = primal[col_y(s, h, k)];
  return y;
}

void MasterModel::snapshot_bounds() {
  base_lower.resize(lp.num_columns());
  base_upper.resize(lp.num_columns());
  for (int j = 0; j < lp.num_columns(); ++j) {
    base_lower[j] = lp.lower_bound(j);
    base_upper[j] = lp.upper_bound(j);
  }
}

MasterModel build_master(const Instance& inst, const MasterOptions& options,
                         const ScenarioSet* scenarios) {
  MasterModel m;
  m.instance = &inst;
  m.n = inst.n;
  m.nh = inst.hub_count();
  m.general = inst.network == NetworkMode::General;
  if (scenarios) {
    scenarios->validate(inst.n);
    m.stochastic = true;
    m.flows = scenarios->flows;
    m.probs = scenarios->probabilities;
  } else {
    m.flows = {inst.flow};
    m.probs = {1.0};
  }
  const int S = m.scenario_count();
  for (int s = 0; s < S; ++s) {
    std::vector<double> o(m.n, 0.0), d(m.n, 0.0);
    for (int i = 0; i < m.n; ++i)
      for (int j = 0; j < m.n; ++j) {
        o[i] += m.flows[s](i, j);
        d[j] += m.flows[s](i, j);
      }
    m.origin.push_back(std::move(o));
    m.dest.push_back(std::move(d));
  }

  // A node that exceeds every hub capacity under some scenario can never be
  // assigned; the model is infeasible by construction.
  if (!inst.uncapacitated()) {
    for (int i = 0; i < m.n; ++i) {
      double need = 0.0;
      for (int s = 0; s < S; ++s) need = std::max(need, m.origin[s][i]);
      bool fits = false;
      for (int h = 0; h < m.nh && !fits; ++h)
        fits = inst.hub_capacity[h] == kUnbounded ||
               inst.hub_capacity[h] >= need - 1e-9;
      if (!fits)
        throw ValidationError("node " + std::to_string(i) +
                              " exceeds every hub capacity");
    }
  }

  double y_cap = 0.0;
  for (int s = 0; s < S; ++s) {
    double total =
        kernels::sum(m.flows[s].data().data(), m.flows[s].data().size());
    y_cap = std::max(
        y_cap, static_cast<double>(guarded_ceil(total / inst.vehicle.Q)));
  }
  m.y_upper = y_cap;

  // Columns: x_hi blocks, then one y block per scenario. Diagonal y carries
  // zero objective cost.
  for (int h = 0; h < m.nh; ++h) {
    const int hub_node = inst.hubs[h];
    for (int i = 0; i < m.n; ++i) {
      double cost = 0.0;
      if (i == hub_node) {
        cost = inst.fixed_cost[h];
      } else {
        for (int s = 0; s < S; ++s) {
          long count = secondary_vehicle_count(m.origin[s][i], m.dest[s][i],
                                               inst.vehicle.q);
          cost += m.probs[s] * static_cast<double>(count) *
                  access_cost(inst, hub_node, i);
        }
      }
      m.lp.add_column(0.0, 1.0, cost);
    }
  }
  for (int s = 0; s < S; ++s)
    for (int h = 0; h < m.nh; ++h)
      for (int k = 0; k < m.nh; ++k) {
        double cost =
            h == k ? 0.0
                   : m.probs[s] *
                         interhub_vehicle_cost(inst, inst.hubs[h], inst.hubs[k]);
        m.lp.add_column(0.0, m.y_upper, cost);
      }

  // Single assignment.
  for (int i = 0; i < m.n; ++i) {
    LpRow row;
    for (int h = 0; h < m.nh; ++h) row.coeffs.emplace_back(m.col_x(h, i), 1.0);
    row.sense = RowSense::Equal;
    row.rhs = 1.0;
    m.lp.add_row(std::move(row));
    ++m.assignment_rows;
  }
  // Assignments only to opened hubs.
  for (int h = 0; h < m.nh; ++h) {
    const int hub_node = inst.hubs[h];
    for (int i = 0; i < m.n; ++i) {
      LpRow row;
      row.coeffs.emplace_back(m.col_x(h, i), 1.0);
      if (i != hub_node) row.coeffs.emplace_back(m.col_x(h, hub_node), -1.0);
      row.sense = RowSense::LessEqual;
      row.rhs = i == hub_node ? 1.0 : 0.0;
      m.lp.add_row(std::move(row));
      ++m.linking_rows;
    }
  }
  // Hub capacity, enforced under every scenario.
  for (int h = 0; h < m.nh; ++h) {
    if (inst.hub_capacity[h] == kUnbounded) continue;
    const int hub_node = inst.hubs[h];
    for (int s = 0; s < S; ++s) {
      LpRow row;
      for (int i = 0; i < m.n; ++i) {
        if (i == hub_node) {
          row.coeffs.emplace_back(m.col_x(h, i),
                                  m.origin[s][i] - inst.hub_capacity[h]);
        } else if (m.origin[s][i] != 0.0) {
          row.coeffs.emplace_back(m.col_x(h, i), m.origin[s][i]);
        }
      }
      row.sense = RowSense::LessEqual;
      row.rhs = 0.0;
      m.lp.add_row(std::move(row));
      ++m.capacity_rows;
    }
  }
  if (inst.p_hubs) {
    LpRow row;
    for (int h = 0; h < m.nh; ++h)
      row.coeffs.emplace_back(m.col_x(h, inst.hubs[h]), 1.0);
    row.sense = RowSense::Equal;
    row.rhs = static_cast<double>(*inst.p_hubs);
    m.lp.add_row(std::move(row));
  }

  if (options.valid_inequalities) add_valid_inequalities(m);
  m.snapshot_bounds();
  return m;
}

void add_valid_inequalities(MasterModel& m) {
  const Instance& inst = *m.instance;
  const double Q = inst.vehicle.Q; // uniform fleet: Q_in = Q_out = Q
  const int S = m.scenario_count();

  for (int s = 0; s < S; ++s) {
    for (int h = 0; h < m.nh; ++h) {
      // Incoming fleet covers the destination demand assigned to h; the
      // zero-cost diagonal appears in the right-hand sum.
      LpRow in_row;
      for (int i = 0; i < m.n; ++i)
        if (m.dest[s][i] != 0.0)
          in_row.coeffs.emplace_back(m.col_x(h, i), m.dest[s][i] / Q);
      for (int k = 0; k < m.nh; ++k)
        in_row.coeffs.emplace_back(m.col_y(s, k, h), -1.0);
      in_row.sense = RowSense::LessEqual;
      in_row.rhs = 0.0;
      m.lp.add_row(std::move(in_row));
      ++m.valid_inequality_rows;

      // Outgoing fleet covers the origin demand assigned to h.
      LpRow out_row;
      for (int i = 0; i < m.n; ++i)
        if (m.origin[s][i] != 0.0)
          out_row.coeffs.emplace_back(m.col_x(h, i), m.origin[s][i] / Q);
      for (int k = 0; k < m.nh; ++k)
        out_row.coeffs.emplace_back(m.col_y(s, h, k), -1.0);
      out_row.sense = RowSense::LessEqual;
      out_row.rhs = 0.0;
      m.lp.add_row(std::move(out_row));
      ++m.valid_inequality_rows;
    }

    // Two open hubs exchanging flow need at least the forced vehicle count.
    // Dropped in general-network mode, where their flow may route through
    // intermediate hubs.
    if (m.general) continue;
    for (int h = 0; h < m.nh; ++h)
      for (int k = 0; k < m.nh; ++k) {
        if (h == k) continue;
        const double w = m.flows[s](inst.hubs[h], inst.hubs[k]);
        if (w <= 0.0) continue;
        const double c = static_cast<double>(guarded_ceil(w / Q));
        LpRow row;
        row.coeffs.emplace_back(m.col_x(h, inst.hubs[h]), c);
        row.coeffs.emplace_back(m.col_x(k, inst.hubs[k]), c);
        row.coeffs.emplace_back(m.col_y(s, h, k), -1.0);
        row.sense = RowSense::LessEqual;
        row.rhs = c;
        m.lp.add_row(std::move(row));
        ++m.valid_inequality_rows;
      }
  }
  m.snapshot_bounds();
}

std::vector<Violation> check_feasibility(const Matrix& xbar, const Matrix& ybar,
                                         const Matrix& flow, double capacity,
                                         double tol) {
  Matrix f = interhub_flows_fractional(xbar, flow);
  std::vector<Violation> out;
  for (int h = 0; h < xbar.rows(); ++h)
    for (int k = 0; k < xbar.rows(); ++k) {
      double excess = f(h, k) - capacity * ybar(h, k);
      if (excess > tol) out.push_back({h, k, excess});
    }
  return out;
}

std::vector<Violation> select_violations(std::vector<Violation> violations,
                                         CutMode mode) {
  if (mode == CutMode::MultiCut || violations.empty()) return violations;
  Violation best = violations.front();
  for (const auto& v : violations) {
    if (v.amount > best.amount + 1e-12) {
      best = v;
    } else if (std::abs(v.amount - best.amount) <= 1e-12 &&
               std::make_pair(v.hub_from, v.hub_to) <
                   std::make_pair(best.hub_from, best.hub_to)) {
      best = v;
    }
  }
  return {best};
}

FeasibilityCut make_cut(const MasterModel& master, int hub_from, int hub_to,
                        const Matrix& xbar, const Matrix& ybar, int scenario) {
  const Instance& inst = *master.instance;
  const double Q = inst.vehicle.Q;
  const Matrix& flow = master.flows[scenario];
  const auto& origin = master.origin[scenario];
  const int n = master.n;
  const int nh = master.nh;

  double f_hat = 0.0;
  for (int i = 0; i < n; ++i) {
    if (xbar(hub_from, i) == 0.0) continue;
    f_hat += xbar(hub_from, i) * kernels::dot(flow.row(i), xbar.row(hub_to), n);
  }
  const double capacity_violation = f_hat - Q * ybar(hub_from, hub_to);
  if (capacity_violation <= 1e-6)
    throw ValidationError("make_cut: pair is not violated at the given point");

  FeasibilityCut cut;
  cut.source = FeasibilityCut::Source::ClosedForm;
  cut.hub_from = hub_from;
  cut.hub_to = hub_to;
  cut.scenario = scenario;
  cut.xbar_row.assign(xbar.row(hub_from), xbar.row(hub_from) + n);
  cut.capacity_violation = capacity_violation;

  // Realized inequality with Gamma = 1:
  //   -Q y_hk - sum_{h' != h} sum_i O_i xbar_hi x_{h'i}
  //           + sum_j (sum_i xbar_hi w_ij) x_{kj} <= 0
  std::vector<double> xcoef(static_cast<std::size_t>(nh) * n, 0.0);
  for (int h = 0; h < nh; ++h) {
    if (h == hub_from) continue;
    for (int i = 0; i < n; ++i)
      if (cut.xbar_row[i] != 0.0)
        xcoef[static_cast<std::size_t>(h) * n + i] -=
            origin[i] * cut.xbar_row[i];
  }
  std::vector<double> wsum(n, 0.0);
  kernels::weighted_row_sum(cut.xbar_row.data(), flow.row(0), n, n, n,
                            wsum.data());
  for (int j = 0; j < n; ++j)
    xcoef[static_cast<std::size_t>(hub_to) * n + j] += wsum[j];

  cut.row.sense = RowSense::LessEqual;
  cut.row.rhs = 0.0;
  cut.row.coeffs.emplace_back(master.col_y(scenario, hub_from, hub_to), -Q);
  for (int h = 0; h < nh; ++h)
    for (int i = 0; i < n; ++i) {
      double c = xcoef[static_cast<std::size_t>(h) * n + i];
      if (c != 0.0) cut.row.coeffs.emplace_back(master.col_x(h, i), c);
    }

  cut.trigger_violation = cut_activity(master, cut, xbar, ybar);
  return cut;
}

double cut_activity(const MasterModel& master, const FeasibilityCut& cut,
                    const Matrix& xbar, const Matrix& ybar) {
  const int num_x = master.num_x();
  double v = 0.0;
  for (const auto& [col, c] : cut.row.coeffs) {
    if (col < num_x) {
      v += c * xbar(col / master.n, col % master.n);
    } else {
      int rel = col - num_x;
      int k = rel % master.nh;
      int h = (rel / master.nh) % master.nh;
      v += c * ybar(h, k);
    }
  }
  return v;
}

RayDiagnostic verify_ray(const FeasibilityCut& cut, const Matrix& xbar,
                         const Matrix& ybar, const Matrix& flow,
                         double capacity) {
  RayDiagnostic diag;
  const int nh = xbar.rows();
  const int n = xbar.cols();
  const int hh = cut.hub_from, kk = cut.hub_to;

  // Reconstruct the ray (Gamma = 1): lambda is -1 at (hh, kk) only;
  // mu_hi = -xbar(hh, i) for h != hh; nu_ki = xbar(hh, i) for k == kk.
  auto lambda = [&](int h, int k) { return h == hh && k == kk ? -1.0 : 0.0; };
  auto mu = [&](int h, int i) { return h == hh ? 0.0 : -cut.xbar_row[i]; };
  auto nu = [&](int k, int i) { return k == kk ? cut.xbar_row[i] : 0.0; };

  diag.dual_feasible = true;
  for (int h = 0; h < nh && diag.dual_feasible; ++h)
    for (int k = 0; k < nh && diag.dual_feasible; ++k)
      for (int i = 0; i < n; ++i) {
        if (lambda(h, k) + mu(h, i) + nu(k, i) > 1e-9) {
          diag.dual_feasible = false;
          diag.violated_triple = {h, k, i};
          break;
        }
      }

  std::vector<double> origin(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) origin[i] += flow(i, j);

  // Dual objective at the ray; the pair flow is accumulated identically in
  // both expressions so integral trigger points compare exactly.
  double objective = -capacity * ybar(hh, kk);
  for (int h = 0; h < nh; ++h) {
    if (h == hh) continue;
    for (int i = 0; i < n; ++i)
      objective -= origin[i] * xbar(h, i) * cut.xbar_row[i];
  }
  double pair_flow = 0.0;
  for (int i = 0; i < n; ++i) {
    if (cut.xbar_row[i] == 0.0) continue;
    double row_to = 0.0;
    for (int j = 0; j < n; ++j) row_to += flow(i, j) * xbar(kk, j);
    pair_flow += cut.xbar_row[i] * row_to;
  }
  objective += pair_flow;

  diag.objective = objective;
  diag.expected = pair_flow - capacity * ybar(hh, kk);
  diag.objective_matches = std::abs(diag.objective - diag.expected) <= 1e-9;
  diag.separating = diag.objective > 1e-9;
  return diag;
}

void dump_cut_pool(const MasterModel& master, std::ostream& os) {
  int idx = 0;
  for (const auto& cut : master.pool) {
    double checksum = 0.0;
    for (const auto& [col, c] : cut.row.coeffs) checksum += c * (col + 1);
    os << idx++ << ","
       << (cut.source == FeasibilityCut::Source::ClosedForm ? "closed-form"
                                                            : "farkas")
       << "," << cut.scenario << "," << cut.hub_from << "," << cut.hub_to << ","
       << cut.trigger_violation << "," << checksum << "\n";
  }
}

} // namespace hndpv
