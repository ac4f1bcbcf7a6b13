#include "hndpv/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "hndpv/kernels.hpp"

namespace hndpv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const LpOptimal* lp_optimal(const LpOutcome& o) { return std::get_if<LpOptimal>(&o); }
const LpInfeasible* lp_infeasible(const LpOutcome& o) { return std::get_if<LpInfeasible>(&o); }
const LpUnbounded* lp_unbounded(const LpOutcome& o) { return std::get_if<LpUnbounded>(&o); }

int LinearProgram::add_column(double lower, double upper, double objective) {
  if (lower > upper) throw ValidationError("column lower bound exceeds upper bound");
  if (!std::isfinite(objective)) throw ValidationError("objective coefficient must be finite");
  lower_.push_back(lower);
  upper_.push_back(upper);
  obj_.push_back(objective);
  col_entries_.emplace_back();
  return num_columns() - 1;
}

void LinearProgram::set_bounds(int col, double lower, double upper) {
  if (lower > upper) throw ValidationError("column lower bound exceeds upper bound");
  lower_[col] = lower;
  upper_[col] = upper;
}

void LinearProgram::set_objective_coeff(int col, double value) {
  if (!std::isfinite(value)) throw ValidationError("objective coefficient must be finite");
  obj_[col] = value;
}

int LinearProgram::add_row(LpRow row) {
  for (const auto& [col, v] : row.coeffs) {
    if (col < 0 || col >= num_columns())
      throw ValidationError("row references unknown column " + std::to_string(col));
    if (!std::isfinite(v)) throw ValidationError("row coefficient must be finite");
  }
  const int r = num_rows();
  for (const auto& [col, v] : row.coeffs)
    if (v != 0.0) col_entries_[col].emplace_back(r, v);
  rows_.push_back(std::move(row));
  return r;
}

void LinearProgram::add_rows(std::vector<LpRow> rows) {
  for (auto& r : rows) add_row(std::move(r));
}

void LinearProgram::reset_basis() {
  basis_.clear();
  status_.clear();
  binv_cache_.clear();
  binv_rows_ = -1;
  basis_rows_ = -1;
  basis_cols_ = -1;
}

void LinearProgram::write_lp_format(std::ostream& os) const {
  os << "Minimize\n obj:";
  bool any = false;
  for (int j = 0; j < num_columns(); ++j) {
    if (obj_[j] == 0.0) continue;
    os << (obj_[j] >= 0 && any ? " +" : " ") << obj_[j] << " c" << j;
    any = true;
  }
  if (!any) os << " 0 c0";
  os << "\nSubject To\n";
  for (int r = 0; r < num_rows(); ++r) {
    os << " r" << r << ":";
    for (const auto& [col, v] : rows_[r].coeffs)
      os << (v >= 0 ? " +" : " ") << v << " c" << col;
    switch (rows_[r].sense) {
      case RowSense::LessEqual: os << " <= "; break;
      case RowSense::Equal: os << " = "; break;
      case RowSense::GreaterEqual: os << " >= "; break;
    }
    os << rows_[r].rhs << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < num_columns(); ++j) {
    if (lower_[j] == -kInf)
      os << " -inf";
    else
      os << " " << lower_[j];
    os << " <= c" << j << " <= ";
    if (upper_[j] == kInf)
      os << "+inf\n";
    else
      os << upper_[j] << "\n";
  }
  os << "End\n";
}

// ---------------------------------------------------------------------------
// Bounded-variable revised simplex with an explicit basis inverse.
//
// Standard form: every row r gains a slack column s_r with coefficient +1 and
// bounds encoding the sense (<=: [0,inf), =: [0,0], >=: (-inf,0]). Rows are
// equilibrated internally by power-of-two scales (exact in floating point);
// duals and Farkas rays are unscaled on extraction. Phase 1 minimizes the sum
// of bound violations of basic variables (costs -1/+1 on the violating
// basics) with hysteresis on the phase switch; phase 2 prices the true
// objective. Pivoting is Dantzig with a Harris two-pass ratio test, falling
// back to Bland's rule when progress stalls. The inverse is kept column-major
// so FTRAN and the pivot update run on the axpy/dot kernels.
// ---------------------------------------------------------------------------

class SimplexSolver {
public:
  using ColStatus = LinearProgram::ColStatus;

  SimplexSolver(LinearProgram& lp, const LpConfig& cfg) : lp_(lp), cfg_(cfg) {
    m_ = lp.num_rows();
    n_ = lp.num_columns();
    ntot_ = n_ + m_;
    lower_.resize(ntot_);
    upper_.resize(ntot_);
    rhs_.resize(m_);
    for (int j = 0; j < n_; ++j) {
      lower_[j] = lp.lower_[j];
      upper_[j] = lp.upper_[j];
    }
    inv_scale_.assign(m_, 1.0);
    for (int r = 0; r < m_; ++r) {
      double mag = std::abs(lp.rows_[r].rhs);
      for (const auto& [col, v] : lp.rows_[r].coeffs)
        mag = std::max(mag, std::abs(v));
      if (mag > 1.0) inv_scale_[r] = std::exp2(-std::ceil(std::log2(mag)));
      rhs_[r] = lp.rows_[r].rhs * inv_scale_[r];
      switch (lp.rows_[r].sense) {
        case RowSense::LessEqual:
          lower_[n_ + r] = 0.0;
          upper_[n_ + r] = kInf;
          break;
        case RowSense::Equal:
          lower_[n_ + r] = 0.0;
          upper_[n_ + r] = 0.0;
          break;
        case RowSense::GreaterEqual:
          lower_[n_ + r] = -kInf;
          upper_[n_ + r] = 0.0;
          break;
      }
    }
    max_iterations_ = cfg.max_iterations > 0
                          ? cfg.max_iterations
                          : 20000 + 200L * (m_ + n_);
  }

  LpOutcome run() {
    init_basis();
    if (lp_.binv_rows_ == m_ && static_cast<int>(lp_.binv_cache_.size()) ==
                                    static_cast<int>(m_) * m_) {
      binv_ = std::move(lp_.binv_cache_);
      lp_.binv_rows_ = -1;
      pivots_since_refactor_ = 0;
    } else if (!factorize()) {
      repair_basis();
    }
    compute_x();

    long iters = 0;
    int refactor_retries = 0;
    std::vector<double> cost(ntot_);
    y_.resize(m_);
    w_.resize(m_);

    for (;;) {
      if (++iters > max_iterations_)
        throw NumericalError("simplex iteration limit exceeded");

      const bool phase1 = build_costs(cost);

      // Stall detection drives the Bland fallback: step length alone cannot,
      // because a cycle can consist of positive but vanishing steps. Progress
      // is tracked per phase so switching phases cannot mask a stall.
      double measure = 0.0;
      if (phase1) {
        for (int i = 0; i < m_; ++i) {
          const int j = basis_[i];
          measure += std::max(0.0, lower_[j] - x_[j]) +
                     std::max(0.0, x_[j] - upper_[j]);
        }
      } else {
        for (int j = 0; j < n_; ++j) measure += lp_.obj_[j] * x_[j];
      }
      double& last = last_measure_[phase1 ? 1 : 0];
      if (measure < last - 1e-9 * (1.0 + std::abs(last))) {
        stall_count_ = 0;
        bland_ = false;
        last = measure;
      } else if (++stall_count_ > 100) {
        bland_ = true;
      }
      if (measure < last) last = measure;

      btran(cost, y_);

      int enter = -1, dir = 0;
      pick_entering(cost, y_, enter, dir);

      if (enter < 0) {
        if (!phase1) return extract_optimal();
        // Phase-1 optimum. Residual violations inside the feasibility
        // tolerance are accepted; anything larger must certify as a Farkas
        // ray or the factorization is refreshed and the solve continues.
        double residual = 0.0;
        for (int i = 0; i < m_; ++i) {
          const int j = basis_[i];
          residual = std::max(
              {residual, lower_[j] - x_[j], x_[j] - upper_[j]});
        }
        if (residual <= 10.0 * cfg_.feas_tol) {
          in_phase1_ = false;
          continue;
        }
        LpInfeasible cert;
        if (extract_farkas(y_, cert)) {
          store_basis();
          return cert;
        }
        if (++refactor_retries > 3)
          throw NumericalError("failed to certify infeasibility");
        repair_basis();
        compute_x();
        continue;
      }

      ftran(enter, w_);

      double t = 0.0;
      int leave_pos = -1;
      bool leave_to_upper = false, flip = false;
      if (!ratio_test(enter, dir, phase1, t, leave_pos, leave_to_upper, flip)) {
        if (phase1) {
          if (++refactor_retries > 3)
            throw NumericalError("phase-1 ratio test found no breakpoint");
          repair_basis();
          compute_x();
          continue;
        }
        store_basis();
        return extract_unbounded(enter, dir);
      }

      apply_step(enter, dir, t, leave_pos, leave_to_upper, flip);

      if (!flip && ++pivots_since_refactor_ >= cfg_.refactor_interval) {
        if (!factorize()) repair_basis();
        compute_x();
      }
    }
  }

private:
  LinearProgram& lp_;
  const LpConfig& cfg_;
  int m_ = 0, n_ = 0, ntot_ = 0;
  long max_iterations_ = 0;
  std::vector<double> lower_, upper_, rhs_, inv_scale_;
  std::vector<int> basis_;
  std::vector<ColStatus> status_;
  std::vector<int> basis_pos_; // column -> basis slot, -1 if nonbasic
  std::vector<double> binv_;   // m x m, column-major
  std::vector<double> x_;      // all columns
  std::vector<double> y_, w_;
  bool bland_ = false;
  bool in_phase1_ = false;
  double last_measure_[2] = {kInf, kInf};
  int stall_count_ = 0;
  long pivots_since_refactor_ = 0;

  double* binv_col(int c) { return binv_.data() + static_cast<std::size_t>(c) * m_; }

  void slack_basis() {
    basis_.resize(m_);
    status_.assign(ntot_, ColStatus::AtLower);
    for (int j = 0; j < ntot_; ++j) {
      if (lower_[j] == -kInf)
        status_[j] = upper_[j] == kInf ? ColStatus::FreeZero : ColStatus::AtUpper;
    }
    for (int r = 0; r < m_; ++r) {
      basis_[r] = n_ + r;
      status_[n_ + r] = ColStatus::Basic;
    }
  }

  // Drops linearly dependent basis members, fills the freed row slots with
  // their slacks, and refactorizes. Keeps most of the basis so phase 1 does
  // not restart from scratch.
  void repair_basis() {
    std::vector<double> t(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int c = 0; c < m_; ++c)
      for_col(basis_[c], [&](int r, double v) { t[static_cast<std::size_t>(r) * m_ + c] = v; });
    std::vector<bool> row_used(m_, false);
    std::vector<bool> col_kept(m_, false);
    for (int c = 0; c < m_; ++c) {
      int piv = -1;
      double best = 1e-9;
      for (int r = 0; r < m_; ++r) {
        if (row_used[r]) continue;
        double cand = std::abs(t[static_cast<std::size_t>(r) * m_ + c]);
        if (cand > best) {
          best = cand;
          piv = r;
        }
      }
      if (piv < 0) continue; // dependent on the kept columns
      col_kept[c] = true;
      row_used[piv] = true;
      double* prow = t.data() + static_cast<std::size_t>(piv) * m_;
      const double d = 1.0 / prow[c];
      for (int j = 0; j < m_; ++j) prow[j] *= d;
      for (int r = 0; r < m_; ++r) {
        if (r == piv) continue;
        double* row = t.data() + static_cast<std::size_t>(r) * m_;
        const double f = row[c];
        if (f != 0.0) kernels::axpy(-f, prow, row, m_);
      }
    }

    std::vector<int> repaired;
    repaired.reserve(m_);
    for (int c = 0; c < m_; ++c) {
      if (col_kept[c]) {
        repaired.push_back(basis_[c]);
      } else {
        const int j = basis_[c];
        status_[j] = nonbasic_status(j, ColStatus::AtLower);
      }
    }
    for (int r = 0; r < m_; ++r)
      if (!row_used[r]) {
        repaired.push_back(n_ + r);
        status_[n_ + r] = ColStatus::Basic;
      }
    basis_ = std::move(repaired);
    basis_pos_.assign(ntot_, -1);
    for (int r = 0; r < m_; ++r) basis_pos_[basis_[r]] = r;
    if (!factorize()) {
      slack_basis();
      basis_pos_.assign(ntot_, -1);
      for (int r = 0; r < m_; ++r) basis_pos_[basis_[r]] = r;
      if (!factorize()) throw NumericalError("singular slack basis");
    }
  }

  void init_basis() {
    if (lp_.basis_cols_ == n_ && lp_.basis_rows_ >= 0 && lp_.basis_rows_ <= m_) {
      basis_ = lp_.basis_;
      status_ = lp_.status_;
      status_.resize(ntot_, ColStatus::AtLower);
      // Rows added since the stored basis: their slacks enter the basis.
      for (int r = lp_.basis_rows_; r < m_; ++r) {
        basis_.push_back(n_ + r);
        status_[n_ + r] = ColStatus::Basic;
      }
      // A stored nonbasic status can be stale after bound changes.
      for (int j = 0; j < ntot_; ++j) {
        if (status_[j] == ColStatus::Basic) continue;
        status_[j] = nonbasic_status(j, status_[j]);
      }
    } else {
      slack_basis();
    }
    basis_pos_.assign(ntot_, -1);
    for (int r = 0; r < m_; ++r) basis_pos_[basis_[r]] = r;
  }

  ColStatus nonbasic_status(int j, ColStatus prev) const {
    const double l = lower_[j], u = upper_[j];
    if (prev == ColStatus::AtLower && l != -kInf) return ColStatus::AtLower;
    if (prev == ColStatus::AtUpper && u != kInf) return ColStatus::AtUpper;
    if (l != -kInf) return ColStatus::AtLower;
    if (u != kInf) return ColStatus::AtUpper;
    return ColStatus::FreeZero;
  }

  double nonbasic_value(int j) const {
    switch (status_[j]) {
      case ColStatus::AtLower:
        return lower_[j];
      case ColStatus::AtUpper:
        return upper_[j];
      default:
        return 0.0;
    }
  }

  // Dense column j of the standard-form matrix (row-scaled) applied to an
  // accumulator.
  template <typename Fn>
  void for_col(int j, const Fn& fn) const {
    if (j < n_) {
      for (const auto& [r, v] : lp_.col_entries_[j]) fn(r, v * inv_scale_[r]);
    } else {
      fn(j - n_, 1.0);
    }
  }

  bool factorize() {
    // Row-major scratch inversion, transposed into column-major at the end.
    std::vector<double> a(static_cast<std::size_t>(m_) * m_, 0.0);
    std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int c = 0; c < m_; ++c) {
      for_col(basis_[c], [&](int r, double v) { a[static_cast<std::size_t>(r) * m_ + c] = v; });
      inv[static_cast<std::size_t>(c) * m_ + c] = 1.0;
    }
    for (int k = 0; k < m_; ++k) {
      int piv = k;
      double best = std::abs(a[static_cast<std::size_t>(k) * m_ + k]);
      for (int i = k + 1; i < m_; ++i) {
        double cand = std::abs(a[static_cast<std::size_t>(i) * m_ + k]);
        if (cand > best) {
          best = cand;
          piv = i;
        }
      }
      if (best < 1e-12) return false;
      if (piv != k) {
        for (int c = 0; c < m_; ++c) {
          std::swap(a[static_cast<std::size_t>(piv) * m_ + c], a[static_cast<std::size_t>(k) * m_ + c]);
          std::swap(inv[static_cast<std::size_t>(piv) * m_ + c], inv[static_cast<std::size_t>(k) * m_ + c]);
        }
      }
      double* arow = a.data() + static_cast<std::size_t>(k) * m_;
      double* irow = inv.data() + static_cast<std::size_t>(k) * m_;
      const double d = 1.0 / arow[k];
      for (int c = 0; c < m_; ++c) {
        arow[c] *= d;
        irow[c] *= d;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == k) continue;
        const double f = a[static_cast<std::size_t>(i) * m_ + k];
        if (f == 0.0) continue;
        kernels::axpy(-f, arow, a.data() + static_cast<std::size_t>(i) * m_, m_);
        kernels::axpy(-f, irow, inv.data() + static_cast<std::size_t>(i) * m_, m_);
      }
    }
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (int c = 0; c < m_; ++c)
        binv_col(c)[i] = inv[static_cast<std::size_t>(i) * m_ + c];
    pivots_since_refactor_ = 0;
    return true;
  }

  void compute_x() {
    x_.assign(ntot_, 0.0);
    std::vector<double> r = rhs_;
    for (int j = 0; j < ntot_; ++j) {
      if (status_[j] == ColStatus::Basic) continue;
      const double v = nonbasic_value(j);
      x_[j] = v;
      if (v != 0.0) for_col(j, [&](int row, double c) { r[row] -= c * v; });
    }
    std::vector<double> xb(m_, 0.0);
    for (int row = 0; row < m_; ++row)
      if (r[row] != 0.0) kernels::axpy(r[row], binv_col(row), xb.data(), m_);
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
  }

  // Fills phase-appropriate costs; returns true while running phase 1.
  // The phase switch has hysteresis (enter above 10x the feasibility
  // tolerance, leave below a tenth of it) so Harris-step drift cannot flap
  // between the phases.
  bool build_costs(std::vector<double>& cost) {
    double max_violation = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      max_violation = std::max(
          {max_violation, lower_[j] - x_[j], x_[j] - upper_[j]});
    }
    if (!in_phase1_ && max_violation > 10.0 * cfg_.feas_tol) in_phase1_ = true;
    if (in_phase1_ && max_violation <= 0.1 * cfg_.feas_tol) in_phase1_ = false;

    std::fill(cost.begin(), cost.end(), 0.0);
    if (in_phase1_) {
      const double tol = 0.1 * cfg_.feas_tol;
      for (int i = 0; i < m_; ++i) {
        const int j = basis_[i];
        if (x_[j] < lower_[j] - tol)
          cost[j] = -1.0;
        else if (x_[j] > upper_[j] + tol)
          cost[j] = 1.0;
      }
    } else {
      for (int j = 0; j < n_; ++j) cost[j] = lp_.obj_[j];
    }
    return in_phase1_;
  }

  void btran(const std::vector<double>& cost, std::vector<double>& y) {
    std::vector<double> cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost[basis_[i]];
    for (int r = 0; r < m_; ++r) y[r] = kernels::dot(binv_col(r), cb.data(), m_);
  }

  double price(int j, const std::vector<double>& cost, const std::vector<double>& y) const {
    double r = 0.0;
    for_col(j, [&](int row, double v) { r += v * y[row]; });
    return cost[j] - r;
  }

  void pick_entering(const std::vector<double>& cost, const std::vector<double>& y,
                     int& enter, int& dir) {
    enter = -1;
    dir = 0;
    double best = cfg_.opt_tol;
    for (int j = 0; j < ntot_; ++j) {
      if (status_[j] == ColStatus::Basic) continue;
      if (lower_[j] == upper_[j]) continue; // fixed columns never enter
      const double d = price(j, cost, y);
      double score = 0.0;
      int cand_dir = 0;
      switch (status_[j]) {
        case ColStatus::AtLower:
          if (d < -cfg_.opt_tol) {
            score = -d;
            cand_dir = 1;
          }
          break;
        case ColStatus::AtUpper:
          if (d > cfg_.opt_tol) {
            score = d;
            cand_dir = -1;
          }
          break;
        case ColStatus::FreeZero:
          if (std::abs(d) > cfg_.opt_tol) {
            score = std::abs(d);
            cand_dir = d < 0 ? 1 : -1;
          }
          break;
        default:
          break;
      }
      if (cand_dir == 0) continue;
      if (bland_) {
        enter = j;
        dir = cand_dir;
        return;
      }
      if (score > best) {
        best = score;
        enter = j;
        dir = cand_dir;
      }
    }
  }

  void ftran(int q, std::vector<double>& w) {
    std::fill(w.begin(), w.end(), 0.0);
    for_col(q, [&](int row, double v) { kernels::axpy(v, binv_col(row), w.data(), m_); });
  }

  // Returns false when no breakpoint bounds the step (unbounded direction).
  // Harris two-pass test: pass one finds the step every blocker tolerates
  // after relaxing its bound by half the feasibility tolerance; pass two
  // picks the largest pivot among blockers whose exact breakpoint fits under
  // that cap (smallest column index on ties). Under Bland's rule the plain
  // minimum-step smallest-index variant runs instead.
  bool ratio_test(int q, int dir, bool phase1, double& t_out, int& leave_pos,
                  bool& leave_to_upper, bool& flip) {
    leave_pos = -1;
    leave_to_upper = false;
    flip = false;

    auto breakpoint = [&](int i, double& ti, bool& to_upper) {
      const double wi = w_[i];
      if (std::abs(wi) <= cfg_.zero_pivot) return false;
      const int j = basis_[i];
      const double delta = dir * wi; // basic moves by -delta * t
      const double xi = x_[j];
      const double li = lower_[j], ui = upper_[j];
      const bool below = phase1 && xi < li - 0.1 * cfg_.feas_tol;
      const bool above = phase1 && xi > ui + 0.1 * cfg_.feas_tol;
      double target;
      if (delta > 0) { // basic decreasing
        if (below) return false;
        target = above ? ui : li;
        to_upper = above;
        if (target == -kInf) return false;
      } else { // basic increasing
        if (above) return false;
        target = below ? li : ui;
        to_upper = !below;
        if (target == kInf) return false;
      }
      ti = (xi - target) / delta;
      if (ti < 0.0) ti = 0.0;
      return true;
    };

    double t = kInf;
    const double slack = 0.05 * cfg_.feas_tol;
    if (!bland_) {
      double t_cap = kInf;
      for (int i = 0; i < m_; ++i) {
        double ti;
        bool to_upper;
        if (!breakpoint(i, ti, to_upper)) continue;
        t_cap = std::min(t_cap, ti + slack / std::abs(dir * w_[i]));
      }
      if (t_cap < kInf) {
        double best_pivot = 0.0;
        for (int i = 0; i < m_; ++i) {
          double ti;
          bool to_upper;
          if (!breakpoint(i, ti, to_upper) || ti > t_cap) continue;
          const double piv = std::abs(w_[i]);
          if (piv > best_pivot + 1e-12 ||
              (std::abs(piv - best_pivot) <= 1e-12 && leave_pos >= 0 &&
               basis_[i] < basis_[leave_pos])) {
            best_pivot = piv;
            leave_pos = i;
            leave_to_upper = to_upper;
            t = ti;
          }
        }
      }
    } else {
      for (int i = 0; i < m_; ++i) {
        double ti;
        bool to_upper;
        if (!breakpoint(i, ti, to_upper)) continue;
        if (ti < t - 1e-12 ||
            (ti <= t + 1e-12 && leave_pos >= 0 && basis_[i] < basis_[leave_pos])) {
          t = ti;
          leave_pos = i;
          leave_to_upper = to_upper;
        }
      }
    }

    const double span = upper_[q] - lower_[q];
    if (status_[q] != ColStatus::FreeZero && span < t - 1e-12) {
      t = span;
      leave_pos = -1;
      flip = true;
    }

    if (t == kInf) return false;
    t_out = t;
    return true;
  }

  void apply_step(int q, int dir, double t, int leave_pos, bool leave_to_upper,
                  bool flip) {
    if (t != 0.0) {
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= dir * t * w_[i];
      x_[q] += dir * t;
    }
    if (flip) {
      status_[q] = dir > 0 ? ColStatus::AtUpper : ColStatus::AtLower;
      x_[q] = nonbasic_value(q);
      return;
    }
    const int leaving = basis_[leave_pos];
    status_[leaving] = leave_to_upper ? ColStatus::AtUpper : ColStatus::AtLower;
    x_[leaving] = nonbasic_value(leaving);
    status_[q] = ColStatus::Basic;
    basis_[leave_pos] = q;
    basis_pos_[leaving] = -1;
    basis_pos_[q] = leave_pos;
    update_binv(leave_pos);
  }

  void update_binv(int p) {
    const double wp = w_[p];
    for (int c = 0; c < m_; ++c) {
      double* col = binv_col(c);
      const double f = col[p] / wp;
      if (f == 0.0) continue;
      kernels::axpy(-f, w_.data(), col, m_);
      col[p] = f;
    }
  }

  void store_basis() {
    lp_.basis_ = basis_;
    lp_.status_ = status_;
    lp_.basis_rows_ = m_;
    lp_.basis_cols_ = n_;
    lp_.binv_cache_ = binv_;
    lp_.binv_rows_ = m_;
  }

  LpOutcome extract_optimal() {
    store_basis();
    LpOptimal out;
    out.primal.assign(x_.begin(), x_.begin() + n_);
    out.duals.resize(m_);
    for (int r = 0; r < m_; ++r) out.duals[r] = y_[r] * inv_scale_[r];
    out.reduced_costs.resize(n_);
    for (int j = 0; j < n_; ++j) {
      double r = 0.0;
      for (const auto& [row, v] : lp_.col_entries_[j]) r += v * out.duals[row];
      out.reduced_costs[j] = lp_.obj_[j] - r;
    }
    out.objective = kernels::dot(lp_.obj_.data(), out.primal.data(), n_);
    return out;
  }

  LpOutcome extract_unbounded(int q, int dir) {
    LpUnbounded out;
    out.ray.assign(n_, 0.0);
    if (q < n_) out.ray[q] = dir;
    for (int i = 0; i < m_; ++i) {
      if (std::abs(w_[i]) <= cfg_.zero_pivot) continue;
      if (basis_[i] < n_) out.ray[basis_[i]] = -dir * w_[i];
    }
    return out;
  }

  // Validates the phase-1 multipliers as a Farkas certificate; the y'Ax
  // bound-folded value must stay strictly positive.
  bool extract_farkas(const std::vector<double>& y, LpInfeasible& out) {
    double scale = 0.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    if (scale <= 0.0) return false;
    std::vector<double> ray(m_);
    for (int r = 0; r < m_; ++r) ray[r] = y[r] / scale;

    double value = 0.0;
    for (int r = 0; r < m_; ++r) value += ray[r] * rhs_[r];
    for (int j = 0; j < ntot_; ++j) {
      double rj = 0.0;
      double colnorm = 0.0;
      for_col(j, [&](int row, double v) {
        rj += v * ray[row];
        colnorm += std::abs(v);
      });
      // Prices smaller than the column-scaled noise floor count as zero
      // against an infinite bound; finite bounds fold in exactly.
      const double rtol = 1e-9 * (1.0 + colnorm);
      if (rj > 0.0) {
        if (upper_[j] == kInf) {
          if (rj > rtol) return false;
        } else {
          value -= rj * upper_[j];
        }
      } else if (rj < 0.0) {
        if (lower_[j] == -kInf) {
          if (rj < -rtol) return false;
        } else {
          value -= rj * lower_[j];
        }
      }
    }
    if (!(value > 1e-8)) return false;
    // Report multipliers of the original (unscaled) rows, renormalized.
    double rescale = 0.0;
    for (int r = 0; r < m_; ++r) {
      ray[r] *= inv_scale_[r];
      rescale = std::max(rescale, std::abs(ray[r]));
    }
    for (double& v : ray) v /= rescale;
    out.farkas = std::move(ray);
    out.certificate_value = value;
    return true;
  }
};

LpOutcome LinearProgram::solve(const LpConfig& cfg) {
  if (num_rows() == 0) {
    // Pure bound problem.
    LpOptimal out;
    out.primal.resize(num_columns());
    out.reduced_costs = obj_;
    for (int j = 0; j < num_columns(); ++j) {
      const double c = obj_[j];
      if (c > 0.0) {
        if (lower_[j] == -kInf) return LpUnbounded{unit_ray(j, -1.0)};
        out.primal[j] = lower_[j];
      } else if (c < 0.0) {
        if (upper_[j] == kInf) return LpUnbounded{unit_ray(j, 1.0)};
        out.primal[j] = upper_[j];
      } else {
        out.primal[j] = lower_[j] != -kInf ? lower_[j] : (upper_[j] != kInf ? upper_[j] : 0.0);
      }
      out.objective += c * out.primal[j];
    }
    return out;
  }
  SimplexSolver solver(*this, cfg);
  return solver.run();
}

std::vector<double> LinearProgram::unit_ray(int col, double dir) const {
  std::vector<double> ray(num_columns(), 0.0);
  ray[col] = dir;
  return ray;
}

} // namespace hndpv
