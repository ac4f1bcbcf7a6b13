#pragma once

#include <iosfwd>
#include <variant>
#include <vector>

#include "hndpv/errors.hpp"

namespace hndpv {

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs; // (column, value), column ascending not required
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

struct LpConfig {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  double zero_pivot = 1e-10;
  int refactor_interval = 200;
  long max_iterations = 0; // 0 = scale with problem size
};

struct LpOptimal {
  std::vector<double> primal;        // structural column values
  std::vector<double> duals;         // one multiplier per row
  std::vector<double> reduced_costs; // structural columns
  double objective = 0.0;
};

// Farkas certificate: multipliers y per row such that, after folding in the
// column bounds, y' * rhs exceeds what any feasible point can reach.
struct LpInfeasible {
  std::vector<double> farkas;
  double certificate_value = 0.0;
};

struct LpUnbounded {
  std::vector<double> ray; // structural direction with negative cost
};

using LpOutcome = std::variant<LpOptimal, LpInfeasible, LpUnbounded>;

const LpOptimal* lp_optimal(const LpOutcome& o);
const LpInfeasible* lp_infeasible(const LpOutcome& o);
const LpUnbounded* lp_unbounded(const LpOutcome& o);

// Minimization LP over bounded columns with incremental row addition.
// solve() warm-starts from the previous basis when only rows/bounds changed;
// results match a cold solve within the configured tolerances.
class LinearProgram {
public:
  int add_column(double lower, double upper, double objective);
  void set_bounds(int col, double lower, double upper);
  void set_objective_coeff(int col, double value);
  int add_row(LpRow row);
  void add_rows(std::vector<LpRow> rows);

  int num_columns() const { return static_cast<int>(obj_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  double lower_bound(int col) const { return lower_[col]; }
  double upper_bound(int col) const { return upper_[col]; }
  double objective_coeff(int col) const { return obj_[col]; }
  const LpRow& row(int r) const { return rows_[r]; }

  LpOutcome solve(const LpConfig& cfg = {});

  // Discard the warm-start basis; the next solve starts cold.
  void reset_basis();

  // Debug dump in LP interchange text layout (not bit-contractual).
  void write_lp_format(std::ostream& os) const;

private:
  friend class SimplexSolver;

  std::vector<double> unit_ray(int col, double dir) const;

  std::vector<double> lower_, upper_, obj_;
  std::vector<LpRow> rows_;
  // Structural columns as (row, coeff) lists; rows only grow, so entries
  // stay sorted by row.
  std::vector<std::vector<std::pair<int, double>>> col_entries_;

  // Warm-start state, including the cached basis inverse. The inverse stays
  // valid across bound changes; row additions invalidate it.
  enum class ColStatus : unsigned char { Basic, AtLower, AtUpper, FreeZero };
  std::vector<int> basis_;
  std::vector<ColStatus> status_;
  std::vector<double> binv_cache_;
  int binv_rows_ = -1;  // row count the cached inverse was built for
  int basis_rows_ = -1; // row count the basis was built for, -1 = none
  int basis_cols_ = -1;
};

} // namespace hndpv
