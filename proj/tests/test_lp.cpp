#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "hndpv/lp.hpp"
#include "hndpv/rng.hpp"

using namespace hndpv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double row_activity(const LpRow& row, const std::vector<double>& x) {
  double v = 0.0;
  for (const auto& [col, c] : row.coeffs) v += c * x[col];
  return v;
}

// Residual of primal feasibility over rows and bounds.
double primal_residual(const LinearProgram& lp, const std::vector<double>& x) {
  double r = 0.0;
  for (int i = 0; i < lp.num_columns(); ++i) {
    if (lp.lower_bound(i) != -kInf) r = std::max(r, lp.lower_bound(i) - x[i]);
    if (lp.upper_bound(i) != kInf) r = std::max(r, x[i] - lp.upper_bound(i));
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    double a = row_activity(lp.row(i), x);
    switch (lp.row(i).sense) {
      case RowSense::LessEqual: r = std::max(r, a - lp.row(i).rhs); break;
      case RowSense::GreaterEqual: r = std::max(r, lp.row(i).rhs - a); break;
      case RowSense::Equal: r = std::max(r, std::abs(a - lp.row(i).rhs)); break;
    }
  }
  return r;
}

void check_optimal_certificates(const LinearProgram& lp, const LpOptimal& opt) {
  CHECK(primal_residual(lp, opt.primal) <= 1e-7);
  // Dual sign convention under minimization.
  for (int r = 0; r < lp.num_rows(); ++r) {
    if (lp.row(r).sense == RowSense::LessEqual) CHECK(opt.duals[r] <= 1e-7);
    if (lp.row(r).sense == RowSense::GreaterEqual) CHECK(opt.duals[r] >= -1e-7);
    // Complementary slackness.
    double slack = lp.row(r).rhs - row_activity(lp.row(r), opt.primal);
    CHECK(std::abs(opt.duals[r] * slack) <=
          1e-6 * (1.0 + std::abs(opt.objective)));
  }
  // Reduced-cost signs against resting bounds.
  for (int j = 0; j < lp.num_columns(); ++j) {
    double x = opt.primal[j];
    double d = opt.reduced_costs[j];
    bool at_lower = lp.lower_bound(j) != -kInf && x <= lp.lower_bound(j) + 1e-6;
    bool at_upper = lp.upper_bound(j) != kInf && x >= lp.upper_bound(j) - 1e-6;
    if (at_lower && !at_upper) CHECK(d >= -1e-6);
    if (at_upper && !at_lower) CHECK(d <= 1e-6);
    if (!at_lower && !at_upper) CHECK(std::abs(d) <= 1e-6 * (1.0 + std::abs(opt.objective)));
  }
  // Strong duality.
  double dual_obj = 0.0;
  for (int r = 0; r < lp.num_rows(); ++r) dual_obj += opt.duals[r] * lp.row(r).rhs;
  for (int j = 0; j < lp.num_columns(); ++j)
    dual_obj += opt.reduced_costs[j] * opt.primal[j];
  CHECK(dual_obj ==
        doctest::Approx(opt.objective).epsilon(1e-6).scale(1.0 + std::abs(opt.objective)));
}

} // namespace

TEST_CASE("bounded single-variable minimum") {
  LinearProgram lp;
  int x = lp.add_column(0, 10, 1.0);
  lp.add_row({{{x, 1.0}}, RowSense::GreaterEqual, 3.0});
  auto out = lp.solve();
  auto* opt = lp_optimal(out);
  REQUIRE(opt);
  CHECK(opt->primal[x] == doctest::Approx(3.0));
  CHECK(opt->objective == doctest::Approx(3.0));
  check_optimal_certificates(lp, *opt);
}

TEST_CASE("contradictory rows produce a Farkas ray over both") {
  LinearProgram lp;
  int x = lp.add_column(-kInf, kInf, 0.0);
  lp.add_row({{{x, 1.0}}, RowSense::LessEqual, 1.0});
  lp.add_row({{{x, 1.0}}, RowSense::GreaterEqual, 2.0});
  auto out = lp.solve();
  auto* inf = lp_infeasible(out);
  REQUIRE(inf);
  CHECK(inf->certificate_value > 1e-8);
  CHECK(std::abs(inf->farkas[0]) > 1e-9);
  CHECK(std::abs(inf->farkas[1]) > 1e-9);
}

TEST_CASE("pure feasibility problem solves to zero") {
  LinearProgram lp;
  int x = lp.add_column(0, kInf, 0.0);
  int y = lp.add_column(0, kInf, 0.0);
  lp.add_row({{{x, 1.0}, {y, 1.0}}, RowSense::Equal, 1.0});
  auto out = lp.solve();
  auto* opt = lp_optimal(out);
  REQUIRE(opt);
  CHECK(opt->objective == doctest::Approx(0.0));
  CHECK(opt->primal[x] + opt->primal[y] == doctest::Approx(1.0));
}

TEST_CASE("row addition keeps objectives monotone for minimization") {
  LinearProgram lp;
  int x = lp.add_column(0, kInf, 1.0);
  int y = lp.add_column(0, kInf, 2.0);
  lp.add_row({{{x, 1.0}, {y, 1.0}}, RowSense::GreaterEqual, 4.0});
  auto out0 = lp.solve();
  auto* opt = lp_optimal(out0);
  REQUIRE(opt);
  double obj0 = opt->objective;
  CHECK(obj0 == doctest::Approx(4.0));

  // Redundant copy: optimum unchanged.
  lp.add_row({{{x, 1.0}, {y, 1.0}}, RowSense::GreaterEqual, 4.0});
  auto out1 = lp.solve();
  auto* opt1 = lp_optimal(out1);
  REQUIRE(opt1);
  CHECK(opt1->objective == doctest::Approx(obj0));

  // Cut off the current optimum: objective must not decrease.
  lp.add_row({{{y, 1.0}}, RowSense::GreaterEqual, 1.0});
  auto out2 = lp.solve();
  auto* opt2 = lp_optimal(out2);
  REQUIRE(opt2);
  CHECK(opt2->objective >= obj0 - 1e-7);
  CHECK(opt2->objective == doctest::Approx(5.0));

  // Make it infeasible: certificate returned.
  lp.add_row({{{x, 1.0}, {y, 1.0}}, RowSense::LessEqual, 2.0});
  CHECK(lp_infeasible(lp.solve()));
}

TEST_CASE("warm start equals cold solve") {
  LinearProgram lp;
  int x = lp.add_column(0, 5, 3.0);
  int y = lp.add_column(0, 5, 1.0);
  lp.add_row({{{x, 2.0}, {y, 1.0}}, RowSense::GreaterEqual, 6.0});
  auto first = lp.solve();
  REQUIRE(lp_optimal(first));
  lp.add_row({{{x, 1.0}, {y, 3.0}}, RowSense::GreaterEqual, 6.0});
  auto warm_out = lp.solve();
  auto* warm = lp_optimal(warm_out);
  REQUIRE(warm);

  LinearProgram cold;
  cold.add_column(0, 5, 3.0);
  cold.add_column(0, 5, 1.0);
  cold.add_row({{{x, 2.0}, {y, 1.0}}, RowSense::GreaterEqual, 6.0});
  cold.add_row({{{x, 1.0}, {y, 3.0}}, RowSense::GreaterEqual, 6.0});
  auto cold_out = cold.solve();
  auto* c = lp_optimal(cold_out);
  REQUIRE(c);
  CHECK(warm->objective == doctest::Approx(c->objective).epsilon(1e-7));
}

TEST_CASE("unbounded direction is reported") {
  LinearProgram lp;
  int x = lp.add_column(0, kInf, -1.0);
  lp.add_row({{{x, -1.0}}, RowSense::LessEqual, 0.0}); // -x <= 0, always true
  auto out = lp.solve();
  auto* unb = lp_unbounded(out);
  REQUIRE(unb);
  CHECK(unb->ray[x] > 0);
}

TEST_CASE("fixed columns honored") {
  LinearProgram lp;
  int x = lp.add_column(2, 2, 5.0);
  int y = lp.add_column(0, kInf, 1.0);
  lp.add_row({{{x, 1.0}, {y, 1.0}}, RowSense::GreaterEqual, 3.0});
  auto out = lp.solve();
  auto* opt = lp_optimal(out);
  REQUIRE(opt);
  CHECK(opt->primal[x] == doctest::Approx(2.0));
  CHECK(opt->primal[y] == doctest::Approx(1.0));
  CHECK(opt->objective == doctest::Approx(11.0));
}

namespace {

struct RandomLp {
  LinearProgram lp;
  std::vector<double> feasible_point;
};

RandomLp random_feasible_lp(std::mt19937_64& gen, int cols, int rows) {
  RandomLp out;
  std::vector<double> x0(cols);
  for (int j = 0; j < cols; ++j) {
    double lo = std::floor(rng::uniform(gen, -5.0, 0.0));
    double hi = lo + std::floor(rng::uniform(gen, 1.0, 10.0));
    double c = std::floor(rng::uniform(gen, -5.0, 6.0));
    out.lp.add_column(lo, hi, c);
    x0[j] = lo + (hi - lo) * rng::uniform01(gen);
  }
  for (int r = 0; r < rows; ++r) {
    LpRow row;
    double act = 0.0;
    for (int j = 0; j < cols; ++j) {
      if (rng::uniform01(gen) < 0.4) continue;
      double c = std::floor(rng::uniform(gen, -4.0, 5.0));
      if (c == 0.0) continue;
      row.coeffs.emplace_back(j, c);
      act += c * x0[j];
    }
    if (row.coeffs.empty()) continue;
    double u = rng::uniform01(gen);
    if (u < 0.4) {
      row.sense = RowSense::LessEqual;
      row.rhs = act + rng::uniform(gen, 0.0, 3.0);
    } else if (u < 0.8) {
      row.sense = RowSense::GreaterEqual;
      row.rhs = act - rng::uniform(gen, 0.0, 3.0);
    } else {
      row.sense = RowSense::Equal;
      row.rhs = act;
    }
    out.lp.add_row(std::move(row));
  }
  out.feasible_point = std::move(x0);
  return out;
}

} // namespace

TEST_CASE("random feasible LPs satisfy duality and certificates") {
  std::mt19937_64 gen(2024);
  int optimal_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    RandomLp r = random_feasible_lp(gen, 3 + trial % 6, 2 + trial % 7);
    auto out = r.lp.solve();
    auto* opt = lp_optimal(out);
    REQUIRE(opt != nullptr); // bounded columns, feasible by construction
    check_optimal_certificates(r.lp, *opt);
    ++optimal_seen;
  }
  CHECK(optimal_seen == 60);
}

TEST_CASE("farkas rays replay against feasible siblings") {
  std::mt19937_64 gen(77);
  int infeasible_seen = 0;
  for (int trial = 0; trial < 40; ++trial) {
    RandomLp r = random_feasible_lp(gen, 4, 4);
    // Force infeasibility with a contradictory pair on a random column.
    int j = static_cast<int>(gen() % 4);
    double v = r.feasible_point[j];
    int r1 = r.lp.add_row({{{j, 1.0}}, RowSense::LessEqual, v - 1.0});
    int r2 = r.lp.add_row({{{j, 1.0}}, RowSense::GreaterEqual, v + 1.0});
    auto out = r.lp.solve();
    auto* inf = lp_infeasible(out);
    if (!inf) continue; // column bounds can already exclude [v-1, v+1]
    ++infeasible_seen;
    CHECK(inf->certificate_value > 1e-8);

    // The sibling without the contradictory pair admits feasible_point; the
    // ray priced at that point must fall short of what it claims for the
    // infeasible rhs.
    double lhs = 0.0;
    for (int row = 0; row < r.lp.num_rows(); ++row) {
      double a = row_activity(r.lp.row(row), r.feasible_point);
      lhs += inf->farkas[row] * a;
    }
    double rhs_val = 0.0;
    for (int row = 0; row < r.lp.num_rows(); ++row)
      rhs_val += inf->farkas[row] * ((row == r1) ? v - 1.0
                                    : (row == r2) ? v + 1.0
                                                  : r.lp.row(row).rhs);
    CHECK(lhs < rhs_val - 1e-10);
  }
  CHECK(infeasible_seen > 20);
}

TEST_CASE("solves are deterministic") {
  std::mt19937_64 gen(5);
  RandomLp a = random_feasible_lp(gen, 6, 8);
  std::mt19937_64 gen2(5);
  RandomLp b = random_feasible_lp(gen2, 6, 8);
  auto outa = a.lp.solve();
  auto outb = b.lp.solve();
  auto* oa = lp_optimal(outa);
  auto* ob = lp_optimal(outb);
  REQUIRE(oa);
  REQUIRE(ob);
  CHECK(oa->objective == ob->objective);
  CHECK(oa->primal == ob->primal);
}

TEST_CASE("lp text dump emits all sections") {
  LinearProgram lp;
  int x = lp.add_column(0, 10, 1.5);
  lp.add_row({{{x, 1.0}}, RowSense::GreaterEqual, 3.0});
  std::ostringstream os;
  lp.write_lp_format(os);
  std::string text = os.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
