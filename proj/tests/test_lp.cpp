#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "persuasion/lp.hpp"
#include "persuasion/rng.hpp"
#include "persuasion/sampling.hpp"

using namespace persuasion;

namespace {

// Brute-force LP oracle: enumerate every choice of n_vars tight constraints
// among {equalities, inequalities-at-equality, bounds x_i = 0}, solve the
// square system, keep feasible solutions, take the best objective.
double vertex_enumeration_optimum(const LinearProgram& lp) {
  const int n = lp.n_vars;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (size_t i = 0; i < lp.eq_lhs.size(); ++i) {
    rows.push_back(lp.eq_lhs[i]);
    rhs.push_back(lp.eq_rhs[i]);
  }
  for (size_t i = 0; i < lp.ge_lhs.size(); ++i) {
    rows.push_back(lp.ge_lhs[i]);
    rhs.push_back(lp.ge_rhs[i]);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(static_cast<size_t>(n), 0.0);
    e[static_cast<size_t>(j)] = 1.0;
    rows.push_back(std::move(e));
    rhs.push_back(0.0);
  }
  const int total = static_cast<int>(rows.size());
  double best = -std::numeric_limits<double>::infinity();

  std::vector<int> pick(static_cast<size_t>(n));
  auto feasible = [&](const std::vector<double>& x) {
    for (size_t i = 0; i < lp.eq_lhs.size(); ++i) {
      double dot = 0.0;
      for (int j = 0; j < n; ++j) dot += lp.eq_lhs[i][static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
      if (std::abs(dot - lp.eq_rhs[i]) > 1e-7) return false;
    }
    for (size_t i = 0; i < lp.ge_lhs.size(); ++i) {
      double dot = 0.0;
      for (int j = 0; j < n; ++j) dot += lp.ge_lhs[i][static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
      if (dot < lp.ge_rhs[i] - 1e-7) return false;
    }
    for (double xi : x)
      if (xi < -1e-9) return false;
    return true;
  };

  // Lexicographic combinations of size n from [0, total).
  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  while (true) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i = 0; i < n; ++i) {
      a.push_back(rows[static_cast<size_t>(idx[static_cast<size_t>(i)])]);
      b.push_back(rhs[static_cast<size_t>(idx[static_cast<size_t>(i)])]);
    }
    std::vector<double> x;
    if (test_helpers::solve_linear(a, b, x) && feasible(x)) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += lp.c[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
      best = std::max(best, obj);
    }
    int i = n - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == total - n + i) --i;
    if (i < 0) break;
    ++idx[static_cast<size_t>(i)];
    for (int j = i + 1; j < n; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
  return best;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("textbook maximization with upper bounds") {
  // max 3x + 2y subject to x + y <= 4, x <= 2: optimum (2, 2) with value 10.
  LinearProgram lp;
  lp.n_vars = 2;
  lp.c = {3.0, 2.0};
  lp.ge_lhs = {{-1.0, -1.0}, {-1.0, 0.0}};
  lp.ge_rhs = {-4.0, -2.0};
  LpSolution sol = solve_lp(lp);
  CHECK(sol.objective == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(sol.x[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.x[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.kkt_residual <= 1e-7);
}

TEST_CASE("equalities and inequalities combine") {
  // max x1 + 2 x2 on the segment x1 + x2 = 1 with x2 >= x1: optimum (0, 1).
  LinearProgram lp;
  lp.n_vars = 2;
  lp.c = {1.0, 2.0};
  lp.eq_lhs = {{1.0, 1.0}};
  lp.eq_rhs = {1.0};
  lp.ge_lhs = {{-1.0, 1.0}};
  lp.ge_rhs = {0.0};
  LpSolution sol = solve_lp(lp);
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.x[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("negative right-hand sides are normalized") {
  // -x1 - x2 = -1 is the unit segment again.
  LinearProgram lp;
  lp.n_vars = 2;
  lp.c = {1.0, 0.5};
  lp.eq_lhs = {{-1.0, -1.0}};
  lp.eq_rhs = {-1.0};
  LpSolution sol = solve_lp(lp);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible programs throw") {
  LinearProgram lp;
  lp.n_vars = 2;
  lp.c = {1.0, 1.0};
  lp.eq_lhs = {{1.0, 1.0}};
  lp.eq_rhs = {1.0};
  lp.ge_lhs = {{1.0, -1.0}};
  lp.ge_rhs = {2.0};  // x1 - x2 <= 1 on the segment, so >= 2 is empty
  CHECK_THROWS_AS(solve_lp(lp), InfeasibleProgram);

  LinearProgram neg;
  neg.n_vars = 1;
  neg.c = {1.0};
  neg.eq_lhs = {{1.0}};
  neg.eq_rhs = {-1.0};  // x = -1 with x >= 0
  CHECK_THROWS_AS(solve_lp(neg), InfeasibleProgram);
}

TEST_CASE("unbounded programs throw") {
  LinearProgram lp;
  lp.n_vars = 2;
  lp.c = {1.0, 0.0};
  lp.ge_lhs = {{1.0, 0.0}};
  lp.ge_rhs = {1.0};
  CHECK_THROWS_AS(solve_lp(lp), UnboundedProgram);
}

TEST_CASE("matches vertex enumeration on random bounded programs") {
  RngSpec rng{771, 1};
  int trial_id = 0;
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 40; ++trial) {
      auto eng = rng.derive(static_cast<uint64_t>(trial_id++)).make_engine();
      LinearProgram lp;
      lp.n_vars = n;
      lp.c.resize(static_cast<size_t>(n));
      for (double& cj : lp.c) cj = 2.0 * uniform01(eng) - 1.0;
      // Simplex base keeps the feasible set bounded and nonempty.
      lp.eq_lhs = {std::vector<double>(static_cast<size_t>(n), 1.0)};
      lp.eq_rhs = {1.0};
      std::vector<double> interior = simplex_uniform(eng, n);
      for (int extra = 0; extra < 2; ++extra) {
        std::vector<double> row(static_cast<size_t>(n));
        double dot = 0.0;
        for (int j = 0; j < n; ++j) {
          row[static_cast<size_t>(j)] = 2.0 * uniform01(eng) - 1.0;
          dot += row[static_cast<size_t>(j)] * interior[static_cast<size_t>(j)];
        }
        // Right-hand side below the interior point's value keeps it feasible.
        lp.ge_lhs.push_back(std::move(row));
        lp.ge_rhs.push_back(dot - 0.25 * uniform01(eng));
      }
      LpSolution sol = solve_lp(lp);
      double oracle = vertex_enumeration_optimum(lp);
      CHECK(sol.objective == doctest::Approx(oracle).epsilon(1e-7));
      CHECK(sol.kkt_residual <= 1e-7);
    }
  }
}

}  // TEST_SUITE
