#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "persuasion/feasible.hpp"
#include "persuasion/games.hpp"
#include "persuasion/inference.hpp"
#include "persuasion/rng.hpp"
#include "persuasion/sampling.hpp"
#include "persuasion/solvers.hpp"

using namespace persuasion;
using test_helpers::make_game;
using test_helpers::make_scheme;
using test_helpers::make_table;

namespace {

// Fixture shared with the inference suite: interior scheme, posteriors well
// inside their decision regions.
PersuasionGame fixture_game() {
  return make_game({0.5, 0.5}, {{1.0, 0.0}, {0.2, 0.9}}, {{1.0, 0.0}, {0.0, 1.0}});
}
JointScheme fixture_scheme() { return make_scheme({{0.32, 0.18}, {0.08, 0.42}}); }

// Random direction with zero row sums, scaled to unit max-norm: a tangent of
// the marginal-consistency constraints, so scheme +- h * delta stays a valid
// evaluation point for the exact oracle.
Table tangent_direction(int rows, int cols, std::mt19937_64& eng) {
  Table d(rows, cols);
  double maxabs = 0.0;
  for (int r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (int c = 0; c < cols; ++c) {
      d(r, c) = uniform01(eng) - 0.5;
      mean += d(r, c);
    }
    mean /= cols;
    for (int c = 0; c < cols; ++c) {
      d(r, c) -= mean;
      maxabs = std::max(maxabs, std::abs(d(r, c)));
    }
  }
  for (double& e : d.v) e /= maxabs;
  return d;
}

double directional(const Table& g, const Table& d) {
  double v = 0.0;
  for (size_t i = 0; i < g.v.size(); ++i) v += g.v[i] * d.v[i];
  return v;
}

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("known-commitment LP attains one half on flower games") {
  for (int n : {3, 4, 5, 6}) {
    double tau = 1.0 / (2.0 * (n - 1));
    PersuasionGame g = flower_game(n, tau);
    JointScheme scheme = solve_known_commitment_lp(g);
    CHECK(std::abs(bpr(g, scheme) - 0.5) <= 1e-6);
    CHECK(FeasibleSet(g).max_violation(scheme.x()) <= 1e-7);
  }
}

TEST_CASE("aligned utilities make full revelation optimal") {
  RngSpec rng{9090, 3};
  for (int trial = 0; trial < 8; ++trial) {
    auto eng = rng.derive(static_cast<uint64_t>(trial)).make_engine();
    Table u(4, 5);
    for (double& e : u.v) e = uniform01(eng);
    PersuasionGame g(Distribution::uniform(4), u, u);
    JointScheme scheme = solve_known_commitment_lp(g);
    double value = 0.0;
    for (int w = 0; w < 4; ++w)
      for (int a = 0; a < 5; ++a) value += scheme(w, a) * g.sender_payoff(w, a);
    double oracle = 0.0;
    for (int w = 0; w < 4; ++w) {
      double best = -1.0;
      for (int a = 0; a < 5; ++a) best = std::max(best, u(w, a));
      oracle += g.prior()[w] * best;
    }
    CHECK(value == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("single-action games are trivial for the LP") {
  PersuasionGame g = make_game({0.3, 0.7}, {{0.4}, {0.9}}, {{1.0}, {0.2}});
  JointScheme scheme = solve_known_commitment_lp(g);
  double value = 0.0;
  for (int w = 0; w < 2; ++w) value += scheme(w, 0) * g.sender_payoff(w, 0);
  CHECK(value == doctest::Approx(0.3 * 0.4 + 0.7 * 0.9).epsilon(1e-12));
}

TEST_CASE("gradient estimator matches finite differences of the exact value") {
  struct Instance {
    PersuasionGame game;
    JointScheme scheme;
  };
  std::vector<Instance> instances;
  instances.push_back({fixture_game(), fixture_scheme()});
  instances.push_back({make_game({0.6, 0.4}, {{0.7, 0.1, 0.9}, {0.15, 0.8, 0.3}},
                                 {{1.0, 0.0, 0.3}, {0.0, 1.0, 0.45}}),
                       make_scheme({{0.45, 0.15}, {0.1, 0.3}})});

  RngSpec rng{424242, 0};
  const double h = 1e-4;
  uint64_t stream = 0;
  for (size_t inst = 0; inst < instances.size(); ++inst) {
    const PersuasionGame& g = instances[inst].game;
    const JointScheme& scheme = instances[inst].scheme;
    for (long long k : {1, 2, 3}) {
      GradientEstimate est =
          mvg_gradient(g, scheme, k, 300000, rng.derive(1000 + stream));
      auto eng = rng.derive(2000 + stream).make_engine();
      ++stream;
      for (int dir = 0; dir < 4; ++dir) {
        Table d = tangent_direction(scheme.n_states(), scheme.n_signals(), eng);
        Table up = scheme.x(), dn = scheme.x();
        for (size_t i = 0; i < d.v.size(); ++i) {
          up.v[i] += h * d.v[i];
          dn.v[i] -= h * d.v[i];
        }
        double fd = (ir_k_exact(g, JointScheme(up), k) - ir_k_exact(g, JointScheme(dn), k)) / (2.0 * h);
        double got = directional(est.gradient, d);
        CHECK(std::abs(got - fd) <= std::max(0.08 * std::abs(fd), 1e-3));
      }
    }
  }
}

TEST_CASE("gradient at a revealing scheme reduces to the direct utility term") {
  // Posteriors are point masses far from the decision boundary and k is
  // large enough that one contaminated count cannot flip any action, so the
  // count-shift and seed pieces cancel along marginal-preserving directions.
  PersuasionGame g = make_game({0.5, 0.5}, {{0.9, 0.1}, {0.2, 0.8}}, {{1.0, 0.0}, {0.0, 1.0}});
  JointScheme scheme = make_scheme({{0.5, 0.0}, {0.0, 0.5}});
  GradientEstimate est = mvg_gradient(g, scheme, 25, 100000, RngSpec{7171, 0});
  Table direct(2, 2);
  for (int w = 0; w < 2; ++w) {
    direct(w, 0) = g.sender_payoff(w, 0);  // signal 0 always answered with 0
    direct(w, 1) = g.sender_payoff(w, 1);
  }
  auto eng = RngSpec{7171, 9}.make_engine();
  for (int dir = 0; dir < 4; ++dir) {
    Table d = tangent_direction(2, 2, eng);
    CHECK(std::abs(directional(est.gradient, d) - directional(direct, d)) <= 5e-3);
  }
}

TEST_CASE("gradient estimation is deterministic and stream-sensitive") {
  PersuasionGame g = fixture_game();
  JointScheme scheme = fixture_scheme();
  GradientEstimate a = mvg_gradient(g, scheme, 3, 50000, RngSpec{11, 4});
  GradientEstimate b = mvg_gradient(g, scheme, 3, 50000, RngSpec{11, 4});
  for (size_t i = 0; i < a.gradient.v.size(); ++i) CHECK(a.gradient.v[i] == b.gradient.v[i]);
  CHECK(a.ir_estimate == b.ir_estimate);

  GradientEstimate c = mvg_gradient(g, scheme, 3, 200000, RngSpec{11, 5});
  GradientEstimate d = mvg_gradient(g, scheme, 3, 200000, RngSpec{11, 6});
  bool identical = true;
  for (size_t i = 0; i < c.gradient.v.size(); ++i)
    if (c.gradient.v[i] != d.gradient.v[i]) identical = false;
  CHECK(!identical);
  // Independent streams estimate the same quantity.
  for (size_t i = 0; i < c.gradient.v.size(); ++i)
    CHECK(std::abs(c.gradient.v[i] - d.gradient.v[i]) <= 0.03);
}

TEST_CASE("gradient estimator rejects bad inputs") {
  PersuasionGame g = fixture_game();
  JointScheme scheme = fixture_scheme();
  CHECK_THROWS_AS(mvg_gradient(g, scheme, 0, 10, RngSpec{1, 1}), DomainViolation);
  CHECK_THROWS_AS(mvg_gradient(g, scheme, 3, 0, RngSpec{1, 1}), DomainViolation);
  // A third signal column with no mass at all.
  JointScheme dead = make_scheme({{0.5, 0.0, 0.0}, {0.5, 0.0, 0.0}});
  CHECK_THROWS_AS(mvg_gradient(g, dead, 2, 10, RngSpec{1, 1}), DegenerateColumn);
}

TEST_CASE("sgd with zero iterations returns the projected blend") {
  PersuasionGame g = flower_game(3, 0.25);
  OptimizerConfig cfg = OptimizerConfig::sgd_defaults();
  cfg.max_iters = 0;
  cfg.rng = RngSpec{77, 0};
  OptimizeResult res = sgd_optimize(g, cfg);
  CHECK(res.history.empty());
  CHECK(FeasibleSet(g).max_violation(res.scheme.x()) <= 1e-7);
  // The blend of LP and uninformative scheme keeps marginals, so projecting
  // it should essentially return it.
  JointScheme lp = solve_known_commitment_lp(g);
  Table blend(3, g.n_actions());
  for (int w = 0; w < 3; ++w)
    for (int a = 0; a < g.n_actions(); ++a)
      blend(w, a) = 0.5 * lp(w, a) + 0.5 * g.prior()[w] / g.n_actions();
  double drift = 0.0;
  for (size_t i = 0; i < blend.v.size(); ++i)
    drift = std::max(drift, std::abs(res.scheme.x().v[i] - blend.v[i]));
  // The blend may violate persuasiveness slightly; projection moves it by a
  // bounded amount only.
  CHECK(drift <= 0.2);
}

TEST_CASE("sgd runs are reproducible and stream-sensitive") {
  PersuasionGame g = flower_game(3, 0.25);
  OptimizerConfig cfg = OptimizerConfig::sgd_defaults();
  cfg.max_iters = 3;
  cfg.gradient_replicates = 200;
  cfg.k_opt = 5;
  cfg.rng = RngSpec{123, 9};
  OptimizeResult r1 = sgd_optimize(g, cfg);
  OptimizeResult r2 = sgd_optimize(g, cfg);
  REQUIRE(r1.history.size() == 3);
  for (size_t i = 0; i < r1.scheme.x().v.size(); ++i)
    CHECK(r1.scheme.x().v[i] == r2.scheme.x().v[i]);
  for (size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].objective_estimate == r2.history[i].objective_estimate);
    CHECK(r1.history[i].iter == static_cast<long long>(i + 1));
  }
  CHECK(FeasibleSet(g).max_violation(r1.scheme.x()) <= 1e-7);

  cfg.rng = RngSpec{124, 9};
  OptimizeResult r3 = sgd_optimize(g, cfg);
  bool identical = true;
  for (size_t i = 0; i < r1.scheme.x().v.size(); ++i)
    if (r1.scheme.x().v[i] != r3.scheme.x().v[i]) identical = false;
  CHECK(!identical);
}

TEST_CASE("sgd does not degrade an aligned game's revealing optimum") {
  // With u_S = u_R the LP solution is revealing and evaluation-noise free;
  // SGD should stay at that value up to estimation noise.
  Table u = make_table({{0.9, 0.2}, {0.1, 0.7}});
  PersuasionGame g(Distribution::uniform(2), u, u);
  JointScheme lp = solve_known_commitment_lp(g);
  OptimizerConfig cfg = OptimizerConfig::sgd_defaults();
  cfg.max_iters = 10;
  cfg.gradient_replicates = 300;
  cfg.k_opt = 10;
  cfg.rng = RngSpec{500, 2};
  OptimizeResult res = sgd_optimize(g, cfg);
  IrEstimate e_sgd = ir_k_monte_carlo(g, res.scheme, 10, 20000, RngSpec{501, 0});
  IrEstimate e_lp = ir_k_monte_carlo(g, lp, 10, 20000, RngSpec{501, 1});
  double sigma = std::sqrt(e_sgd.std_error * e_sgd.std_error + e_lp.std_error * e_lp.std_error);
  CHECK(e_sgd.estimate >= e_lp.estimate - 4.0 * sigma - 0.01);
}

TEST_CASE("softmax objective closed forms") {
  PersuasionGame g = fixture_game();
  JointScheme scheme = fixture_scheme();
  // lambda = 0: uniformly random receiver.
  double expect = 0.0;
  for (int w = 0; w < 2; ++w)
    for (int a = 0; a < 2; ++a) expect += g.prior()[w] * 0.5 * g.sender_payoff(w, a);
  CHECK(br_objective(g, scheme, 0.0) == doctest::Approx(expect).epsilon(1e-12));
  // Sharp softmax approaches the best-response value; infinite lambda equals
  // it exactly.
  double v_inf = br_objective(g, scheme, std::numeric_limits<double>::infinity());
  CHECK(v_inf == doctest::Approx(bpr(g, scheme)).epsilon(1e-15));
  CHECK(std::abs(br_objective(g, scheme, 1e4) - v_inf) <= 1e-3);
  CHECK_THROWS_AS(br_objective(g, scheme, -0.5), DomainViolation);
}

TEST_CASE("softmax gradient matches finite differences") {
  RngSpec rng{606, 0};
  for (int trial = 0; trial < 3; ++trial) {
    auto eng = rng.derive(static_cast<uint64_t>(trial)).make_engine();
    PersuasionGame g = random_game(3, 3, rng.derive(100 + static_cast<uint64_t>(trial)));
    // Interior random scheme consistent with the uniform prior.
    Table x(3, 3);
    for (int w = 0; w < 3; ++w) {
      std::vector<double> row = simplex_uniform(eng, 3);
      for (int s = 0; s < 3; ++s) x(w, s) = (0.2 / 3.0 + 0.8 * row[static_cast<size_t>(s)]) / 3.0;
    }
    JointScheme scheme{x};
    for (double lambda : {0.5, 5.0}) {
      Table grad = br_gradient(g, scheme, lambda);
      for (int dir = 0; dir < 4; ++dir) {
        Table d = tangent_direction(3, 3, eng);
        const double h = 1e-6;
        Table up = x, dn = x;
        for (size_t i = 0; i < d.v.size(); ++i) {
          up.v[i] += h * d.v[i];
          dn.v[i] -= h * d.v[i];
        }
        double fd = (br_objective(g, JointScheme(up), lambda) -
                     br_objective(g, JointScheme(dn), lambda)) /
                    (2.0 * h);
        double got = directional(grad, d);
        CHECK(std::abs(got - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("softmax gradient skips zero-mass columns") {
  PersuasionGame g = fixture_game();
  JointScheme dead = make_scheme({{0.5, 0.0, 0.0}, {0.5, 0.0, 0.0}});
  Table grad = br_gradient(g, dead, 2.0);
  for (int w = 0; w < 2; ++w) {
    CHECK(grad(w, 1) == 0.0);
    CHECK(grad(w, 2) == 0.0);
  }
  CHECK(br_objective(g, dead, 2.0) == doctest::Approx(br_objective(g, make_scheme({{0.5}, {0.5}}), 2.0)).epsilon(1e-12));
}

TEST_CASE("bounded-rationality descent ascends monotonically") {
  PersuasionGame g = flower_game(3, 0.25);
  OptimizerConfig cfg = OptimizerConfig::br_defaults();
  cfg.max_iters = 60;
  cfg.rng = RngSpec{808, 0};
  OptimizeResult res = br_optimize(g, 30.0, cfg);
  REQUIRE(!res.history.empty());
  for (size_t i = 1; i < res.history.size(); ++i)
    CHECK(res.history[i].objective_estimate >= res.history[i - 1].objective_estimate - 1e-9);
  CHECK(FeasibleSet(g).max_violation(res.scheme.x()) <= 1e-7);

  // lambda = 0: scheme-independent objective, any feasible point optimal.
  OptimizeResult flat = br_optimize(g, 0.0, cfg);
  CHECK(FeasibleSet(g).max_violation(flat.scheme.x()) <= 1e-7);
  double expect = 0.0;
  for (int w = 0; w < 3; ++w)
    for (int a = 0; a < g.n_actions(); ++a)
      expect += g.prior()[w] * g.sender_payoff(w, a) / g.n_actions();
  CHECK(br_objective(g, flat.scheme, 0.0) == doctest::Approx(expect).epsilon(1e-9));
}

}  // TEST_SUITE
