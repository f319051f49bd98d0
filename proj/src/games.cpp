#include "persuasion/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "persuasion/sampling.hpp"

namespace persuasion {

int flower_pair_action_index(int n, int j, int k) {
  if (j < 0 || k < 0 || j >= n || k >= n || j == k)
    throw DomainViolation("flower_pair_action_index: bad pair");
  return n + j * (n - 1) + (k < j ? k : k - 1);
}

static void check_flower_params(int n, double tau) {
  if (n < 2) throw DomainViolation("flower: need at least 2 states");
  if (!(tau > 0.0) || tau > 1.0 / n + 1e-15)
    throw DomainViolation("flower: tau must lie in (0, 1/n]");
}

static void flower_tables(int n, double tau, Table& u_s, Table& u_r) {
  const int A = n + n * (n - 1);
  u_s = Table(n, A, 0.0);
  u_r = Table(n, A, 0.0);
  for (int j = 0; j < n; ++j) {
    u_s(j, j) = 1.0;
    u_r(j, j) = 1.0;
  }
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      int a = flower_pair_action_index(n, j, k);
      for (int w = 0; w < n; ++w) {
        double u = tau;
        if (w == j) u += 1.0;
        if (w == k) u -= 1.0;
        u_r(w, a) = u;
      }
    }
  }
}

PersuasionGame flower_game(int n, double tau) {
  check_flower_params(n, tau);
  Table u_s, u_r;
  flower_tables(n, tau, u_s, u_r);
  return PersuasionGame(Distribution::uniform(n), std::move(u_s), std::move(u_r));
}

JointScheme flower_optimal_scheme(int n, double tau) {
  check_flower_params(n, tau);
  Table x(n, n);
  for (int w = 0; w < n; ++w)
    for (int s = 0; s < n; ++s) x(w, s) = (w == s ? 1.0 - (n - 1) * tau : tau) / n;
  return JointScheme(std::move(x));
}

StackelbergGame flower_stackelberg(int n, double tau) {
  check_flower_params(n, tau);
  Table u_s, u_r;
  flower_tables(n, tau, u_s, u_r);
  return StackelbergGame(std::move(u_s), std::move(u_r));
}

Distribution stackelberg_eps_strategy(int n, double eps) {
  if (n < 4) throw DomainViolation("stackelberg_eps_strategy: need n >= 4");
  if (!(eps > 0.0) || eps > 0.125 + 1e-15)
    throw DomainViolation("stackelberg_eps_strategy: eps must lie in (0, 1/8]");
  std::vector<double> x(static_cast<size_t>(n), (0.5 + eps / 2.0) / (n - 1));
  x[0] = 0.5 - eps / 2.0;
  return Distribution(std::move(x));
}

PersuasionGame random_game(int n_states, int n_actions, const RngSpec& rng) {
  if (n_states < 1 || n_actions < 1) throw DomainViolation("random_game: empty game");
  auto eng = rng.make_engine();
  Table u_s(n_states, n_actions), u_r(n_states, n_actions);
  for (double& v : u_s.v) v = uniform01(eng);
  for (double& v : u_r.v) v = uniform01(eng);
  return PersuasionGame(Distribution::uniform(n_states), std::move(u_s), std::move(u_r));
}

// ---------------------------------------------------------------------------
// Safety-alert city.
// ---------------------------------------------------------------------------

SafetyCity random_city(int n_nodes, int n_incidents, int incident_size, double penalty,
                       const RngSpec& rng) {
  if (n_nodes < 2) throw DomainViolation("random_city: need at least 2 nodes");
  if (n_incidents < 1 || incident_size < 1 || incident_size > n_nodes)
    throw DomainViolation("random_city: bad incident parameters");
  if (!(penalty > 0.0)) throw DomainViolation("random_city: penalty must be positive");

  auto eng = rng.make_engine();
  std::vector<double> px(static_cast<size_t>(n_nodes)), py(static_cast<size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    px[static_cast<size_t>(i)] = uniform01(eng);
    py[static_cast<size_t>(i)] = uniform01(eng);
  }
  auto dist = [&](int a, int b) {
    double dx = px[static_cast<size_t>(a)] - px[static_cast<size_t>(b)];
    double dy = py[static_cast<size_t>(a)] - py[static_cast<size_t>(b)];
    return std::sqrt(dx * dx + dy * dy);
  };

  std::vector<std::vector<char>> adj(static_cast<size_t>(n_nodes),
                                     std::vector<char>(static_cast<size_t>(n_nodes), 0));
  // 4-nearest-neighbour edges.
  const int knn = std::min(4, n_nodes - 1);
  std::vector<int> order(static_cast<size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double da = dist(i, a), db = dist(i, b);
      if (da != db) return da < db;
      return a < b;
    });
    int added = 0;
    for (int j : order) {
      if (j == i) continue;
      adj[static_cast<size_t>(i)][static_cast<size_t>(j)] = 1;
      adj[static_cast<size_t>(j)][static_cast<size_t>(i)] = 1;
      if (++added >= knn) break;
    }
  }
  // Euclidean minimum spanning tree (Prim) guarantees connectivity.
  {
    std::vector<char> in_tree(static_cast<size_t>(n_nodes), 0);
    std::vector<double> best(static_cast<size_t>(n_nodes), std::numeric_limits<double>::infinity());
    std::vector<int> parent(static_cast<size_t>(n_nodes), -1);
    in_tree[0] = 1;
    for (int j = 1; j < n_nodes; ++j) {
      best[static_cast<size_t>(j)] = dist(0, j);
      parent[static_cast<size_t>(j)] = 0;
    }
    for (int step = 1; step < n_nodes; ++step) {
      int pick = -1;
      for (int j = 0; j < n_nodes; ++j)
        if (!in_tree[static_cast<size_t>(j)] &&
            (pick < 0 || best[static_cast<size_t>(j)] < best[static_cast<size_t>(pick)]))
          pick = j;
      in_tree[static_cast<size_t>(pick)] = 1;
      adj[static_cast<size_t>(pick)][static_cast<size_t>(parent[static_cast<size_t>(pick)])] = 1;
      adj[static_cast<size_t>(parent[static_cast<size_t>(pick)])][static_cast<size_t>(pick)] = 1;
      for (int j = 0; j < n_nodes; ++j)
        if (!in_tree[static_cast<size_t>(j)] && dist(pick, j) < best[static_cast<size_t>(j)]) {
          best[static_cast<size_t>(j)] = dist(pick, j);
          parent[static_cast<size_t>(j)] = pick;
        }
    }
  }

  SafetyCity city;
  city.n_nodes = n_nodes;
  city.penalty = penalty;
  for (int i = 0; i < n_nodes; ++i)
    for (int j = i + 1; j < n_nodes; ++j)
      if (adj[static_cast<size_t>(i)][static_cast<size_t>(j)])
        city.edges.emplace_back(i, j, dist(i, j));

  double cx = std::accumulate(px.begin(), px.end(), 0.0) / n_nodes;
  double cy = std::accumulate(py.begin(), py.end(), 0.0) / n_nodes;
  int center = 0;
  double best_c = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_nodes; ++i) {
    double dx = px[static_cast<size_t>(i)] - cx, dy = py[static_cast<size_t>(i)] - cy;
    double d = dx * dx + dy * dy;
    if (d < best_c) { best_c = d; center = i; }
  }
  city.center = center;

  std::vector<int> pool(static_cast<size_t>(n_nodes));
  for (int s = 0; s < n_incidents; ++s) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: first incident_size entries are a uniform draw
    // without replacement.
    for (int t = 0; t < incident_size; ++t) {
      int r = t + static_cast<int>(uniform01(eng) * (n_nodes - t));
      if (r >= n_nodes) r = n_nodes - 1;
      std::swap(pool[static_cast<size_t>(t)], pool[static_cast<size_t>(r)]);
    }
    std::vector<int> f(pool.begin(), pool.begin() + incident_size);
    std::sort(f.begin(), f.end());
    city.incidents.push_back(std::move(f));
  }
  return city;
}

PersuasionGame safety_alert_game(const SafetyCity& city) {
  const int n = city.n_nodes;
  if (n < 2) throw DomainViolation("safety_alert_game: need at least 2 nodes");
  if (city.center < 0 || city.center >= n)
    throw DomainViolation("safety_alert_game: center out of range");
  if (city.incidents.empty()) throw DomainViolation("safety_alert_game: no incident states");
  if (!(city.penalty > 0.0)) throw DomainViolation("safety_alert_game: penalty must be positive");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(static_cast<size_t>(n),
                                     std::vector<double>(static_cast<size_t>(n), inf));
  for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)][static_cast<size_t>(i)] = 0.0;
  for (const auto& [u, v, w] : city.edges) {
    if (u < 0 || v < 0 || u >= n || v >= n || !(w > 0.0))
      throw DomainViolation("safety_alert_game: bad edge");
    auto& duv = d[static_cast<size_t>(u)][static_cast<size_t>(v)];
    auto& dvu = d[static_cast<size_t>(v)][static_cast<size_t>(u)];
    duv = std::min(duv, w);
    dvu = std::min(dvu, w);
  }
  // Floyd-Warshall; city graphs are small enough that O(n^3) is immaterial.
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            std::min(d[static_cast<size_t>(i)][static_cast<size_t>(j)],
                     d[static_cast<size_t>(i)][static_cast<size_t>(k)] +
                         d[static_cast<size_t>(k)][static_cast<size_t>(j)]);

  double dmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(d[static_cast<size_t>(i)][static_cast<size_t>(j)]))
        throw DisconnectedGraph("safety_alert_game: graph is not connected");
      dmax = std::max(dmax, d[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    }
  if (!(dmax > 0.0)) throw DomainViolation("safety_alert_game: degenerate zero-diameter graph");

  const int n_states = static_cast<int>(city.incidents.size());
  Table u_s(n_states, n), u_r(n_states, n);
  for (int w = 0; w < n_states; ++w) {
    const auto& fire = city.incidents[static_cast<size_t>(w)];
    if (fire.empty()) throw DomainViolation("safety_alert_game: empty incident set");
    for (int v = 0; v < n; ++v) {
      bool burning = std::find(fire.begin(), fire.end(), v) != fire.end();
      u_r(w, v) = burning ? -city.penalty
                          : 1.0 - d[static_cast<size_t>(v)][static_cast<size_t>(city.center)] / dmax;
      double nearest = inf;
      for (int f : fire) {
        if (f < 0 || f >= n) throw DomainViolation("safety_alert_game: incident node out of range");
        nearest = std::min(nearest, d[static_cast<size_t>(v)][static_cast<size_t>(f)]);
      }
      u_s(w, v) = nearest / dmax;
    }
  }
  return PersuasionGame(Distribution::uniform(n_states), std::move(u_s), std::move(u_r));
}

std::vector<double> signal_reward_decomposition(const PersuasionGame& game,
                                                const JointScheme& scheme) {
  if (scheme.n_states() != game.n_states())
    throw DomainViolation("signal_reward_decomposition: state count mismatch");
  scheme.require_consistent_with(game.prior());
  std::vector<double> out(static_cast<size_t>(scheme.n_signals()), 0.0);
  for (int s = 0; s < scheme.n_signals(); ++s) {
    if (scheme.x().col_sum(s) < kZeroMass) continue;
    int a = best_response(game, posterior(scheme, s));
    double c = 0.0;
    for (int w = 0; w < game.n_states(); ++w) c += scheme(w, s) * game.sender_payoff(w, a);
    out[static_cast<size_t>(s)] = c;
  }
  return out;
}

int signal_support_metric(const PersuasionGame& game, const JointScheme& scheme, double coverage) {
  if (!(coverage > 0.0) || coverage > 1.0)
    throw DomainViolation("signal_support_metric: coverage must lie in (0, 1]");
  std::vector<double> contrib = signal_reward_decomposition(game, scheme);
  double total = std::accumulate(contrib.begin(), contrib.end(), 0.0);
  if (!(total > 0.0))
    throw ZeroValue("signal_support_metric: known-commitment value is not positive");
  std::sort(contrib.begin(), contrib.end(), std::greater<double>());
  double acc = 0.0;
  for (size_t i = 0; i < contrib.size(); ++i) {
    acc += contrib[i];
    if (acc >= coverage * total - 1e-12) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(contrib.size());
}

}  // namespace persuasion
