#include "persuasion/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <thread>
#include <utility>
#include <vector>

#include "persuasion/bounds.hpp"
#include "persuasion/games.hpp"
#include "persuasion/inference.hpp"
#include "persuasion/io.hpp"
#include "persuasion/solvers.hpp"

namespace persuasion {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Deterministic work pool: item i always computes into slot i with the
// stream it was assigned at enumeration time, so scheduling cannot affect
// the output.  The first exception wins and stops the pool.
// ---------------------------------------------------------------------------

void parallel_for(int n_items, int threads, const std::function<void(int)>& fn) {
  if (n_items <= 0) return;
  threads = std::max(1, std::min(threads, n_items));
  if (threads == 1) {
    for (int i = 0; i < n_items; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1);
      if (i >= n_items) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Config reading.  Every accepted field lands in the echo object with its
// final (defaulted) value; unknown fields are rejected so a typo cannot
// silently fall back to a default.
// ---------------------------------------------------------------------------

class Cfg {
 public:
  // Root reader; owns its echo storage.
  Cfg(const json& j, std::string path) : j_(j), path_(std::move(path)), echo_(&echo_storage_) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "config" : path_, "expected an object");
  }

  Cfg(const Cfg&) = delete;
  Cfg& operator=(const Cfg&) = delete;

  uint64_t seed(const char* name, uint64_t def) {
    const json* f = take(name);
    if (!f) return put(name, def);
    if (!(f->is_number_unsigned() || (f->is_number_integer() && f->get<long long>() >= 0)))
      throw ConfigError(field_path(name), "expected a nonnegative integer");
    return put(name, f->get<uint64_t>());
  }

  long long integer(const char* name, long long def, long long lo, long long hi) {
    const json* f = take(name);
    long long v = def;
    if (f) {
      if (!f->is_number_integer()) throw ConfigError(field_path(name), "expected an integer");
      v = f->get<long long>();
    }
    if (v < lo || v > hi)
      throw ConfigError(field_path(name), "value " + std::to_string(v) + " outside [" +
                                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return put(name, v);
  }

  double number(const char* name, double def, double lo, double hi) {
    const json* f = take(name);
    double v = def;
    if (f) {
      if (!f->is_number()) throw ConfigError(field_path(name), "expected a number");
      v = f->get<double>();
    }
    if (!(v >= lo) || !(v <= hi))
      throw ConfigError(field_path(name), "value " + csv_number(v) + " outside [" + csv_number(lo) +
                                              ", " + csv_number(hi) + "]");
    return put(name, v);
  }

  std::vector<long long> integer_list(const char* name, std::vector<long long> def, long long lo,
                                      long long hi) {
    const json* f = take(name);
    std::vector<long long> v = std::move(def);
    if (f) {
      if (!f->is_array() || f->empty())
        throw ConfigError(field_path(name), "expected a non-empty array");
      v.clear();
      for (size_t i = 0; i < f->size(); ++i) {
        if (!(*f)[i].is_number_integer())
          throw ConfigError(field_path(name) + "[" + std::to_string(i) + "]",
                            "expected an integer");
        v.push_back((*f)[i].get<long long>());
      }
    }
    for (long long x : v)
      if (x < lo || x > hi)
        throw ConfigError(field_path(name), "value " + std::to_string(x) + " outside [" +
                                                std::to_string(lo) + ", " + std::to_string(hi) +
                                                "]");
    (*echo_)[name] = v;
    return v;
  }

  std::vector<double> number_list(const char* name, std::vector<double> def, double lo, double hi) {
    const json* f = take(name);
    std::vector<double> v = std::move(def);
    if (f) {
      if (!f->is_array() || f->empty())
        throw ConfigError(field_path(name), "expected a non-empty array");
      v.clear();
      for (size_t i = 0; i < f->size(); ++i) {
        if (!(*f)[i].is_number())
          throw ConfigError(field_path(name) + "[" + std::to_string(i) + "]", "expected a number");
        v.push_back((*f)[i].get<double>());
      }
    }
    for (double x : v)
      if (!(x >= lo) || !(x <= hi))
        throw ConfigError(field_path(name), "value " + csv_number(x) + " outside [" +
                                                csv_number(lo) + ", " + csv_number(hi) + "]");
    (*echo_)[name] = v;
    return v;
  }

  std::string choice(const char* name, const std::string& def,
                     const std::vector<std::string>& allowed) {
    const json* f = take(name);
    std::string v = def;
    if (f) {
      if (!f->is_string()) throw ConfigError(field_path(name), "expected a string");
      v = f->get<std::string>();
    }
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string msg = "must be one of:";
      for (const std::string& a : allowed) msg += " " + a;
      throw ConfigError(field_path(name), msg);
    }
    (*echo_)[name] = v;
    return v;
  }

  std::vector<std::string> choice_list(const char* name, std::vector<std::string> def,
                                       const std::vector<std::string>& allowed) {
    const json* f = take(name);
    std::vector<std::string> v = std::move(def);
    if (f) {
      if (!f->is_array() || f->empty())
        throw ConfigError(field_path(name), "expected a non-empty array");
      v.clear();
      for (size_t i = 0; i < f->size(); ++i) {
        if (!(*f)[i].is_string())
          throw ConfigError(field_path(name) + "[" + std::to_string(i) + "]", "expected a string");
        v.push_back((*f)[i].get<std::string>());
      }
    }
    for (const std::string& x : v)
      if (std::find(allowed.begin(), allowed.end(), x) == allowed.end()) {
        std::string msg = "\"" + x + "\" not allowed; must be one of:";
        for (const std::string& a : allowed) msg += " " + a;
        throw ConfigError(field_path(name), msg);
      }
    (*echo_)[name] = v;
    return v;
  }

  // Nested object reader writing into echo[name]; absent blocks read as {}.
  Cfg block(const char* name) {
    const json* f = take(name);
    static const json empty = json::object();
    return Cfg(f ? *f : empty, field_path(name), &(*echo_)[name]);
  }

  // Rejects any field never requested by a reader method.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError(path_.empty() ? it.key() : path_ + "." + it.key(), "unknown field");
  }

  const json& echo() const { return *echo_; }

 private:
  Cfg(const json& j, std::string path, json* echo_slot)
      : j_(j), path_(std::move(path)), echo_(echo_slot) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    *echo_ = json::object();
  }

  const json* take(const char* name) {
    seen_.insert(name);
    auto it = j_.find(name);
    return it == j_.end() ? nullptr : &*it;
  }
  template <typename T>
  T put(const char* name, T v) {
    (*echo_)[name] = v;
    return v;
  }
  std::string field_path(const char* name) const {
    return path_.empty() ? std::string(name) : path_ + "." + name;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
  json echo_storage_ = json::object();
  json* echo_;
};

OptimizerConfig read_optimizer(Cfg block, OptimizerConfig base) {
  base.max_iters = block.integer("max_iters", base.max_iters, 0, 1000000);
  base.eta0 = block.number("eta0", base.eta0, 1e-9, 1e6);
  base.decay = block.number("decay", base.decay, 1e-9, 1.0);
  base.gradient_replicates =
      block.integer("gradient_replicates", base.gradient_replicates, 1, 100000000);
  base.tail_average_window =
      static_cast<int>(block.integer("tail_average_window", base.tail_average_window, 1, 1000000));
  base.tolerance = block.number("tolerance", base.tolerance, 1e-300, 1.0);
  block.finish();
  return base;
}

// ---------------------------------------------------------------------------
// Shared writers.
// ---------------------------------------------------------------------------

std::string history_csv(const std::vector<IterateRecord>& history, long long n_replicates,
                        uint64_t master_seed) {
  CsvTable csv({"iter", "objective_estimate", "std_error", "constraint_residual", "n_replicates",
                "master_seed", "tool_version"});
  for (const IterateRecord& rec : history)
    csv.add_row({csv_number(rec.iter), csv_number(rec.objective_estimate),
                 csv_number(rec.std_error), csv_number(rec.constraint_residual),
                 csv_number(n_replicates), csv_number(static_cast<unsigned long long>(master_seed)),
                 kToolVersion});
  return csv.str();
}

void write_json_file(const fs::path& path, const json& j) {
  write_text_file(path.string(), j.dump(2) + "\n");
}

const std::vector<long long> kDefaultKGrid = {1,   2,   5,    10,   20,   50,  100,
                                              200, 500, 1000, 2000, 5000, 10000};

// ---------------------------------------------------------------------------
// flower-compare: LP vs SGD(k_opt list) vs BR(lambda list) on one flower
// game, every scheme evaluated across a k grid.
// ---------------------------------------------------------------------------

void run_flower_compare(Cfg& cfg, const fs::path& out, int threads) {
  const uint64_t master_seed = cfg.seed("master_seed", 1);
  const int n = static_cast<int>(cfg.integer("n", 4, 2, 64));
  const double tau = cfg.number("tau", 1.0 / 6.0, 0.0, 0.5);
  const std::vector<long long> k_grid = cfg.integer_list("k_grid", kDefaultKGrid, 1, 100000000);
  const long long replicates = cfg.integer("replicates", 10000, 1, 1000000000);
  const std::vector<long long> sgd_k_opt = cfg.integer_list("sgd_k_opt", {300}, 1, 100000000);
  const std::vector<double> br_lambda = cfg.number_list("br_lambda", {30.0, 60.0, 90.0}, 0.0, 1e9);
  OptimizerConfig sgd_base = read_optimizer(cfg.block("sgd"), OptimizerConfig::sgd_defaults());
  OptimizerConfig br_base = read_optimizer(cfg.block("br"), OptimizerConfig::br_defaults());
  cfg.finish();

  const PersuasionGame game = flower_game(n, tau);
  const RngSpec base{master_seed, 0};

  struct Method {
    std::string name;   // lp | sgd | br
    std::string param;  // "" | k_opt | lambda
    std::string file_tag;
  };
  std::vector<Method> methods;
  methods.push_back({"lp", "", "lp"});
  for (long long k_opt : sgd_k_opt)
    methods.push_back({"sgd", csv_number(k_opt), "sgd_" + csv_number(k_opt)});
  for (double lam : br_lambda)
    methods.push_back({"br", csv_number(lam), "br_" + csv_number(lam)});

  // Stage 1: design one scheme per method; work item i owns stream
  // base.derive(100 + i) no matter which thread runs it.
  std::vector<JointScheme> schemes(methods.size(),
                                   uninformative_scheme(game.prior(), game.n_actions()));
  std::vector<std::vector<IterateRecord>> histories(methods.size());
  parallel_for(static_cast<int>(methods.size()), threads, [&](int i) {
    const Method& m = methods[static_cast<size_t>(i)];
    if (m.name == "lp") {
      schemes[static_cast<size_t>(i)] = solve_known_commitment_lp(game);
    } else if (m.name == "sgd") {
      OptimizerConfig c = sgd_base;
      c.k_opt = sgd_k_opt[static_cast<size_t>(i) - 1];
      c.rng = base.derive(100 + static_cast<uint64_t>(i));
      OptimizeResult r = sgd_optimize(game, c);
      schemes[static_cast<size_t>(i)] = r.scheme;
      histories[static_cast<size_t>(i)] = std::move(r.history);
    } else {
      OptimizerConfig c = br_base;
      c.rng = base.derive(100 + static_cast<uint64_t>(i));
      const double lam = br_lambda[static_cast<size_t>(i) - 1 - sgd_k_opt.size()];
      OptimizeResult r = br_optimize(game, lam, c);
      schemes[static_cast<size_t>(i)] = r.scheme;
      histories[static_cast<size_t>(i)] = std::move(r.history);
    }
  });

  // Stage 2: evaluate every scheme on the k grid.
  const int n_points = static_cast<int>(methods.size() * k_grid.size());
  std::vector<IrEstimate> points(static_cast<size_t>(n_points));
  parallel_for(n_points, threads, [&](int p) {
    const size_t mi = static_cast<size_t>(p) / k_grid.size();
    const size_t ki = static_cast<size_t>(p) % k_grid.size();
    points[static_cast<size_t>(p)] = ir_k_monte_carlo(
        game, schemes[mi], k_grid[ki], replicates, base.derive(10000 + static_cast<uint64_t>(p)));
  });

  CsvTable csv({"method", "param", "k", "estimate", "std_error", "n_replicates", "master_seed",
                "tool_version"});
  for (int p = 0; p < n_points; ++p) {
    const size_t mi = static_cast<size_t>(p) / k_grid.size();
    const size_t ki = static_cast<size_t>(p) % k_grid.size();
    csv.add_row({methods[mi].name, methods[mi].param, csv_number(k_grid[ki]),
                 csv_number(points[static_cast<size_t>(p)].estimate),
                 csv_number(points[static_cast<size_t>(p)].std_error), csv_number(replicates),
                 csv_number(static_cast<unsigned long long>(master_seed)), kToolVersion});
  }
  write_text_file((out / "flower_compare.csv").string(), csv.str());
  for (size_t i = 0; i < methods.size(); ++i) {
    write_json_file(out / ("scheme_" + methods[i].file_tag + ".json"), scheme_to_json(schemes[i]));
    if (!histories[i].empty()) {
      const long long reps = methods[i].name == "sgd" ? sgd_base.gradient_replicates : 0;
      write_text_file((out / ("history_" + methods[i].file_tag + ".csv")).string(),
                      history_csv(histories[i], reps, master_seed));
    }
  }
}

// ---------------------------------------------------------------------------
// random-games: bounded-rationality lambda sweep averaged over seeded
// random games; lambda = inf rows evaluate the known-commitment scheme.
// ---------------------------------------------------------------------------

void run_random_games(Cfg& cfg, const fs::path& out, int threads) {
  const uint64_t master_seed = cfg.seed("master_seed", 2);
  const int n_games = static_cast<int>(cfg.integer("n_games", 20, 1, 100000));
  const int n_states = static_cast<int>(cfg.integer("n_states", 3, 1, 64));
  const int n_actions = static_cast<int>(cfg.integer("n_actions", 3, 1, 64));
  const std::vector<double> lambda_grid =
      cfg.number_list("lambda_grid", {0.0, 15.0, 30.0, 60.0, 90.0}, 0.0, 1e9);
  const std::vector<long long> k_grid =
      cfg.integer_list("k_grid", {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000}, 1, 100000000);
  const long long replicates = cfg.integer("replicates", 10000, 1, 1000000000);
  OptimizerConfig br_base = read_optimizer(cfg.block("br"), OptimizerConfig::br_defaults());
  cfg.finish();

  const RngSpec base{master_seed, 0};
  std::vector<PersuasionGame> games;
  games.reserve(static_cast<size_t>(n_games));
  for (int g = 0; g < n_games; ++g)
    games.push_back(random_game(n_states, n_actions, base.derive(static_cast<uint64_t>(g))));

  // One designed scheme per (game, lambda) plus the LP scheme per game.
  const size_t n_lambda = lambda_grid.size();
  const size_t n_design = static_cast<size_t>(n_games) * (n_lambda + 1);
  std::vector<JointScheme> schemes(n_design,
                                   uninformative_scheme(Distribution::uniform(n_states), n_actions));
  parallel_for(static_cast<int>(n_design), threads, [&](int i) {
    const size_t g = static_cast<size_t>(i) / (n_lambda + 1);
    const size_t li = static_cast<size_t>(i) % (n_lambda + 1);
    if (li == n_lambda) {
      schemes[static_cast<size_t>(i)] = solve_known_commitment_lp(games[g]);
    } else {
      OptimizerConfig c = br_base;
      c.rng = base.derive(100000 + static_cast<uint64_t>(i));
      schemes[static_cast<size_t>(i)] = br_optimize(games[g], lambda_grid[li], c).scheme;
    }
  });

  const int n_points = static_cast<int>(n_design * k_grid.size());
  std::vector<IrEstimate> points(static_cast<size_t>(n_points));
  parallel_for(n_points, threads, [&](int p) {
    const size_t di = static_cast<size_t>(p) / k_grid.size();
    const size_t ki = static_cast<size_t>(p) % k_grid.size();
    const size_t g = di / (n_lambda + 1);
    points[static_cast<size_t>(p)] =
        ir_k_monte_carlo(games[g], schemes[di], k_grid[ki], replicates,
                         base.derive(200000 + static_cast<uint64_t>(p)));
  });

  // Average across games per (lambda, k); lambda = inf labels the LP rows.
  CsvTable csv({"lambda", "k", "mean_estimate", "combined_std_error", "n_games", "n_replicates",
                "master_seed", "tool_version"});
  for (size_t li = 0; li <= n_lambda; ++li) {
    const std::string label = li == n_lambda
                                  ? csv_number(std::numeric_limits<double>::infinity())
                                  : csv_number(lambda_grid[li]);
    for (size_t ki = 0; ki < k_grid.size(); ++ki) {
      double mean = 0.0, var = 0.0;
      for (int g = 0; g < n_games; ++g) {
        const size_t di = static_cast<size_t>(g) * (n_lambda + 1) + li;
        const IrEstimate& e = points[di * k_grid.size() + ki];
        mean += e.estimate;
        var += e.std_error * e.std_error;
      }
      mean /= n_games;
      csv.add_row({label, csv_number(k_grid[ki]), csv_number(mean),
                   csv_number(std::sqrt(var) / n_games),
                   csv_number(static_cast<long long>(n_games)), csv_number(replicates),
                   csv_number(static_cast<unsigned long long>(master_seed)), kToolVersion});
    }
  }
  write_text_file((out / "random_games.csv").string(), csv.str());
}

// ---------------------------------------------------------------------------
// safety: reward decomposition and signal-support comparison of the
// known-commitment scheme vs SGD on a seeded city at one horizon k.
// ---------------------------------------------------------------------------

void run_safety(Cfg& cfg, const fs::path& out, int threads) {
  const uint64_t master_seed = cfg.seed("master_seed", 3);
  const int n_nodes = static_cast<int>(cfg.integer("n_nodes", 40, 2, 10000));
  const int n_incidents = static_cast<int>(cfg.integer("n_incidents", 20, 1, 10000));
  const int incident_size = static_cast<int>(cfg.integer("incident_size", 10, 1, 10000));
  const double penalty = cfg.number("penalty", 1.0, 1e-9, 1e9);
  const long long k = cfg.integer("k", 100, 1, 100000000);
  const long long replicates = cfg.integer("replicates", 10000, 1, 1000000000);
  OptimizerConfig sgd_base = read_optimizer(cfg.block("sgd"), OptimizerConfig::sgd_defaults());
  cfg.finish();

  const RngSpec base{master_seed, 0};
  const SafetyCity city = random_city(n_nodes, n_incidents, incident_size, penalty, base.derive(1));
  const PersuasionGame game = safety_alert_game(city);

  const JointScheme lp = solve_known_commitment_lp(game);
  OptimizerConfig c = sgd_base;
  c.k_opt = k;
  c.rng = base.derive(2);
  OptimizeResult sgd = sgd_optimize(game, c);

  std::vector<IrEstimate> est(2);
  const std::vector<const JointScheme*> side = {&lp, &sgd.scheme};
  parallel_for(2, threads, [&](int i) {
    est[static_cast<size_t>(i)] = ir_k_monte_carlo(game, *side[static_cast<size_t>(i)], k,
                                                   replicates, base.derive(10 + static_cast<uint64_t>(i)));
  });

  CsvTable summary({"method", "s_tilde", "bpr", "k", "estimate", "std_error", "n_replicates",
                    "master_seed", "tool_version"});
  CsvTable decomp(
      {"method", "signal", "contribution", "n_replicates", "master_seed", "tool_version"});
  const std::vector<std::string> labels = {"kc", "sgd"};
  for (int i = 0; i < 2; ++i) {
    const JointScheme& s = *side[static_cast<size_t>(i)];
    summary.add_row({labels[static_cast<size_t>(i)],
                     csv_number(static_cast<long long>(signal_support_metric(game, s))),
                     csv_number(bpr(game, s)), csv_number(k),
                     csv_number(est[static_cast<size_t>(i)].estimate),
                     csv_number(est[static_cast<size_t>(i)].std_error), csv_number(replicates),
                     csv_number(static_cast<unsigned long long>(master_seed)), kToolVersion});
    const std::vector<double> contrib = signal_reward_decomposition(game, s);
    for (size_t sig = 0; sig < contrib.size(); ++sig)
      decomp.add_row({labels[static_cast<size_t>(i)], csv_number(static_cast<long long>(sig)),
                      csv_number(contrib[sig]), csv_number(replicates),
                      csv_number(static_cast<unsigned long long>(master_seed)), kToolVersion});
  }
  write_json_file(out / "city.json", city_to_json(city));
  write_json_file(out / "game.json", game_to_json(game));
  write_json_file(out / "scheme_kc.json", scheme_to_json(lp));
  write_json_file(out / "scheme_sgd.json", scheme_to_json(sgd.scheme));
  write_text_file((out / "history_sgd.csv").string(),
                  history_csv(sgd.history, sgd_base.gradient_replicates, master_seed));
  write_text_file((out / "safety_summary.csv").string(), summary.str());
  write_text_file((out / "safety_decomposition.csv").string(), decomp.str());
}

// ---------------------------------------------------------------------------
// bounds-table: gap bound vs measured value rows across schemes and k.
// ---------------------------------------------------------------------------

void run_bounds_table(Cfg& cfg, const fs::path& out, int threads) {
  const uint64_t master_seed = cfg.seed("master_seed", 4);
  const std::string family = cfg.choice("family", "random", {"random", "flower"});
  const int n_games = static_cast<int>(cfg.integer("n_games", 10, 1, 100000));
  const int n_states = static_cast<int>(cfg.integer("n_states", 3, 1, 64));
  const int n_actions = static_cast<int>(cfg.integer("n_actions", 3, 1, 64));
  const int flower_n = static_cast<int>(cfg.integer("n", 4, 2, 64));
  const double flower_tau = cfg.number("tau", 1.0 / 6.0, 0.0, 0.5);
  std::vector<std::string> allowed_schemes = {"lp", "revealing", "uninformative"};
  std::vector<std::string> default_schemes = {"lp", "revealing"};
  if (family == "flower") {
    allowed_schemes.push_back("flower-optimal");
    default_schemes.push_back("flower-optimal");
  }
  const std::vector<std::string> scheme_labels =
      cfg.choice_list("schemes", default_schemes, allowed_schemes);
  const std::vector<long long> k_grid = cfg.integer_list("k_grid", {1, 10, 100}, 1, 100000000);
  const long long replicates = cfg.integer("replicates", 10000, 1, 1000000000);
  cfg.finish();

  const RngSpec base{master_seed, 0};
  std::vector<PersuasionGame> games;
  std::vector<std::string> game_names;
  if (family == "flower") {
    games.push_back(flower_game(flower_n, flower_tau));
    game_names.push_back("flower");
  } else {
    for (int g = 0; g < n_games; ++g) {
      games.push_back(random_game(n_states, n_actions, base.derive(static_cast<uint64_t>(g))));
      game_names.push_back("random_" + std::to_string(g));
    }
  }

  struct Row {
    size_t game;
    std::string label;
    JointScheme scheme;
  };
  std::vector<Row> rows;
  for (size_t g = 0; g < games.size(); ++g) {
    for (const std::string& label : scheme_labels) {
      if (label == "lp")
        rows.push_back({g, label, solve_known_commitment_lp(games[g])});
      else if (label == "revealing")
        rows.push_back({g, label, revealing_scheme(games[g].prior())});
      else if (label == "uninformative")
        rows.push_back({g, label, uninformative_scheme(games[g].prior(), games[g].n_actions())});
      else
        rows.push_back({g, label, flower_optimal_scheme(flower_n, flower_tau)});
    }
  }

  const int n_points = static_cast<int>(rows.size() * k_grid.size());
  std::vector<IrEstimate> points(static_cast<size_t>(n_points));
  parallel_for(n_points, threads, [&](int p) {
    const size_t ri = static_cast<size_t>(p) / k_grid.size();
    const size_t ki = static_cast<size_t>(p) % k_grid.size();
    points[static_cast<size_t>(p)] =
        ir_k_monte_carlo(games[rows[ri].game], rows[ri].scheme, k_grid[ki], replicates,
                         base.derive(300000 + static_cast<uint64_t>(p)));
  });

  CsvTable csv({"game", "scheme", "k", "bound", "bpr", "measured_irk", "std_error", "n_replicates",
                "master_seed", "tool_version"});
  for (int p = 0; p < n_points; ++p) {
    const size_t ri = static_cast<size_t>(p) / k_grid.size();
    const size_t ki = static_cast<size_t>(p) % k_grid.size();
    const Row& r = rows[ri];
    csv.add_row({game_names[r.game], r.label, csv_number(k_grid[ki]),
                 csv_number(gap_upper_bound(games[r.game], r.scheme, k_grid[ki])),
                 csv_number(bpr(games[r.game], r.scheme)),
                 csv_number(points[static_cast<size_t>(p)].estimate),
                 csv_number(points[static_cast<size_t>(p)].std_error), csv_number(replicates),
                 csv_number(static_cast<unsigned long long>(master_seed)), kToolVersion});
  }
  write_text_file((out / "bounds_table.csv").string(), csv.str());
}

// ---------------------------------------------------------------------------
// stackelberg-gap: theoretical lower-bound reference vs the sufficient
// sample count vs the smallest probed k already meeting the target value.
// ---------------------------------------------------------------------------

void run_stackelberg_gap(Cfg& cfg, const fs::path& out, int threads) {
  const uint64_t master_seed = cfg.seed("master_seed", 5);
  const std::vector<long long> n_list = cfg.integer_list("n_list", {4, 8}, 4, 4096);
  const std::vector<double> eps_list = cfg.number_list("eps_list", {0.125}, 1e-9, 0.125);
  const long long replicates = cfg.integer("replicates", 10000, 1, 1000000000);
  cfg.finish();

  const RngSpec base{master_seed, 0};

  struct Cell {
    long long n = 0;
    double eps = 0.0;
    long long sufficient_k = 0;
    std::vector<long long> probes;
  };
  std::vector<Cell> cells;
  for (long long n : n_list) {
    for (double eps : eps_list) {
      Cell cell;
      cell.n = n;
      cell.eps = eps;
      cell.sufficient_k = stackelberg_sufficient_k(static_cast<int>(n), eps);
      for (long long k : kDefaultKGrid)
        if (k < cell.sufficient_k) cell.probes.push_back(k);
      cell.probes.push_back(cell.sufficient_k);
      cells.push_back(std::move(cell));
    }
  }

  std::vector<std::pair<size_t, size_t>> items;  // (cell, probe index)
  for (size_t c = 0; c < cells.size(); ++c)
    for (size_t p = 0; p < cells[c].probes.size(); ++p) items.emplace_back(c, p);
  std::vector<IrEstimate> est(items.size());
  parallel_for(static_cast<int>(items.size()), threads, [&](int i) {
    const auto [c, p] = items[static_cast<size_t>(i)];
    const Cell& cell = cells[c];
    // Hard-instance parameterization tau = 1/(2(n-1)).
    const StackelbergGame sg =
        flower_stackelberg(static_cast<int>(cell.n), 0.5 / (static_cast<double>(cell.n) - 1.0));
    const Distribution x = stackelberg_eps_strategy(static_cast<int>(cell.n), cell.eps);
    est[static_cast<size_t>(i)] = stackelberg_ir_k(sg, x, cell.probes[p], replicates,
                                                   base.derive(400000 + static_cast<uint64_t>(i)));
  });

  CsvTable csv({"n", "eps", "reference_k", "sufficient_k", "smallest_passing_k", "ir_at_sufficient",
                "std_error", "n_replicates", "master_seed", "tool_version"});
  size_t item = 0;
  for (const Cell& cell : cells) {
    // The closed-form lower-bound curve is only valid deep in the small-eps
    // regime; outside it the reference column is nan.
    double reference = std::numeric_limits<double>::quiet_NaN();
    if (cell.eps <= 1.0 / 320.0)
      reference = flower_lower_bound_reference(static_cast<int>(cell.n), cell.eps);
    const double target = 0.5 - cell.eps;
    long long smallest_passing = -1;
    IrEstimate at_sufficient;
    for (size_t p = 0; p < cell.probes.size(); ++p, ++item) {
      const IrEstimate& e = est[item];
      if (smallest_passing < 0 && e.estimate >= target - 3.0 * e.std_error)
        smallest_passing = cell.probes[p];
      if (cell.probes[p] == cell.sufficient_k) at_sufficient = e;
    }
    csv.add_row({csv_number(cell.n), csv_number(cell.eps), csv_number(reference),
                 csv_number(cell.sufficient_k),
                 smallest_passing < 0 ? "nan" : csv_number(smallest_passing),
                 csv_number(at_sufficient.estimate), csv_number(at_sufficient.std_error),
                 csv_number(replicates), csv_number(static_cast<unsigned long long>(master_seed)),
                 kToolVersion});
  }
  write_text_file((out / "stackelberg_gap.csv").string(), csv.str());
}

}  // namespace

void run_experiment(const json& config, const std::string& out_dir, int threads) {
  Cfg cfg(config, "");
  const std::string kind = cfg.choice(
      "kind", "", {"flower-compare", "random-games", "safety", "bounds-table", "stackelberg-gap"});

  const fs::path out(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory: " + out.string());
  const fs::path marker = out / "run.partial";
  write_text_file(marker.string(), kind + "\n");

  if (kind == "flower-compare")
    run_flower_compare(cfg, out, threads);
  else if (kind == "random-games")
    run_random_games(cfg, out, threads);
  else if (kind == "safety")
    run_safety(cfg, out, threads);
  else if (kind == "bounds-table")
    run_bounds_table(cfg, out, threads);
  else
    run_stackelberg_gap(cfg, out, threads);

  write_json_file(out / "config_echo.json", cfg.echo());
  fs::remove(marker);
}

}  // namespace persuasion
