// persuade: reproducible experiment runner for persuasion-with-inference.
//
// Subcommands wrap the library one-to-one: gen-game, solve-lp, optimize-sgd,
// optimize-br, simulate, bounds, run.  Exit codes: 0 success, 2 config or
// usage error, 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "persuasion/bounds.hpp"
#include "persuasion/experiments.hpp"
#include "persuasion/games.hpp"
#include "persuasion/inference.hpp"
#include "persuasion/io.hpp"
#include "persuasion/solvers.hpp"

namespace {

using nlohmann::json;
using namespace persuasion;

// An unreadable user-supplied path is a configuration problem, not a
// numeric one.
std::string read_input_file(const std::string& path) {
  try {
    return read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

PersuasionGame load_game(const std::string& path) {
  return game_from_json(parse_json_text(read_input_file(path), path));
}

JointScheme load_scheme(const std::string& path, const PersuasionGame& game) {
  JointScheme scheme = scheme_from_json(parse_json_text(read_input_file(path), path));
  if (scheme.n_states() != game.n_states())
    throw ConfigError("scheme.x", "scheme has " + std::to_string(scheme.n_states()) +
                                      " states but the game has " +
                                      std::to_string(game.n_states()));
  scheme.require_consistent_with(game.prior());
  return scheme;
}

void write_json_out(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// gen-game
// ---------------------------------------------------------------------------

struct GenGameArgs {
  std::string family;
  int n = 4;
  double tau = 1.0 / 6.0;
  int states = 3;
  int actions = 3;
  int nodes = 40;
  int incidents = 20;
  int incident_size = 10;
  double penalty = 1.0;
  uint64_t seed = 1;
  std::string out = "game.json";
  std::string city_out;
};

void cmd_gen_game(const GenGameArgs& a) {
  if (a.family == "flower") {
    write_json_out(a.out, game_to_json(flower_game(a.n, a.tau)));
  } else if (a.family == "random") {
    write_json_out(a.out, game_to_json(random_game(a.states, a.actions, RngSpec{a.seed, 0})));
  } else {
    const SafetyCity city =
        random_city(a.nodes, a.incidents, a.incident_size, a.penalty, RngSpec{a.seed, 0});
    write_json_out(a.out, game_to_json(safety_alert_game(city)));
    if (!a.city_out.empty()) write_json_out(a.city_out, city_to_json(city));
  }
}

// ---------------------------------------------------------------------------
// solve-lp
// ---------------------------------------------------------------------------

void cmd_solve_lp(const std::string& game_path, const std::string& out) {
  const PersuasionGame game = load_game(game_path);
  const JointScheme scheme = solve_known_commitment_lp(game);
  json j = scheme_to_json(scheme);
  j["objective"] = bpr(game, scheme);
  write_json_out(out, j);
}

// ---------------------------------------------------------------------------
// optimize-sgd / optimize-br
// ---------------------------------------------------------------------------

struct OptimizeArgs {
  std::string game_path;
  long long k_opt = 100;
  double lambda = 60.0;
  long long iters = -1;  // -1: library default
  double eta0 = -1.0;
  double decay = -1.0;
  long long replicates = -1;
  int window = -1;
  uint64_t seed = 1;
  std::string out = "scheme.json";
  std::string history;
};

OptimizerConfig build_config(const OptimizeArgs& a, OptimizerConfig c) {
  if (a.iters >= 0) c.max_iters = a.iters;
  if (a.eta0 > 0) c.eta0 = a.eta0;
  if (a.decay > 0) c.decay = a.decay;
  if (a.replicates > 0) c.gradient_replicates = a.replicates;
  if (a.window > 0) c.tail_average_window = a.window;
  c.k_opt = a.k_opt;
  c.rng = RngSpec{a.seed, 0};
  return c;
}

void write_history(const std::string& path, const std::vector<IterateRecord>& history,
                   long long n_replicates, uint64_t master_seed) {
  CsvTable csv({"iter", "objective_estimate", "std_error", "constraint_residual", "n_replicates",
                "master_seed", "tool_version"});
  for (const IterateRecord& rec : history)
    csv.add_row({csv_number(rec.iter), csv_number(rec.objective_estimate),
                 csv_number(rec.std_error), csv_number(rec.constraint_residual),
                 csv_number(n_replicates), csv_number(static_cast<unsigned long long>(master_seed)),
                 kToolVersion});
  write_text_file(path, csv.str());
}

void cmd_optimize(const OptimizeArgs& a, bool sgd) {
  const PersuasionGame game = load_game(a.game_path);
  const OptimizerConfig config =
      build_config(a, sgd ? OptimizerConfig::sgd_defaults() : OptimizerConfig::br_defaults());
  const OptimizeResult result =
      sgd ? sgd_optimize(game, config) : br_optimize(game, a.lambda, config);
  write_json_out(a.out, scheme_to_json(result.scheme));
  if (!a.history.empty())
    write_history(a.history, result.history, sgd ? config.gradient_replicates : 0, a.seed);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string game_path;
  std::string scheme_path;
  std::string mode = "estimate";
  std::vector<long long> k;
  long long replicates = 10000;
  uint64_t seed = 1;
  std::string out = "simulate.csv";
};

void cmd_simulate(const SimulateArgs& a) {
  const PersuasionGame game = load_game(a.game_path);
  const JointScheme scheme = load_scheme(a.scheme_path, game);
  if (a.k.empty()) throw ConfigError("k", "at least one --k value is required");
  for (long long k : a.k)
    if (k < 1) throw ConfigError("k", "horizons must be >= 1");
  if (a.replicates < 1) throw ConfigError("replicates", "must be >= 1");
  const RngSpec base{a.seed, 0};

  if (a.mode == "estimate") {
    CsvTable csv({"k", "estimate", "std_error", "n_replicates", "master_seed", "tool_version"});
    for (size_t i = 0; i < a.k.size(); ++i) {
      const IrEstimate e = ir_k_monte_carlo(game, scheme, a.k[i], a.replicates,
                                            base.derive(static_cast<uint64_t>(i)));
      csv.add_row({csv_number(a.k[i]), csv_number(e.estimate), csv_number(e.std_error),
                   csv_number(e.n_replicates),
                   csv_number(static_cast<unsigned long long>(a.seed)), kToolVersion});
    }
    write_text_file(a.out, csv.str());
  } else {
    if (a.k.size() != 1)
      throw ConfigError("k", "rounds mode takes exactly one --k (the horizon)");
    CsvTable csv({"replicate", "round", "state", "signal", "action", "sender_utility",
                  "n_replicates", "master_seed", "tool_version"});
    for (long long r = 0; r < a.replicates; ++r) {
      const std::vector<RoundRecord> rounds =
          simulate_rounds(game, scheme, a.k[0], base.derive(static_cast<uint64_t>(r)));
      for (const RoundRecord& rec : rounds)
        csv.add_row({csv_number(r), csv_number(rec.round), csv_number(rec.state),
                     csv_number(rec.signal), csv_number(rec.action),
                     csv_number(rec.sender_utility), csv_number(a.replicates),
                     csv_number(static_cast<unsigned long long>(a.seed)), kToolVersion});
    }
    write_text_file(a.out, csv.str());
  }
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

struct BoundsArgs {
  std::string game_path;
  std::string scheme_path;
  std::string label = "scheme";
  std::vector<long long> k = {1, 10, 100};
  long long replicates = 10000;
  uint64_t seed = 1;
  std::string out = "bounds.csv";
};

void cmd_bounds(const BoundsArgs& a) {
  const PersuasionGame game = load_game(a.game_path);
  const JointScheme scheme = load_scheme(a.scheme_path, game);
  for (long long k : a.k)
    if (k < 1) throw ConfigError("k", "horizons must be >= 1");
  if (a.replicates < 1) throw ConfigError("replicates", "must be >= 1");
  const RngSpec base{a.seed, 0};
  const double value = bpr(game, scheme);

  CsvTable csv({"scheme", "k", "bound", "bpr", "measured_irk", "std_error", "n_replicates",
                "master_seed", "tool_version"});
  for (size_t i = 0; i < a.k.size(); ++i) {
    const IrEstimate e = ir_k_monte_carlo(game, scheme, a.k[i], a.replicates,
                                          base.derive(static_cast<uint64_t>(i)));
    csv.add_row({a.label, csv_number(a.k[i]), csv_number(gap_upper_bound(game, scheme, a.k[i])),
                 csv_number(value), csv_number(e.estimate), csv_number(e.std_error),
                 csv_number(e.n_replicates), csv_number(static_cast<unsigned long long>(a.seed)),
                 kToolVersion});
  }
  write_text_file(a.out, csv.str());
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("PERSUADE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigError("PERSUADE_THREADS", "expected a positive integer, got \"" +
                                                std::string(env) + "\"");
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void cmd_run(const std::string& config_path, std::string out_dir, bool out_dir_given,
             int threads_flag) {
  if (!out_dir_given)
    if (const char* env = std::getenv("PERSUADE_OUT_DIR")) out_dir = env;
  const json config = parse_json_text(read_input_file(config_path), config_path);
  run_experiment(config, out_dir, resolve_threads(threads_flag));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persuasion-with-inference experiment tool"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  GenGameArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-game", "generate a game as JSON");
  gen_cmd->add_option("--family", gen.family, "flower | random | safety")
      ->required()
      ->check(CLI::IsMember({"flower", "random", "safety"}));
  gen_cmd->add_option("--n", gen.n, "flower: number of states");
  gen_cmd->add_option("--tau", gen.tau, "flower: payoff parameter");
  gen_cmd->add_option("--states", gen.states, "random: number of states");
  gen_cmd->add_option("--actions", gen.actions, "random: number of actions");
  gen_cmd->add_option("--nodes", gen.nodes, "safety: city nodes");
  gen_cmd->add_option("--incidents", gen.incidents, "safety: number of states");
  gen_cmd->add_option("--incident-size", gen.incident_size, "safety: nodes per incident");
  gen_cmd->add_option("--penalty", gen.penalty, "safety: false-alert penalty");
  gen_cmd->add_option("--seed", gen.seed, "master seed");
  gen_cmd->add_option("--out", gen.out, "output game JSON path");
  gen_cmd->add_option("--city-out", gen.city_out, "safety: also write the city JSON here");
  gen_cmd->callback([&]() { cmd_gen_game(gen); });

  std::string lp_game, lp_out = "scheme.json";
  uint64_t lp_seed = 1;
  CLI::App* lp_cmd = app.add_subcommand("solve-lp", "known-commitment optimal scheme");
  lp_cmd->add_option("--game", lp_game, "game JSON path")->required();
  lp_cmd->add_option("--out", lp_out, "output scheme JSON path");
  lp_cmd->add_option("--seed", lp_seed, "accepted for uniformity; the solver is deterministic");
  lp_cmd->callback([&]() { cmd_solve_lp(lp_game, lp_out); });

  OptimizeArgs sgd;
  CLI::App* sgd_cmd = app.add_subcommand("optimize-sgd", "stochastic-gradient IR_k ascent");
  sgd_cmd->add_option("--game", sgd.game_path, "game JSON path")->required();
  sgd_cmd->add_option("--k-opt", sgd.k_opt, "horizon the objective targets")
      ->check(CLI::PositiveNumber);
  sgd_cmd->add_option("--iters", sgd.iters, "iteration count");
  sgd_cmd->add_option("--eta0", sgd.eta0, "initial step size");
  sgd_cmd->add_option("--decay", sgd.decay, "step decay exponent");
  sgd_cmd->add_option("--replicates", sgd.replicates, "gradient replicates per step");
  sgd_cmd->add_option("--window", sgd.window, "tail averaging window");
  sgd_cmd->add_option("--seed", sgd.seed, "master seed");
  sgd_cmd->add_option("--out", sgd.out, "output scheme JSON path");
  sgd_cmd->add_option("--history", sgd.history, "also write the iterate history CSV here");
  sgd_cmd->callback([&]() { cmd_optimize(sgd, true); });

  OptimizeArgs br;
  CLI::App* br_cmd = app.add_subcommand("optimize-br", "bounded-rationality gradient ascent");
  br_cmd->add_option("--game", br.game_path, "game JSON path")->required();
  br_cmd->add_option("--lambda", br.lambda, "receiver rationality constant")
      ->check(CLI::NonNegativeNumber);
  br_cmd->add_option("--iters", br.iters, "iteration count");
  br_cmd->add_option("--eta0", br.eta0, "initial step size");
  br_cmd->add_option("--decay", br.decay, "step decay exponent");
  br_cmd->add_option("--seed", br.seed, "accepted for uniformity; the descent is deterministic");
  br_cmd->add_option("--out", br.out, "output scheme JSON path");
  br_cmd->add_option("--history", br.history, "also write the iterate history CSV here");
  br_cmd->callback([&]() { cmd_optimize(br, false); });

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "estimate IR_k or log rounds");
  sim_cmd->add_option("--game", sim.game_path, "game JSON path")->required();
  sim_cmd->add_option("--scheme", sim.scheme_path, "scheme JSON path")->required();
  sim_cmd->add_option("--mode", sim.mode, "estimate | rounds")
      ->check(CLI::IsMember({"estimate", "rounds"}));
  sim_cmd->add_option("--k", sim.k, "horizon (repeatable in estimate mode)");
  sim_cmd->add_option("--replicates", sim.replicates, "Monte Carlo replicates / trajectories");
  sim_cmd->add_option("--seed", sim.seed, "master seed");
  sim_cmd->add_option("--out", sim.out, "output CSV path");
  sim_cmd->callback([&]() { cmd_simulate(sim); });

  BoundsArgs bnd;
  CLI::App* bnd_cmd = app.add_subcommand("bounds", "gap bound vs measured IR_k table");
  bnd_cmd->add_option("--game", bnd.game_path, "game JSON path")->required();
  bnd_cmd->add_option("--scheme", bnd.scheme_path, "scheme JSON path")->required();
  bnd_cmd->add_option("--label", bnd.label, "scheme label for the CSV");
  bnd_cmd->add_option("--k", bnd.k, "horizons (repeatable)");
  bnd_cmd->add_option("--replicates", bnd.replicates, "Monte Carlo replicates");
  bnd_cmd->add_option("--seed", bnd.seed, "master seed");
  bnd_cmd->add_option("--out", bnd.out, "output CSV path");
  bnd_cmd->callback([&]() { cmd_bounds(bnd); });

  std::string run_config, run_out_dir = ".";
  int run_threads = 0;
  CLI::App* run_cmd = app.add_subcommand("run", "execute an experiment config");
  run_cmd->add_option("--config", run_config, "experiment config JSON path")->required();
  CLI::Option* out_dir_opt =
      run_cmd->add_option("--out-dir", run_out_dir, "output directory (env PERSUADE_OUT_DIR)");
  run_cmd->add_option("--threads", run_threads, "worker threads (env PERSUADE_THREADS)")
      ->check(CLI::PositiveNumber);
  run_cmd->callback(
      [&]() { cmd_run(run_config, run_out_dir, out_dir_opt->count() > 0, run_threads); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
