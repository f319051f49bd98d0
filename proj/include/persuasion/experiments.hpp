#pragma once

#include <string>

#include <json.hpp>

namespace persuasion {

// Executes the experiment described by `config` and writes its result files
// into out_dir (created if missing).  config must carry a "kind" field
// naming one of: flower-compare, random-games, safety, bounds-table,
// stackelberg-gap.  A fully-defaulted copy of the configuration is written
// as config_echo.json; re-running it reproduces the run byte for byte.
//
// A run.partial marker exists in out_dir while results are being written
// and is removed on success.  `threads` sizes the worker pool; every work
// item owns a stream derived from the master seed by its position in
// config order, so outputs are independent of the thread count.
//
// Throws ConfigError for malformed configs; numeric failures propagate as
// the underlying error types.
void run_experiment(const nlohmann::json& config, const std::string& out_dir, int threads);

}  // namespace persuasion
