#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "persuasion/game.hpp"
#include "persuasion/games.hpp"
#include "persuasion/scheme.hpp"

namespace persuasion {

// Stamped into every emitted CSV so result files identify the build that
// produced them.
inline constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// JSON shapes.  Fixed field names:
//   game:   {"n_states", "n_actions", "prior": [...], "u_sender": [[...]],
//            "u_receiver": [[...]]}           rows = states, cols = actions
//   scheme: {"x": [[...]]}                    rows = states, cols = signals
//   city:   {"n_nodes", "edges": [[u,v,w]], "center", "incidents": [[...]],
//            "penalty"}
// Readers ignore unknown sibling fields; writers may add informational ones
// (solve-lp attaches "objective").  Malformed input throws ConfigError with
// the offending field path.
// ---------------------------------------------------------------------------

nlohmann::json game_to_json(const PersuasionGame& game);
PersuasionGame game_from_json(const nlohmann::json& j);

nlohmann::json scheme_to_json(const JointScheme& scheme);
JointScheme scheme_from_json(const nlohmann::json& j);

nlohmann::json city_to_json(const SafetyCity& city);
SafetyCity city_from_json(const nlohmann::json& j);

// Parses text as JSON; throws ConfigError naming `origin` on failure.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

// ---------------------------------------------------------------------------
// CSV emission.  Numbers print with %.17g (round-trip exact), infinities as
// "inf"/"-inf", so identical doubles always produce identical bytes.
// ---------------------------------------------------------------------------

std::string csv_number(double v);
std::string csv_number(long long v);
std::string csv_number(unsigned long long v);
inline std::string csv_number(int v) { return csv_number(static_cast<long long>(v)); }

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  // Cell count must match the column count.
  void add_row(std::vector<std::string> cells);
  // Header line plus rows, each terminated by '\n'.
  std::string str() const;
  int n_rows() const { return static_cast<int>(rows_.size()); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// Small file helpers (throw persuasion::Error on I/O failure).
// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace persuasion
