#include "persuasion/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace persuasion {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* name, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(name);
  if (it == j.end()) throw ConfigError(path + "." + name, "missing field");
  return *it;
}

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

long long require_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

std::vector<double> require_number_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(require_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Rectangular 2-D array -> Table; every row must have the same length.
Table require_table(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty 2-D array");
  std::vector<std::vector<double>> rows;
  for (size_t r = 0; r < j.size(); ++r)
    rows.push_back(require_number_array(j[r], path + "[" + std::to_string(r) + "]"));
  for (size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != rows[0].size()) throw ConfigError(path, "ragged rows");
  if (rows[0].empty()) throw ConfigError(path, "empty rows");
  Table t(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int r = 0; r < t.rows; ++r)
    for (int c = 0; c < t.cols; ++c) t(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
  return t;
}

json table_to_json(const Table& t) {
  json rows = json::array();
  for (int r = 0; r < t.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < t.cols; ++c) row.push_back(t(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json game_to_json(const PersuasionGame& game) {
  json j;
  j["n_states"] = game.n_states();
  j["n_actions"] = game.n_actions();
  j["prior"] = game.prior().vec();
  j["u_sender"] = table_to_json(game.u_sender());
  j["u_receiver"] = table_to_json(game.u_receiver());
  return j;
}

PersuasionGame game_from_json(const json& j) {
  const long long n_states = require_integer(require_field(j, "n_states", "game"), "game.n_states");
  const long long n_actions = require_integer(require_field(j, "n_actions", "game"), "game.n_actions");
  if (n_states < 1) throw ConfigError("game.n_states", "must be >= 1");
  if (n_actions < 1) throw ConfigError("game.n_actions", "must be >= 1");
  std::vector<double> prior = require_number_array(require_field(j, "prior", "game"), "game.prior");
  if (static_cast<long long>(prior.size()) != n_states)
    throw ConfigError("game.prior", "length does not match n_states");
  Table us = require_table(require_field(j, "u_sender", "game"), "game.u_sender");
  Table ur = require_table(require_field(j, "u_receiver", "game"), "game.u_receiver");
  if (us.rows != n_states || us.cols != n_actions)
    throw ConfigError("game.u_sender", "shape does not match n_states x n_actions");
  if (ur.rows != n_states || ur.cols != n_actions)
    throw ConfigError("game.u_receiver", "shape does not match n_states x n_actions");
  try {
    return PersuasionGame(Distribution(std::move(prior)), std::move(us), std::move(ur));
  } catch (const DomainViolation& e) {
    throw ConfigError("game", e.what());
  }
}

json scheme_to_json(const JointScheme& scheme) {
  json j;
  j["x"] = table_to_json(scheme.x());
  return j;
}

JointScheme scheme_from_json(const json& j) {
  Table x = require_table(require_field(j, "x", "scheme"), "scheme.x");
  try {
    return JointScheme(std::move(x));
  } catch (const DomainViolation& e) {
    throw ConfigError("scheme.x", e.what());
  }
}

json city_to_json(const SafetyCity& city) {
  json j;
  j["n_nodes"] = city.n_nodes;
  json edges = json::array();
  for (const auto& [u, v, w] : city.edges) edges.push_back(json::array({u, v, w}));
  j["edges"] = std::move(edges);
  j["center"] = city.center;
  j["incidents"] = city.incidents;
  j["penalty"] = city.penalty;
  return j;
}

SafetyCity city_from_json(const json& j) {
  SafetyCity city;
  const long long n = require_integer(require_field(j, "n_nodes", "city"), "city.n_nodes");
  if (n < 1) throw ConfigError("city.n_nodes", "must be >= 1");
  city.n_nodes = static_cast<int>(n);

  const json& edges = require_field(j, "edges", "city");
  if (!edges.is_array()) throw ConfigError("city.edges", "expected an array");
  for (size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "city.edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    if (!e.is_array() || e.size() != 3) throw ConfigError(path, "expected [u, v, weight]");
    const long long u = require_integer(e[0], path + "[0]");
    const long long v = require_integer(e[1], path + "[1]");
    const double w = require_number(e[2], path + "[2]");
    if (u < 0 || u >= n || v < 0 || v >= n) throw ConfigError(path, "node index out of range");
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError(path + "[2]", "weight must be positive");
    city.edges.emplace_back(static_cast<int>(u), static_cast<int>(v), w);
  }

  const long long center = require_integer(require_field(j, "center", "city"), "city.center");
  if (center < 0 || center >= n) throw ConfigError("city.center", "node index out of range");
  city.center = static_cast<int>(center);

  const json& inc = require_field(j, "incidents", "city");
  if (!inc.is_array() || inc.empty()) throw ConfigError("city.incidents", "expected a non-empty array");
  for (size_t i = 0; i < inc.size(); ++i) {
    const std::string path = "city.incidents[" + std::to_string(i) + "]";
    if (!inc[i].is_array() || inc[i].empty()) throw ConfigError(path, "expected a non-empty array");
    std::vector<int> nodes;
    for (size_t t = 0; t < inc[i].size(); ++t) {
      const long long v = require_integer(inc[i][t], path + "[" + std::to_string(t) + "]");
      if (v < 0 || v >= n) throw ConfigError(path + "[" + std::to_string(t) + "]", "node index out of range");
      nodes.push_back(static_cast<int>(v));
    }
    city.incidents.push_back(std::move(nodes));
  }

  const double penalty = require_number(require_field(j, "penalty", "city"), "city.penalty");
  if (!(penalty > 0.0) || !std::isfinite(penalty))
    throw ConfigError("city.penalty", "must be positive");
  city.penalty = penalty;
  return city;
}

json parse_json_text(const std::string& text, const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError(origin, "invalid JSON");
  return j;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_number(long long v) { return std::to_string(v); }
std::string csv_number(unsigned long long v) { return std::to_string(v); }

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw DomainViolation("CsvTable: need at least one column");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw DomainViolation("CsvTable: row arity does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (size_t c = 0; c < columns_.size(); ++c) {
    if (c) out << ',';
    out << columns_[c];
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << row[c];
    }
    out << '\n';
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("read failure: " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw Error("write failure: " + path);
}

}  // namespace persuasion
