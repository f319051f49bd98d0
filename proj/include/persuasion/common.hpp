#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace persuasion {

// ---------------------------------------------------------------------------
// Error taxonomy.  Every failure mode surfaced by the library maps to one of
// these; callers (CLI included) can distinguish bad inputs from numeric
// breakdowns.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs outside an operation's documented domain (bad sizes, bad ranges).
class DomainViolation : public Error {
 public:
  using Error::Error;
};

// A signal carries (numerically) zero probability mass where positive mass
// is required.
class ZeroMarginal : public Error {
 public:
  using Error::Error;
};

// A count column is empty where a posterior estimate is required.
class ZeroColumn : public Error {
 public:
  using Error::Error;
};

// Exact enumeration was asked for more terms than the configured cap.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// Sender utilities leave [0, 1] where a bound requires that range.
class RangeViolation : public Error {
 public:
  using Error::Error;
};

// A graph operation needs a connected graph and the input is not.
class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

// A ratio or threshold metric is undefined because its denominator is <= 0.
class ZeroValue : public Error {
 public:
  using Error::Error;
};

// An iterative routine exhausted its budget before reaching tolerance.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// An optimizer iterate lost all mass on some signal column.
class DegenerateColumn : public Error {
 public:
  using Error::Error;
};

// A mathematical program has no feasible point (or the solver decided so).
class InfeasibleProgram : public Error {
 public:
  using Error::Error;
};

// A maximization program has feasible rays of unbounded objective value.
class UnboundedProgram : public Error {
 public:
  using Error::Error;
};

// Malformed run configuration; carries the offending field path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field_path, const std::string& what)
      : Error(field_path + ": " + what), field(std::move(field_path)) {}
  std::string field;
};

// ---------------------------------------------------------------------------
// Dense row-major table of doubles. Rows index states throughout the library;
// columns index signals or actions depending on context.
// ---------------------------------------------------------------------------

struct Table {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;  // row-major, size rows*cols

  Table() = default;
  Table(int r, int c, double fill = 0.0)
      : rows(r), cols(c), v(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {
    if (r < 0 || c < 0) throw DomainViolation("Table: negative dimensions");
  }

  double& operator()(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

  double sum() const {
    double t = 0.0;
    for (double x : v) t += x;
    return t;
  }
  double row_sum(int r) const {
    double t = 0.0;
    for (int c = 0; c < cols; ++c) t += (*this)(r, c);
    return t;
  }
  double col_sum(int c) const {
    double t = 0.0;
    for (int r = 0; r < rows; ++r) t += (*this)(r, c);
    return t;
  }
  std::vector<double> col(int c) const {
    std::vector<double> out(static_cast<size_t>(rows));
    for (int r = 0; r < rows; ++r) out[static_cast<size_t>(r)] = (*this)(r, c);
    return out;
  }
  bool all_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
  bool same_shape(const Table& o) const { return rows == o.rows && cols == o.cols; }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double t = 0.0;
  for (size_t i = 0; i < a.size(); ++i) t += a[i] * b[i];
  return t;
}

inline double frobenius_distance(const Table& a, const Table& b) {
  double t = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    double d = a.v[i] - b.v[i];
    t += d * d;
  }
  return std::sqrt(t);
}

}  // namespace persuasion
