#pragma once

#include <vector>

#include "persuasion/common.hpp"

namespace persuasion {

// Dense linear program in the form
//   maximize    c'x
//   subject to  eq_lhs[i]'x  = eq_rhs[i]
//               ge_lhs[j]'x >= ge_rhs[j]
//               x >= 0
// Sizes are desk scale (a few hundred variables), so a dense tableau is fine.
struct LinearProgram {
  int n_vars = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> eq_lhs;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> ge_lhs;
  std::vector<double> ge_rhs;
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  // Optimality certificate: max over primal constraint violations and
  // positive reduced costs at termination.  <= 1e-7 for a certified optimum.
  double kkt_residual = 0.0;
};

// Two-phase primal simplex with Dantzig pricing and a Bland fallback after a
// stall.  Throws InfeasibleProgram / UnboundedProgram / NoConvergence.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace persuasion
