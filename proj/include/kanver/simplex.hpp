#pragma once

#include <vector>

#include "kanver/milp_model.hpp"

namespace kanver {

struct LpRow {
  std::vector<Term> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

/// optimize objective·x subject to rows and lower <= x <= upper. Every
/// variable needs at least one finite bound.
struct LpProblem {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> objective;
  std::vector<LpRow> rows;
  bool maximize = true;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  /// Row multipliers y: objective·x <= (maximize) or >= (minimize)
  /// b·y + Σ_j extreme of (c − Aᵀy)_j·x_j over [lower_j, upper_j].
  std::vector<double> duals;
  int iterations = 0;
};

/// Bounded-variable dense-tableau primal simplex with a phase-1 on artificials,
/// Dantzig pricing, and Bland's rule while pivots stay degenerate. The
/// returned point has row residuals <= 1e-8. Throws InvalidArgument on
/// inconsistent dimensions and SolverError when the iteration limit is hit.
LpResult lp_solve(const LpProblem& problem);

/// LP relaxation of a MILP with binaries relaxed to [0, 1].
LpProblem relaxation(const MilpModel& model);

}  // namespace kanver
