#pragma once

#include <string_view>
#include <vector>

#include "kanver/milp_model.hpp"

namespace kanver {

enum class SolveStatus { Optimal, GapTerminated, Timeout, Infeasible };

std::string_view to_string(SolveStatus status);

struct SolveConfig {
  double mip_gap = 0.15;          // relative, against max(1, |incumbent|)
  double timeout_seconds = 100.0;
  long node_limit = 1000000;      // reaching it ends with GapTerminated
  int max_binaries = 120;
};

/// `bound` is always a valid bound on the MILP optimum (upper for maximize,
/// lower for minimize), whatever the status. `objective` and `assignment`
/// describe the incumbent when `has_incumbent`.
struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  bool has_incumbent = false;
  double objective = 0.0;
  double bound = 0.0;
  std::vector<double> assignment;
  long nodes = 0;
  double seconds = 0.0;
};

/// Best-first branch and bound on the binaries over LP relaxations.
/// Exactly-one rows over binaries form branching groups: a binary fixed to 1
/// fixes its siblings to 0; the group with the largest total fractionality is
/// branched on its most fractional member, ties broken by variable name.
/// Throws SolverError when the model has more binaries than the cap or its
/// relaxation is unbounded.
SolveResult solve(const MilpModel& model, const SolveConfig& config = {});

}  // namespace kanver
