#include "kanver/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>

#include "kanver/errors.hpp"
#include "kanver/simplex.hpp"

namespace kanver {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapTerminated: return "gap-terminated";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
  double bound;  // parent LP value in maximize sense
  long id;
  std::vector<std::int8_t> fix;  // per binary: -1 free, 0, 1
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

double gap_tolerance(double gap, double incumbent) {
  return std::max(gap, 1e-9) * std::max(1.0, std::abs(incumbent));
}

}  // namespace

SolveResult solve(const MilpModel& model, const SolveConfig& cfg) {
  if (!(cfg.mip_gap >= 0.0)) throw InvalidArgument("MIP gap must be >= 0");
  if (!(cfg.timeout_seconds > 0.0)) throw InvalidArgument("timeout must be > 0");
  const int nbin = model.num_binaries();
  if (nbin > cfg.max_binaries) {
    throw SolverError("model has " + std::to_string(nbin) + " binaries, over the built-in cap of " +
                      std::to_string(cfg.max_binaries) +
                      "; write it with --emit-lp and solve it externally");
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const LpProblem base = relaxation(model);
  const double sense = base.maximize ? 1.0 : -1.0;
  const auto& vars = model.variables();

  std::vector<int> binaries;
  std::vector<int> slot(vars.size(), -1);
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].type == VarType::Binary) {
      slot[j] = static_cast<int>(binaries.size());
      binaries.push_back(static_cast<int>(j));
    }
  }
  // Branching groups: exactly-one rows over binaries, then leftover singletons.
  std::vector<std::vector<int>> groups;  // binary slots
  std::vector<std::vector<int>> groups_of(binaries.size());
  for (const auto& row : model.constraints()) {
    if (row.sense != RowSense::Equal || row.rhs != 1.0 || row.terms.size() < 2) continue;
    const bool ok = std::all_of(row.terms.begin(), row.terms.end(), [&](const Term& t) {
      return t.coef == 1.0 && slot[t.var] >= 0;
    });
    if (!ok) continue;
    std::vector<int> g;
    for (const auto& t : row.terms) g.push_back(slot[t.var]);
    for (int s : g) groups_of[s].push_back(static_cast<int>(groups.size()));
    groups.push_back(std::move(g));
  }
  for (std::size_t s = 0; s < binaries.size(); ++s) {
    if (groups_of[s].empty()) {
      groups_of[s].push_back(static_cast<int>(groups.size()));
      groups.push_back({static_cast<int>(s)});
    }
  }
  auto name_of_slot = [&](int s) -> const std::string& { return vars[binaries[s]].name; };
  std::vector<std::string> group_key;
  for (const auto& g : groups) {
    std::string key = name_of_slot(g.front());
    for (int s : g) key = std::min(key, name_of_slot(s));
    group_key.push_back(std::move(key));
  }

  SolveResult res;
  double incumbent = -std::numeric_limits<double>::infinity();
  double pruned = -std::numeric_limits<double>::infinity();

  auto solve_node = [&](const std::vector<std::int8_t>& fix) {
    LpProblem lp = base;
    for (std::size_t s = 0; s < binaries.size(); ++s) {
      if (fix[s] < 0) continue;
      lp.lower[binaries[s]] = std::max(lp.lower[binaries[s]], static_cast<double>(fix[s]));
      lp.upper[binaries[s]] = std::min(lp.upper[binaries[s]], static_cast<double>(fix[s]));
    }
    auto r = lp_solve(lp);
    if (r.status == LpStatus::Unbounded) {
      throw SolverError("LP relaxation is unbounded; a variable lacks a finite big-M bound");
    }
    return r;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push({std::numeric_limits<double>::infinity(), next_id++,
             std::vector<std::int8_t>(binaries.size(), -1)});

  auto finish = [&](SolveStatus status, double bound) {
    res.status = status;
    res.bound = sense * std::max({bound, pruned, incumbent});
    if (res.has_incumbent) res.objective = sense * incumbent;
    res.seconds = elapsed();
    return res;
  };

  while (!open.empty()) {
    if (res.has_incumbent && open.top().bound - incumbent <= gap_tolerance(cfg.mip_gap, incumbent)) {
      return finish(SolveStatus::Optimal, open.top().bound);
    }
    if (res.nodes >= cfg.node_limit) return finish(SolveStatus::GapTerminated, open.top().bound);
    if (elapsed() > cfg.timeout_seconds) return finish(SolveStatus::Timeout, open.top().bound);

    Node node = open.top();
    open.pop();
    ++res.nodes;
    auto lp = solve_node(node.fix);
    if (lp.status == LpStatus::Infeasible) continue;
    const double value = std::min(sense * lp.objective, node.bound);
    if (res.has_incumbent && value - incumbent <= gap_tolerance(cfg.mip_gap, incumbent)) {
      pruned = std::max(pruned, value);
      continue;
    }

    // Fractionality per group.
    int best_group = -1;
    double best_frac = kIntTol;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      double frac = 0.0;
      for (int s : groups[g]) {
        const double w = lp.x[binaries[s]];
        frac += std::min(w, 1.0 - w) > kIntTol ? std::min(w, 1.0 - w) : 0.0;
      }
      if (frac > best_frac ||
          (best_group >= 0 && frac == best_frac && group_key[g] < group_key[best_group])) {
        best_frac = frac;
        best_group = static_cast<int>(g);
      }
    }

    if (best_group < 0) {
      std::vector<std::int8_t> fix = node.fix;
      for (std::size_t s = 0; s < binaries.size(); ++s) {
        fix[s] = lp.x[binaries[s]] > 0.5 ? 1 : 0;
      }
      auto leaf = solve_node(fix);
      if (leaf.status != LpStatus::Optimal) leaf = lp;
      const double v = sense * leaf.objective;
      if (!res.has_incumbent || v > incumbent) {
        incumbent = v;
        res.has_incumbent = true;
        res.assignment = leaf.x;
        for (std::size_t s = 0; s < binaries.size(); ++s) {
          res.assignment[binaries[s]] = fix[s];
        }
      }
      continue;
    }

    int pick = -1;
    double pick_frac = -1.0;
    for (int s : groups[best_group]) {
      const double w = lp.x[binaries[s]];
      const double f = std::min(w, 1.0 - w);
      if (f <= kIntTol) continue;
      if (f > pick_frac || (f == pick_frac && name_of_slot(s) < name_of_slot(pick))) {
        pick_frac = f;
        pick = s;
      }
    }
    Node up{value, next_id++, node.fix};
    up.fix[pick] = 1;
    for (int g : groups_of[pick]) {
      for (int s : groups[g]) {
        if (s != pick) up.fix[s] = 0;
      }
    }
    Node down{value, next_id++, node.fix};
    down.fix[pick] = 0;
    // Sibling fixing can contradict an earlier fix to 1; such a child is empty.
    bool up_ok = true;
    for (int g : groups_of[pick]) {
      for (int s : groups[g]) {
        if (s != pick && node.fix[s] == 1) up_ok = false;
      }
    }
    if (up_ok && node.fix[pick] != 0) open.push(std::move(up));
    if (node.fix[pick] != 1) open.push(std::move(down));
  }
  if (!res.has_incumbent) {
    res.status = SolveStatus::Infeasible;
    res.bound = sense * -std::numeric_limits<double>::infinity();
    res.seconds = elapsed();
    return res;
  }
  return finish(SolveStatus::Optimal, incumbent);
}

}  // namespace kanver
