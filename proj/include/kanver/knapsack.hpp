#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "kanver/error_prop.hpp"
#include "kanver/network.hpp"
#include "kanver/pwa.hpp"

namespace kanver {

struct KnapsackItem {
  std::int64_t weight = 0;
  double value = 0.0;
};

/// Pick exactly one item per option with Σ weight <= budget, minimizing Σ value.
struct KnapsackInstance {
  std::vector<std::vector<KnapsackItem>> options;
  std::int64_t budget = 0;
};

struct MckSolution {
  std::vector<int> choices;  // item index per option
  double total_value = 0.0;
  std::int64_t total_weight = 0;
};

/// Exact DP in O(budget · options · items). Among optimal solutions returns the
/// lexicographically smallest (value, index) sequence in option order. Throws
/// InfeasibleBudget (minimum_achievable = Σ of per-option minimum weights)
/// when even the lightest items overflow the budget.
MckSolution solve_mck(const KnapsackInstance& instance);

/// Knapsack view of an allocation problem: option u is unit u, its items are
/// the Pareto-optimal (pieces, weighted error) entries of the unit's table.
struct AllocationProblem {
  KnapsackInstance instance;
  std::vector<std::vector<int>> item_budget;  // trade-off entry k of each item
  std::vector<double> path_weight;            // W_u for the chosen output
  double scale = 0.0;                         // c
  double delta = 0.0;
};

/// Item weight ceil(W_u·e_u(k)/c), value = pieces of the stored abstraction,
/// budget floor(δ/c); c <= 0 selects δ/1e5. Throws InvalidArgument for δ <= 0
/// and InfeasibleBudget when even the finest entries exceed δ.
AllocationProblem build_instance(const KanNetwork& net, std::span<const TradeoffTable> tables,
                                 const PathWeightMap& weights, int output, double delta,
                                 double scale = 0.0);

struct Allocation {
  std::vector<UnitId> units;
  std::vector<int> budgets;  // chosen trade-off entry per unit
  std::vector<int> pieces;   // pieces of the stored abstraction
  std::vector<double> errors;
  std::vector<double> path_weights;
  int output = 0;
  double total_error = 0.0;  // Σ W_u · e_u
  int total_pieces = 0;
  int total_binaries = 0;  // Σ (pieces + 2)
  bool exact_budget = false;  // abstractions are the entries' budget_pwa, not pwa
};

/// Minimum total pieces subject to Σ W_u·e_u <= δ, verified with unscaled reals.
Allocation optimized_allocation(const KanNetwork& net, std::span<const TradeoffTable> tables,
                                const PathWeightMap& weights, int output, double delta,
                                double scale = 0.0);

/// Fixed-segment baseline: every unit gets the DP solution at exactly
/// `pieces_per_unit` (the entries' budget_pwa). Throws InvalidArgument unless
/// 1 <= pieces_per_unit <= every table's k_max.
Allocation vanilla_allocation(const KanNetwork& net, std::span<const TradeoffTable> tables,
                              const PathWeightMap& weights, int output, int pieces_per_unit);

/// Smallest uniform entry whose bound is <= δ; throws InfeasibleBudget if none.
Allocation smallest_uniform_allocation(const KanNetwork& net, std::span<const TradeoffTable> tables,
                                       const PathWeightMap& weights, int output, double delta);

/// Σ_u W_u · min_k e_u(k): the smallest bound any allocation reaches.
double minimum_achievable_error(std::span<const TradeoffTable> tables, const PathWeightMap& weights,
                                int output);

/// `.alloc.json` document.
nlohmann::json allocation_to_json(const Allocation& alloc);

}  // namespace kanver
