#include "kanver/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kanver/errors.hpp"

namespace kanver {

MckSolution solve_mck(const KnapsackInstance& inst) {
  const auto n = inst.options.size();
  if (n == 0) throw InvalidArgument("knapsack needs at least one option");
  if (inst.budget < 0) throw InvalidArgument("knapsack budget must be >= 0");
  std::int64_t min_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& items = inst.options[i];
    if (items.empty() || items.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw InvalidArgument("option " + std::to_string(i) + " needs 1..65535 items");
    }
    std::int64_t lightest = std::numeric_limits<std::int64_t>::max();
    for (const auto& it : items) {
      if (it.weight < 0 || !std::isfinite(it.value)) {
        throw InvalidArgument("item weights must be >= 0 and values finite");
      }
      lightest = std::min(lightest, it.weight);
    }
    min_total += lightest;
  }
  if (min_total > inst.budget) {
    throw InfeasibleBudget("lightest items need weight " + std::to_string(min_total) +
                               ", budget is " + std::to_string(inst.budget) + " (deficit " +
                               std::to_string(min_total - inst.budget) + ")",
                           static_cast<double>(min_total));
  }

  const auto width = static_cast<std::size_t>(inst.budget) + 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best[b]: optimum over options i..n-1 with budget b; filled from the back.
  std::vector<double> best(width, 0.0), next(width);
  std::vector<std::uint16_t> choice(n * width);
  for (std::size_t i = n; i-- > 0;) {
    const auto& items = inst.options[i];
    for (std::size_t b = 0; b < width; ++b) {
      double v = kInf;
      std::uint16_t arg = 0;
      for (std::size_t j = 0; j < items.size(); ++j) {
        const auto w = static_cast<std::size_t>(items[j].weight);
        if (items[j].weight > inst.budget || w > b) continue;
        const double cand = items[j].value + best[b - w];
        if (cand < v || (cand == v && items[j].value < items[arg].value)) {
          v = cand;
          arg = static_cast<std::uint16_t>(j);
        }
      }
      next[b] = v;
      choice[i * width + b] = arg;
    }
    best.swap(next);
  }

  MckSolution sol;
  sol.total_value = best[width - 1];
  auto b = static_cast<std::size_t>(inst.budget);
  for (std::size_t i = 0; i < n; ++i) {
    const int j = choice[i * width + b];
    sol.choices.push_back(j);
    const auto w = inst.options[i][j].weight;
    sol.total_weight += w;
    b -= static_cast<std::size_t>(w);
  }
  return sol;
}

namespace {

/// Smallest integer n with n·c >= x, snapping ratios that are integral up to rounding.
std::int64_t scaled_ceil(double x, double c) {
  const double r = x / c;
  const double n = std::round(r);
  double w = (std::abs(r - n) <= 1e-9 * std::max(1.0, r) && n * c >= x) ? n : std::ceil(r);
  while (w * c < x) w += 1.0;
  return static_cast<std::int64_t>(w);
}

/// Largest integer n with n·c <= x.
std::int64_t scaled_floor(double x, double c) {
  const double r = x / c;
  const double n = std::round(r);
  double w = (std::abs(r - n) <= 1e-9 * std::max(1.0, r) && n * c <= x) ? n : std::floor(r);
  while (w > 0 && w * c > x) w -= 1.0;
  return static_cast<std::int64_t>(w);
}

void check_tables(const KanNetwork& net, std::span<const TradeoffTable> tables,
                  const PathWeightMap& weights, int output) {
  if (tables.size() != net.num_units() || weights.units.size() != net.num_units()) {
    throw InvalidArgument("expected one trade-off table and path weight per unit");
  }
  if (output < 0 || output >= weights.num_outputs) throw InvalidArgument("output out of range");
  for (std::size_t u = 0; u < tables.size(); ++u) {
    if (tables[u].entries.empty()) {
      throw InvalidArgument("empty trade-off table for unit " + net.unit_ids()[u].str());
    }
  }
}

Allocation assemble(const KanNetwork& net, std::span<const TradeoffTable> tables,
                    const PathWeightMap& weights, int output, const std::vector<int>& budgets,
                    bool exact_budget = false) {
  Allocation a;
  a.units = net.unit_ids();
  a.output = output;
  a.budgets = budgets;
  a.exact_budget = exact_budget;
  for (std::size_t u = 0; u < tables.size(); ++u) {
    const auto& e = tables[u].at(budgets[u]);
    const auto& pwa = exact_budget ? e.budget_pwa : e.pwa;
    const double err = exact_budget ? e.budget_error : e.corrected_error;
    const double w = weights.weight(u, output);
    a.pieces.push_back(pwa.num_pieces());
    a.errors.push_back(err);
    a.path_weights.push_back(w);
    a.total_error += w * err;
    a.total_pieces += pwa.num_pieces();
    a.total_binaries += pwa.num_pieces() + 2;
  }
  return a;
}

}  // namespace

double minimum_achievable_error(std::span<const TradeoffTable> tables, const PathWeightMap& weights,
                                int output) {
  double total = 0.0;
  for (std::size_t u = 0; u < tables.size(); ++u) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : tables[u].entries) best = std::min(best, e.corrected_error);
    total += weights.weight(u, output) * best;
  }
  return total;
}

AllocationProblem build_instance(const KanNetwork& net, std::span<const TradeoffTable> tables,
                                 const PathWeightMap& weights, int output, double delta,
                                 double scale) {
  check_tables(net, tables, weights, output);
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("error budget must be > 0");
  const double floor_error = minimum_achievable_error(tables, weights, output);
  if (floor_error > delta) {
    throw InfeasibleBudget("error budget " + std::to_string(delta) +
                               " is below the minimum achievable bound " +
                               std::to_string(floor_error),
                           floor_error);
  }
  AllocationProblem p;
  p.delta = delta;
  p.scale = scale > 0.0 ? scale : delta / 1e5;
  p.instance.budget = scaled_floor(delta, p.scale);
  for (std::size_t u = 0; u < tables.size(); ++u) {
    const double w = weights.weight(u, output);
    p.path_weight.push_back(w);
    struct Cand {
      int budget;
      int pieces;
      std::int64_t weight;
    };
    std::vector<Cand> cands;
    for (const auto& e : tables[u].entries) {
      cands.push_back({e.pieces, e.pwa.num_pieces(), scaled_ceil(w * e.corrected_error, p.scale)});
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) { return a.pieces < b.pieces; });
    // Pareto filter: keep an entry only if it is strictly lighter than every
    // entry with fewer or equal pieces.
    std::vector<Cand> kept;
    for (const auto& c : cands) {
      if (kept.empty() || c.weight < kept.back().weight) kept.push_back(c);
    }
    std::reverse(kept.begin(), kept.end());  // weights strictly ascending
    std::vector<KnapsackItem> items;
    std::vector<int> budgets;
    for (const auto& c : kept) {
      items.push_back({c.weight, static_cast<double>(c.pieces)});
      budgets.push_back(c.budget);
    }
    p.instance.options.push_back(std::move(items));
    p.item_budget.push_back(std::move(budgets));
  }
  return p;
}

namespace {

/// Fallback when the scaled instance is infeasible: per unit the entry with the
/// smallest weighted error (fewest pieces on ties), or the smallest uniform
/// allocation meeting δ if that has fewer pieces. Total error <= δ holds
/// whenever δ >= minimum_achievable_error.
Allocation finest_allocation(const KanNetwork& net, std::span<const TradeoffTable> tables,
                             const PathWeightMap& weights, int output, double delta) {
  std::vector<int> budgets;
  for (const auto& t : tables) {
    int best = 1;
    for (int k = 2; k <= t.max_pieces(); ++k) {
      if (t.at(k).corrected_error < t.at(best).corrected_error) best = k;
    }
    budgets.push_back(best);
  }
  Allocation a = assemble(net, tables, weights, output, budgets);
  try {
    Allocation u = smallest_uniform_allocation(net, tables, weights, output, delta);
    if (u.total_pieces < a.total_pieces || a.total_error > delta) return u;
  } catch (const InfeasibleBudget&) {
  }
  if (a.total_error > delta) {
    throw InfeasibleBudget("error budget " + std::to_string(delta) +
                               " is below the minimum achievable bound",
                           a.total_error);
  }
  return a;
}

}  // namespace

Allocation optimized_allocation(const KanNetwork& net, std::span<const TradeoffTable> tables,
                                const PathWeightMap& weights, int output, double delta,
                                double scale) {
  AllocationProblem p = build_instance(net, tables, weights, output, delta, scale);
  for (;;) {
    MckSolution sol;
    try {
      sol = solve_mck(p.instance);
    } catch (const InfeasibleBudget&) {
      // Ceiling scaling overshoots by up to one unit of c per option, so a δ
      // within N·c of the floor can be integer-infeasible yet real-feasible.
      return finest_allocation(net, tables, weights, output, delta);
    }
    std::vector<int> budgets;
    for (std::size_t u = 0; u < sol.choices.size(); ++u) {
      budgets.push_back(p.item_budget[u][sol.choices[u]]);
    }
    Allocation a = assemble(net, tables, weights, output, budgets);
    if (a.total_error <= delta) {
      // Ceiling scaling can price out a uniform allocation that meets δ in
      // real arithmetic; never return more pieces than that one.
      try {
        Allocation u = smallest_uniform_allocation(net, tables, weights, output, delta);
        if (u.total_pieces < a.total_pieces) return u;
      } catch (const InfeasibleBudget&) {
      }
      return a;
    }
    // Floating-point sums can exceed δ by an ulp; tighten and retry.
    --p.instance.budget;
  }
}

Allocation vanilla_allocation(const KanNetwork& net, std::span<const TradeoffTable> tables,
                              const PathWeightMap& weights, int output, int pieces_per_unit) {
  check_tables(net, tables, weights, output);
  for (const auto& t : tables) {
    if (pieces_per_unit < 1 || pieces_per_unit > t.max_pieces()) {
      throw InvalidArgument("uniform piece count " + std::to_string(pieces_per_unit) +
                            " outside the trade-off tables");
    }
  }
  return assemble(net, tables, weights, output,
                  std::vector<int>(tables.size(), pieces_per_unit), true);
}

Allocation smallest_uniform_allocation(const KanNetwork& net, std::span<const TradeoffTable> tables,
                                       const PathWeightMap& weights, int output, double delta) {
  check_tables(net, tables, weights, output);
  int kmax = std::numeric_limits<int>::max();
  for (const auto& t : tables) kmax = std::min(kmax, t.max_pieces());
  for (int p = 1; p <= kmax; ++p) {
    Allocation a = vanilla_allocation(net, tables, weights, output, p);
    if (a.total_error <= delta) return a;
  }
  throw InfeasibleBudget("no uniform piece count meets error budget " + std::to_string(delta),
                         vanilla_allocation(net, tables, weights, output, kmax).total_error);
}

nlohmann::json allocation_to_json(const Allocation& a) {
  nlohmann::json units = nlohmann::json::array();
  for (std::size_t u = 0; u < a.units.size(); ++u) {
    units.push_back({{"unit", a.units[u].str()},
                     {"budget", a.budgets[u]},
                     {"pieces", a.pieces[u]},
                     {"error", a.errors[u]},
                     {"path_weight", a.path_weights[u]}});
  }
  return {{"version", 1},
          {"output", a.output},
          {"total_error", a.total_error},
          {"total_pieces", a.total_pieces},
          {"total_binaries", a.total_binaries},
          {"exact_budget", a.exact_budget},
          {"units", units}};
}

}  // namespace kanver
