#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kanver/branch_and_bound.hpp"
#include "kanver/encode.hpp"
#include "kanver/error_prop.hpp"
#include "kanver/knapsack.hpp"
#include "kanver/network.hpp"
#include "kanver/pwa.hpp"

namespace kanver {

/// Defaults tiered by model parameter count.
struct HyperParams {
  int max_pieces = 262;  // S_max
  double mip_gap = 0.15;
  double timeout_seconds = 100.0;
};
/// < 1K parameters: (262, 0.15, 100 s); < 10K: (262, 0.15, 150 s); otherwise (175, 0.2, 200 s).
HyperParams preset_for(std::size_t parameter_count);

struct VerifyConfig {
  int grid_intervals = kDefaultGridIntervals;
  int max_pieces = 262;  // capped at grid_intervals
  SolveConfig solve;
  EncodeOptions encode;
  std::optional<int> uniform_pieces;  // vanilla allocation instead of the knapsack
  std::optional<std::filesystem::path> table_cache;
};

/// Config with the preset for the network's parameter count applied.
VerifyConfig default_config(const KanNetwork& net);

/// Per-unit trade-off tables, Lipschitz profiles, and path weights: computed
/// once and reused for every output, box, budget, and sensitivity query.
struct AbstractionContext {
  std::vector<TradeoffTable> tables;
  std::vector<UnitErrorProfile> profiles;  // pwa_error unset
  PathWeightMap weights;
  double seconds = 0.0;
};
AbstractionContext prepare(const KanNetwork& net, const VerifyConfig& config);

/// 3.4 times the smallest bound any allocation reaches for `output`.
double default_delta(const AbstractionContext& ctx, int output);

struct StageTimes {
  double tables = 0.0;
  double allocation = 0.0;
  double encoding = 0.0;
  double solving = 0.0;
};

struct RangeResult {
  int output = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;        // requested budget
  double total_error = 0.0;  // δ_total = Σ W·e of the allocation
  SolveStatus min_status = SolveStatus::Infeasible;
  SolveStatus max_status = SolveStatus::Infeasible;
  double min_incumbent = 0.0;  // f̂ witnesses, when found
  double max_incumbent = 0.0;
  long nodes = 0;
  int binaries = 0;
  Allocation allocation;
  StageTimes times;
  std::vector<std::string> notes;

  double width() const { return beta - alpha; }
  bool closed() const {
    return min_status == SolveStatus::Optimal && max_status == SolveStatus::Optimal;
  }
};

/// α <= f_N(x) <= β for every x in the box: both bounds are solver best
/// bounds, so they stay sound under gaps and timeouts. Throws InfeasibleBudget
/// when δ is below the minimum achievable bound.
RangeResult verify_range(const KanNetwork& net, const AbstractionContext& ctx, const InputBox& box,
                         double delta, const VerifyConfig& config, int output = 0);
RangeResult verify_range(const KanNetwork& net, const InputBox& box, double delta,
                         const VerifyConfig& config, int output = 0);

/// Min and max of output `output` over `samples` uniform points of the box.
Interval empirical_range(const KanNetwork& net, const InputBox& box, int samples = 10000,
                         int output = 0, std::uint64_t seed = 1);

struct SensitivityResult {
  int feature = 0;
  double radius = 0.0;
  double max_divergence = 0.0;  // MD
  double empirical = 0.0;
  double total_error = 0.0;
  double upper = 0.0;  // bound on max (y_A − y_B) over the abstractions
  double lower = 0.0;  // bound on min (y_A − y_B)
  SolveStatus max_status = SolveStatus::Infeasible;
  SolveStatus min_status = SolveStatus::Infeasible;
  bool most_sensitive = false;
  double seconds = 0.0;
};

/// MD = max(upper, −lower) + 2·δ_total bounds |f_N(x) − f_N(x')| over x in the
/// box and x' equal to x except |x'_d − x_d| <= ε.
SensitivityResult sensitivity(const KanNetwork& net, const AbstractionContext& ctx,
                              const InputBox& box, int feature, double radius, double delta,
                              const VerifyConfig& config, int output = 0, int samples = 10000);
/// All features; the one with the largest MD is flagged.
std::vector<SensitivityResult> sensitivity_sweep(const KanNetwork& net,
                                                 const AbstractionContext& ctx,
                                                 const InputBox& box, double radius, double delta,
                                                 const VerifyConfig& config, int output = 0,
                                                 int samples = 10000);

/// Largest |f_N(x) − f_N(x')| over paired samples.
double empirical_divergence(const KanNetwork& net, const InputBox& box, int feature, double radius,
                            int samples = 10000, int output = 0, std::uint64_t seed = 2);

/// Units with |ψ(±L)| > 1e-9, whose zero extension jumps at the boundary.
std::vector<UnitId> boundary_jump_units(const KanNetwork& net);

nlohmann::json to_json(const RangeResult& r);
nlohmann::json to_json(const SensitivityResult& r);

}  // namespace kanver
