#pragma once

#include <span>
#include <vector>

#include "kanver/unit.hpp"

namespace kanver {

/// Uniform grid over [-L, L] with j_max intervals; point(j) = -L + j·Δ.
class Grid {
 public:
  /// Throws InvalidArgument unless L > 0 and j_max >= 2.
  Grid(double limit, int intervals);

  double limit() const { return limit_; }
  int intervals() const { return intervals_; }
  double spacing() const { return spacing_; }
  double point(int j) const { return j == intervals_ ? limit_ : -limit_ + j * spacing_; }

 private:
  double limit_;
  int intervals_;
  double spacing_;
};

inline constexpr int kDefaultGridIntervals = 256;

/// Continuous piecewise-affine interpolant on [-L, L] = [z_0, z_k], zero outside.
class PwaFunction {
 public:
  /// Breakpoints must be non-decreasing with one value each; coincident
  /// breakpoints collapse into one. Throws InvalidArgument otherwise.
  PwaFunction(std::vector<double> breakpoints, std::vector<double> values);
  /// Interpolates ψ (its inner, un-extended values) at the given breakpoints.
  static PwaFunction interpolate(const UnivariateUnit& unit, std::vector<double> breakpoints);

  int num_pieces() const { return static_cast<int>(breakpoints_.size()) - 1; }
  double limit() const { return breakpoints_.back(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double slope(int piece) const { return slopes_[piece]; }
  double intercept(int piece) const { return intercepts_[piece]; }

  /// Zero for z <= -L or z >= L.
  double eval(double z) const;
  double operator()(double z) const { return eval(z); }
  /// Interpolant on the closed domain, clamped outside.
  double eval_inner(double z) const;
  /// Piece whose closed interval holds z (the leftmost at a shared breakpoint).
  int piece_index(double z) const;

  double max_abs_slope() const;
  /// max_i max(0, |a_i z_i + b_i|, |a_i z_{i+1} + b_i|).
  double max_abs_value() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  std::vector<double> intercepts_;
};

/// ψ sampled at every grid point (inner values, endpoints included).
std::vector<double> sample_grid(const UnivariateUnit& unit, const Grid& grid);

/// Max deviation at grid points j1..j2 between ψ and the chord through
/// (point(j1), ψ) and (point(j2), ψ). Requires 0 <= j1 < j2 <= j_max.
double single_piece_error(const UnivariateUnit& unit, const Grid& grid, int j1, int j2);
double single_piece_error(std::span<const double> samples, const Grid& grid, int j1, int j2);

struct PwaResult {
  PwaFunction pwa;
  double discrete_error;
  std::vector<int> grid_indices;  // breakpoint positions on the grid
};

/// Optimal interpolating PWA with at most `max_pieces` pieces and breakpoints
/// on grid points, minimizing the max error over grid points. Ties go to the
/// leftmost split. Throws InvalidArgument when max_pieces < 1.
PwaResult optimal_pwa(const UnivariateUnit& unit, const Grid& grid, int max_pieces);

/// (max_i |a_i| + max |ψ'|)·Δ: added to the grid error it bounds the error on the continuum.
double discretization_correction(const UnivariateUnit& unit, const PwaFunction& pwa,
                                 const Grid& grid);

/// One row of a trade-off table.
///
/// `discrete_error` is the memo-table optimum for at most `pieces` pieces.
/// `corrected_error` bounds the continuous error of the stored abstraction
/// (`pwa`), which is the DP solution for the piece budget k' <= `pieces` with
/// the smallest corrected bound; usually k' == pieces. Keeping the best
/// earlier certificate makes corrected_error non-increasing in `pieces`.
/// `budget_pwa` and `budget_error` are the DP solution at exactly `pieces`
/// and its own corrected bound; fixed-segment baselines use those.
struct TradeoffEntry {
  int pieces = 1;
  double discrete_error = 0.0;
  double corrected_error = 0.0;
  int certified_budget = 1;  // k' above
  PwaFunction pwa;
  PwaFunction budget_pwa;
  double budget_error = 0.0;
};

struct TradeoffTable {
  int grid_intervals = 0;
  double lipschitz = 0.0;  // max |ψ'| over [-L, L] used in the corrections
  std::vector<TradeoffEntry> entries;  // entries[k - 1] for k = 1..k_max

  int max_pieces() const { return static_cast<int>(entries.size()); }
  const TradeoffEntry& at(int pieces) const;
};

/// One DP run at k_max, with every k in [1, k_max] read off the memo table.
TradeoffTable build_tradeoff_table(const UnivariateUnit& unit, const Grid& grid, int max_pieces);

}  // namespace kanver
