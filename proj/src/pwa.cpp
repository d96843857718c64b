#include "kanver/pwa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kanver/errors.hpp"

namespace kanver {

Grid::Grid(double limit, int intervals) : limit_(limit), intervals_(intervals) {
  if (!(limit > 0.0) || !std::isfinite(limit)) throw InvalidArgument("grid limit must be > 0");
  if (intervals < 2) throw InvalidArgument("grid needs at least 2 intervals");
  spacing_ = 2.0 * limit / intervals;
}

PwaFunction::PwaFunction(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() != values.size() || breakpoints.size() < 2) {
    throw InvalidArgument("PWA needs matching breakpoints and values, at least two of each");
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i]) || !std::isfinite(values[i])) {
      throw InvalidArgument("PWA breakpoints and values must be finite");
    }
    if (i > 0 && breakpoints[i] < breakpoints[i - 1]) {
      throw InvalidArgument("PWA breakpoints must be non-decreasing");
    }
    if (i == 0 || breakpoints[i] != breakpoints_.back()) {
      breakpoints_.push_back(breakpoints[i]);
      values_.push_back(values[i]);
    }
  }
  if (breakpoints_.size() < 2) throw InvalidArgument("PWA domain is a single point");
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    const double a = (values_[i + 1] - values_[i]) / (breakpoints_[i + 1] - breakpoints_[i]);
    slopes_.push_back(a);
    intercepts_.push_back(values_[i] - a * breakpoints_[i]);
  }
}

PwaFunction PwaFunction::interpolate(const UnivariateUnit& unit, std::vector<double> breakpoints) {
  std::vector<double> values;
  values.reserve(breakpoints.size());
  for (double z : breakpoints) values.push_back(unit.eval_inner(z));
  return PwaFunction(std::move(breakpoints), std::move(values));
}

int PwaFunction::piece_index(double z) const {
  auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end(), z);
  const auto idx = static_cast<int>(it - breakpoints_.begin()) - 1;
  return std::clamp(idx, 0, num_pieces() - 1);
}

double PwaFunction::eval_inner(double z) const {
  z = std::clamp(z, breakpoints_.front(), breakpoints_.back());
  const int i = piece_index(z);
  return values_[i] + (z - breakpoints_[i]) * slopes_[i];
}

double PwaFunction::eval(double z) const {
  if (z <= breakpoints_.front() || z >= breakpoints_.back()) return 0.0;
  return eval_inner(z);
}

double PwaFunction::max_abs_slope() const {
  double m = 0.0;
  for (double a : slopes_) m = std::max(m, std::abs(a));
  return m;
}

double PwaFunction::max_abs_value() const {
  double m = 0.0;
  for (int i = 0; i < num_pieces(); ++i) {
    m = std::max(m, std::abs(slopes_[i] * breakpoints_[i] + intercepts_[i]));
    m = std::max(m, std::abs(slopes_[i] * breakpoints_[i + 1] + intercepts_[i]));
  }
  return m;
}

std::vector<double> sample_grid(const UnivariateUnit& unit, const Grid& grid) {
  std::vector<double> v(grid.intervals() + 1);
  for (int j = 0; j <= grid.intervals(); ++j) v[j] = unit.eval_inner(grid.point(j));
  return v;
}

double single_piece_error(std::span<const double> samples, const Grid& grid, int j1, int j2) {
  if (j1 < 0 || j2 <= j1 || j2 > grid.intervals() ||
      samples.size() != static_cast<std::size_t>(grid.intervals() + 1)) {
    throw InvalidArgument("single-piece error needs 0 <= j1 < j2 <= j_max");
  }
  const double n1 = grid.point(j1);
  const double s = (samples[j2] - samples[j1]) / (grid.point(j2) - n1);
  double e = 0.0;
  for (int j = j1; j <= j2; ++j) {
    e = std::max(e, std::abs(samples[j] - (samples[j1] + (grid.point(j) - n1) * s)));
  }
  return e;
}

double single_piece_error(const UnivariateUnit& unit, const Grid& grid, int j1, int j2) {
  const auto samples = sample_grid(unit, grid);
  return single_piece_error(samples, grid, j1, j2);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// V[k][j]: best max error covering grid points j..j_max with at most k pieces.
struct Memo {
  int n = 0;  // j_max
  std::vector<double> samples;
  std::vector<std::vector<double>> value;
  std::vector<std::vector<int>> choice;  // next breakpoint index, -1 if none
};

Memo solve_memo(const UnivariateUnit& unit, const Grid& grid, int max_pieces) {
  if (max_pieces < 1) throw InvalidArgument("piece budget must be >= 1");
  Memo m;
  m.n = grid.intervals();
  const int kmax = std::min(max_pieces, m.n);
  m.samples = sample_grid(unit, grid);

  const auto n1 = static_cast<std::size_t>(m.n + 1);
  std::vector<double> spe(n1 * n1, 0.0);
  for (int a = 0; a < m.n; ++a) {
    for (int b = a + 1; b <= m.n; ++b) spe[a * n1 + b] = single_piece_error(m.samples, grid, a, b);
  }

  m.value.assign(kmax + 1, std::vector<double>(n1, kInf));
  m.choice.assign(kmax + 1, std::vector<int>(n1, -1));
  m.value[0][m.n] = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    auto& row = m.value[k];
    const auto& prev = m.value[k - 1];
    row[m.n] = 0.0;
    for (int a = 0; a < m.n; ++a) {
      double best = kInf;
      int arg = -1;
      for (int b = a + 1; b <= m.n; ++b) {
        const double v = std::max(spe[a * n1 + b], prev[b]);
        if (v < best) {
          best = v;
          arg = b;
        }
      }
      row[a] = best;
      m.choice[k][a] = arg;
    }
  }
  return m;
}

PwaResult reconstruct(const Memo& m, const Grid& grid, int k) {
  std::vector<int> idx{0};
  int j = 0;
  while (j < m.n) {
    j = m.choice[k][j];
    --k;
    idx.push_back(j);
  }
  std::vector<double> bp, vals;
  for (int i : idx) {
    bp.push_back(grid.point(i));
    vals.push_back(m.samples[i]);
  }
  return PwaResult{PwaFunction(std::move(bp), std::move(vals)), 0.0, std::move(idx)};
}

}  // namespace

PwaResult optimal_pwa(const UnivariateUnit& unit, const Grid& grid, int max_pieces) {
  const Memo m = solve_memo(unit, grid, max_pieces);
  const int k = static_cast<int>(m.value.size()) - 1;
  PwaResult r = reconstruct(m, grid, k);
  r.discrete_error = m.value[k][0];
  return r;
}

double discretization_correction(const UnivariateUnit& unit, const PwaFunction& pwa,
                                 const Grid& grid) {
  return (pwa.max_abs_slope() + unit.max_abs_derivative()) * grid.spacing();
}

const TradeoffEntry& TradeoffTable::at(int pieces) const {
  if (pieces < 1 || pieces > max_pieces()) {
    throw InvalidArgument("no trade-off entry for " + std::to_string(pieces) + " pieces");
  }
  return entries[pieces - 1];
}

TradeoffTable build_tradeoff_table(const UnivariateUnit& unit, const Grid& grid, int max_pieces) {
  const Memo m = solve_memo(unit, grid, max_pieces);
  const int kmax = static_cast<int>(m.value.size()) - 1;
  TradeoffTable t;
  t.grid_intervals = grid.intervals();
  t.lipschitz = unit.max_abs_derivative();
  t.entries.reserve(kmax);
  for (int k = 1; k <= kmax; ++k) {
    PwaResult r = reconstruct(m, grid, k);
    const double corrected =
        m.value[k][0] + (r.pwa.max_abs_slope() + t.lipschitz) * grid.spacing();
    if (k == 1 || corrected < t.entries.back().corrected_error) {
      t.entries.push_back(TradeoffEntry{k, m.value[k][0], corrected, k, r.pwa, r.pwa, corrected});
    } else {
      TradeoffEntry e = t.entries.back();
      e.pieces = k;
      e.discrete_error = m.value[k][0];
      e.budget_pwa = std::move(r.pwa);
      e.budget_error = corrected;
      t.entries.push_back(std::move(e));
    }
  }
  return t;
}

}  // namespace kanver
