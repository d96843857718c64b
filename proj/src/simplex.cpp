#include "kanver/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kanver/errors.hpp"

namespace kanver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr int kDegenerateBeforeBland = 50;

enum class At : unsigned char { Lower, Upper, Basic };

class Tableau {
 public:
  Tableau(const LpProblem& p) : m_(static_cast<int>(p.rows.size())), n_(static_cast<int>(p.lower.size())) {
    // Column layout: structurals, one slack per inequality row, then artificials.
    lo_ = p.lower;
    hi_ = p.upper;
    aux_.assign(m_, -1);
    aux_sign_.assign(m_, 0.0);
    slack_of_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) {
      if (p.rows[i].sense == RowSense::Equal) continue;
      slack_of_[i] = static_cast<int>(lo_.size());
      lo_.push_back(0.0);
      hi_.push_back(kInf);
    }
    x_.assign(lo_.size(), 0.0);
    at_.assign(lo_.size(), At::Lower);
    for (int j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        at_[j] = At::Lower;
      } else {
        x_[j] = hi_[j];
        at_[j] = At::Upper;
      }
    }
    std::vector<double> resid(m_);
    for (int i = 0; i < m_; ++i) {
      double s = p.rows[i].rhs;
      for (const auto& t : p.rows[i].terms) s -= t.coef * x_[t.var];
      resid[i] = s;
    }
    std::vector<int> art_rows;
    for (int i = 0; i < m_; ++i) {
      const double g = p.rows[i].sense == RowSense::LessEqual ? 1.0 : -1.0;
      if (slack_of_[i] >= 0 && resid[i] / g >= 0.0) {
        aux_[i] = slack_of_[i];
        aux_sign_[i] = g;
      } else {
        art_rows.push_back(i);
      }
    }
    first_art_ = static_cast<int>(lo_.size());
    for (int i : art_rows) {
      aux_[i] = static_cast<int>(lo_.size());
      aux_sign_[i] = resid[i] >= 0.0 ? 1.0 : -1.0;
      lo_.push_back(0.0);
      hi_.push_back(kInf);
      x_.push_back(0.0);
      at_.push_back(At::Lower);
    }
    N_ = static_cast<int>(lo_.size());
    T_.assign(static_cast<std::size_t>(m_) * N_, 0.0);
    basis_.assign(m_, -1);
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double inv = 1.0 / aux_sign_[i];
      for (const auto& t : p.rows[i].terms) at(i, t.var) += t.coef * inv;
      if (slack_of_[i] >= 0) {
        at(i, slack_of_[i]) = (p.rows[i].sense == RowSense::LessEqual ? 1.0 : -1.0) * inv;
      }
      if (aux_[i] >= first_art_) at(i, aux_[i]) = 1.0;
      basis_[i] = aux_[i];
      at_[aux_[i]] = At::Basic;
      xb_[i] = resid[i] * inv;
      x_[aux_[i]] = xb_[i];
    }
  }

  int num_artificials() const { return N_ - first_art_; }

  /// Maximizes cost·x from the current basis. Returns false when unbounded.
  bool optimize(const std::vector<double>& cost, int& iterations) {
    d_ = cost;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &T_[static_cast<std::size_t>(i) * N_];
      for (int j = 0; j < N_; ++j) d_[j] -= cb * row[j];
    }
    for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
    const long limit = 200L * (m_ + N_) + 1000;
    int degenerate = 0;
    std::vector<int> nz;
    for (;;) {
      if (++iterations > limit) throw SolverError("simplex iteration limit reached");
      const bool bland = degenerate >= kDegenerateBeforeBland;
      int q = -1;
      double best = 0.0;
      for (int j = 0; j < N_; ++j) {
        if (at_[j] == At::Basic || hi_[j] - lo_[j] <= 0.0) continue;
        const double score = at_[j] == At::Lower ? d_[j] : -d_[j];
        if (score <= kCostTol) continue;
        if (bland) {
          q = j;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
        }
      }
      if (q < 0) return true;
      const double dir = at_[q] == At::Lower ? 1.0 : -1.0;

      int r = -1;
      double step = kInf;
      bool to_upper = false;
      for (int i = 0; i < m_; ++i) {
        const double a = T_[static_cast<std::size_t>(i) * N_ + q];
        if (std::abs(a) <= kPivotTol) continue;
        const int b = basis_[i];
        double lim;
        bool up;
        if (dir * a > 0.0) {
          lim = std::max(0.0, xb_[i] - lo_[b]) / (dir * a);
          up = false;
        } else {
          if (!std::isfinite(hi_[b])) continue;
          lim = std::max(0.0, hi_[b] - xb_[i]) / (-dir * a);
          up = true;
        }
        bool take = lim < step;
        if (!take && lim == step && r >= 0) {
          take = bland ? b < basis_[r]
                       : std::abs(a) > std::abs(T_[static_cast<std::size_t>(r) * N_ + q]);
        }
        if (take) {
          step = lim;
          r = i;
          to_upper = up;
        }
      }
      const double flip = hi_[q] - lo_[q];
      if (!std::isfinite(step) && !std::isfinite(flip)) return false;
      degenerate = std::min(step, flip) <= 1e-12 ? degenerate + 1 : 0;

      if (flip <= step) {
        for (int i = 0; i < m_; ++i) {
          const double a = T_[static_cast<std::size_t>(i) * N_ + q];
          if (a != 0.0) xb_[i] -= dir * a * flip;
        }
        at_[q] = dir > 0 ? At::Upper : At::Lower;
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        continue;
      }

      for (int i = 0; i < m_; ++i) {
        const double a = T_[static_cast<std::size_t>(i) * N_ + q];
        if (a != 0.0) xb_[i] -= dir * a * step;
      }
      const int leaving = basis_[r];
      at_[leaving] = to_upper ? At::Upper : At::Lower;
      x_[leaving] = to_upper ? hi_[leaving] : lo_[leaving];
      const double entering_value = x_[q] + dir * step;

      double* prow = &T_[static_cast<std::size_t>(r) * N_];
      const double piv = prow[q];
      nz.clear();
      for (int j = 0; j < N_; ++j) {
        if (prow[j] != 0.0) {
          prow[j] /= piv;
          nz.push_back(j);
        }
      }
      prow[q] = 1.0;
      for (int i = 0; i < m_; ++i) {
        if (i == r) continue;
        double* row = &T_[static_cast<std::size_t>(i) * N_];
        const double f = row[q];
        if (f == 0.0) continue;
        for (int j : nz) row[j] -= f * prow[j];
        row[q] = 0.0;
      }
      const double fd = d_[q];
      if (fd != 0.0) {
        for (int j : nz) d_[j] -= fd * prow[j];
        d_[q] = 0.0;
      }
      basis_[r] = q;
      at_[q] = At::Basic;
      xb_[r] = entering_value;
    }
  }

  void fix_artificials() {
    for (int j = first_art_; j < N_; ++j) hi_[j] = 0.0;
  }

  double artificial_sum() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] >= first_art_) s += xb_[i];
    }
    for (int j = first_art_; j < N_; ++j) {
      if (at_[j] != At::Basic) s += x_[j];
    }
    return s;
  }

  std::vector<double> values() const {
    std::vector<double> v = x_;
    for (int i = 0; i < m_; ++i) v[basis_[i]] = xb_[i];
    return v;
  }

  /// Recomputes basic values from the original rows by a dense LU solve.
  void polish(const LpProblem& p) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    Eigen::VectorXd rhs(m_);
    std::vector<int> pos(N_, -1);
    for (int i = 0; i < m_; ++i) pos[basis_[i]] = i;
    const auto v = values();
    for (int i = 0; i < m_; ++i) {
      double s = p.rows[i].rhs;
      for (const auto& t : p.rows[i].terms) {
        if (pos[t.var] >= 0) B(i, pos[t.var]) += t.coef;
        else s -= t.coef * v[t.var];
      }
      if (slack_of_[i] >= 0) {
        const double g = p.rows[i].sense == RowSense::LessEqual ? 1.0 : -1.0;
        if (pos[slack_of_[i]] >= 0) B(i, pos[slack_of_[i]]) += g;
        else s -= g * v[slack_of_[i]];
      }
      if (aux_[i] >= first_art_) {
        if (pos[aux_[i]] >= 0) B(i, pos[aux_[i]]) += aux_sign_[i];
        else s -= aux_sign_[i] * v[aux_[i]];
      }
      rhs(i) = s;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) return;
    for (int i = 0; i < m_; ++i) xb_[i] = sol(i);
  }

  /// y_i from the reduced cost of row i's identity column (slack or artificial).
  std::vector<double> duals(const LpProblem& p) const {
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (slack_of_[i] >= 0) {
        const double g = p.rows[i].sense == RowSense::LessEqual ? 1.0 : -1.0;
        y[i] = -d_[slack_of_[i]] / g;
      } else {
        y[i] = -d_[aux_[i]] / aux_sign_[i];
      }
    }
    return y;
  }

 private:
  double& at(int i, int j) { return T_[static_cast<std::size_t>(i) * N_ + j]; }

  int m_, n_, N_ = 0, first_art_ = 0;
  std::vector<double> lo_, hi_, x_, xb_, d_, T_;
  std::vector<At> at_;
  std::vector<int> basis_, aux_, slack_of_;
  std::vector<double> aux_sign_;
};

double max_residual(const LpProblem& p, const std::vector<double>& x) {
  double v = 0.0;
  for (const auto& row : p.rows) {
    double a = 0.0;
    for (const auto& t : row.terms) a += t.coef * x[t.var];
    const double scale = 1.0 + std::abs(row.rhs);
    switch (row.sense) {
      case RowSense::LessEqual: v = std::max(v, (a - row.rhs) / scale); break;
      case RowSense::GreaterEqual: v = std::max(v, (row.rhs - a) / scale); break;
      case RowSense::Equal: v = std::max(v, std::abs(a - row.rhs) / scale); break;
    }
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    v = std::max({v, p.lower[j] - x[j], x[j] - p.upper[j]});
  }
  return v;
}

}  // namespace

LpResult lp_solve(const LpProblem& p) {
  const std::size_t n = p.lower.size();
  if (p.upper.size() != n || p.objective.size() != n) {
    throw InvalidArgument("LP bound and objective sizes disagree");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(p.lower[j]) || std::isnan(p.upper[j]) || p.lower[j] > p.upper[j]) {
      LpResult r;
      r.status = LpStatus::Infeasible;
      return r;
    }
    if (!std::isfinite(p.lower[j]) && !std::isfinite(p.upper[j])) {
      throw InvalidArgument("LP variable " + std::to_string(j) + " has no finite bound");
    }
  }
  for (const auto& row : p.rows) {
    for (const auto& t : row.terms) {
      if (t.var < 0 || static_cast<std::size_t>(t.var) >= n) {
        throw InvalidArgument("LP row references variable " + std::to_string(t.var));
      }
    }
  }

  Tableau tab(p);
  LpResult res;
  const std::size_t N = n + static_cast<std::size_t>(std::count_if(
                                  p.rows.begin(), p.rows.end(),
                                  [](const LpRow& r) { return r.sense != RowSense::Equal; })) +
                        tab.num_artificials();
  if (tab.num_artificials() > 0) {
    std::vector<double> phase1(N, 0.0);
    for (std::size_t j = N - tab.num_artificials(); j < N; ++j) phase1[j] = -1.0;
    tab.optimize(phase1, res.iterations);
    double scale = 1.0;
    for (const auto& row : p.rows) scale = std::max(scale, std::abs(row.rhs));
    if (tab.artificial_sum() > 1e-9 * scale) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    tab.fix_artificials();
  }
  std::vector<double> cost(N, 0.0);
  const double sign = p.maximize ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n; ++j) cost[j] = sign * p.objective[j];
  if (!tab.optimize(cost, res.iterations)) {
    res.status = LpStatus::Unbounded;
    return res;
  }
  auto v = tab.values();
  res.x.assign(v.begin(), v.begin() + static_cast<long>(n));
  if (max_residual(p, res.x) > 1e-9) {
    tab.polish(p);
    v = tab.values();
    res.x.assign(v.begin(), v.begin() + static_cast<long>(n));
  }
  for (std::size_t j = 0; j < n; ++j) res.x[j] = std::clamp(res.x[j], p.lower[j], p.upper[j]);
  res.status = LpStatus::Optimal;
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += p.objective[j] * res.x[j];
  res.duals = tab.duals(p);
  if (!p.maximize) {
    for (auto& y : res.duals) y = -y;
  }
  return res;
}

LpProblem relaxation(const MilpModel& model) {
  LpProblem p;
  for (const auto& v : model.variables()) {
    p.lower.push_back(v.lower);
    p.upper.push_back(v.upper);
  }
  p.objective.assign(model.variables().size(), 0.0);
  for (const auto& t : model.objective().terms) p.objective[t.var] += t.coef;
  p.maximize = model.objective().sense == ObjectiveSense::Maximize;
  for (const auto& c : model.constraints()) p.rows.push_back({c.terms, c.sense, c.rhs});
  return p;
}

}  // namespace kanver
