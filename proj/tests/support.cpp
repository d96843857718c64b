#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kanver/branch_and_bound.hpp"

namespace testsupport {

using namespace kanver;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

namespace {

std::optional<AffineBase> maybe_affine(Rng& rng) {
  if (uniform(rng, 0.0, 1.0) < 0.7) return std::nullopt;
  return AffineBase{uniform(rng, -0.5, 0.5), uniform(rng, -0.3, 0.3)};
}

}  // namespace

UnivariateUnit random_rbf_unit(Rng& rng, double L, int centers) {
  if (centers <= 0) centers = uniform_int(rng, 2, 8);
  RbfSumParams p;
  for (int i = 0; i < centers; ++i) {
    p.centers.push_back(uniform(rng, -L, L));
    p.widths.push_back(uniform(rng, 0.15, 0.6) * L);
    p.weights.push_back(uniform(rng, -1.0, 1.0));
  }
  return UnivariateUnit(std::move(p), L, maybe_affine(rng));
}

UnivariateUnit random_bspline_unit(Rng& rng, double L) {
  const int degree = uniform_int(rng, 1, 3);
  const int n = uniform_int(rng, degree + 1, 10);
  BSplineParams p;
  p.degree = degree;
  for (int i = 0; i < degree; ++i) p.knots.push_back(-L);
  const int spans = n - degree;
  for (int i = 0; i <= spans; ++i) p.knots.push_back(i == spans ? L : -L + 2.0 * L * i / spans);
  for (int i = 0; i < degree; ++i) p.knots.push_back(L);
  for (int i = 0; i < n; ++i) p.coefficients.push_back(uniform(rng, -1.0, 1.0));
  return UnivariateUnit(std::move(p), L, maybe_affine(rng));
}

UnivariateUnit random_polynomial_unit(Rng& rng, double L) {
  // Cubic Hermite pieces through random (value, slope) pairs: C¹ by construction.
  const int pieces = uniform_int(rng, 1, 5);
  std::vector<double> x, v, d;
  for (int i = 0; i <= pieces; ++i) {
    x.push_back(i == pieces ? L : -L + 2.0 * L * i / pieces);
    v.push_back(uniform(rng, -1.0, 1.0));
    d.push_back(uniform(rng, -2.0, 2.0));
  }
  PiecewisePolynomialParams p;
  p.breakpoints = x;
  for (int i = 0; i < pieces; ++i) {
    const double h = x[i + 1] - x[i];
    const double dv = v[i + 1] - v[i];
    const double c2 = (3.0 * dv / h - 2.0 * d[i] - d[i + 1]) / h;
    const double c3 = (d[i] + d[i + 1] - 2.0 * dv / h) / (h * h);
    p.coefficients.push_back({v[i], d[i], c2, c3});
  }
  return UnivariateUnit(std::move(p), L, maybe_affine(rng));
}

UnivariateUnit random_tabulated_unit(Rng& rng, double L) {
  std::vector<double> values(static_cast<std::size_t>(uniform_int(rng, 3, 33)));
  for (auto& y : values) y = uniform(rng, -1.0, 1.0);
  return UnivariateUnit::tabulated(std::move(values), L, maybe_affine(rng));
}

UnivariateUnit random_unit(Rng& rng, double L) {
  switch (uniform_int(rng, 0, 3)) {
    case 0: return random_rbf_unit(rng, L);
    case 1: return random_bspline_unit(rng, L);
    case 2: return random_polynomial_unit(rng, L);
    default: return random_tabulated_unit(rng, L);
  }
}

double sampled_max_abs(const UnivariateUnit& unit, int n) {
  const double L = unit.domain_limit();
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(unit.eval_inner(-L + 2.0 * L * i / (n - 1))));
  return m;
}

KanNetwork random_network(Rng& rng, const NetShape& shape, double abstraction_slack) {
  // Interpolating abstractions never exceed max |ψ| at their breakpoints, so
  // one bound B per node covers both f_N and f̂_N.
  auto domain_for = [&](double bound) { return 1.25 * bound + abstraction_slack + 0.1; };
  auto output_bound = [](const UnivariateUnit& u) { return 1.05 * sampled_max_abs(u) + 0.01; };

  std::vector<double> bound(static_cast<std::size_t>(shape.widths.front()), shape.input_limit);
  std::vector<Layer> layers;
  for (std::size_t i = 0; i + 1 < shape.widths.size(); ++i) {
    Layer layer;
    std::vector<double> next;
    for (int j = 0; j < shape.widths[i + 1]; ++j) {
      LayerOutput out;
      double sum_bound = 0.0;
      for (int k = 0; k < shape.widths[i]; ++k) {
        const double L = i == 0 ? shape.input_limit : domain_for(bound[k]);
        Edge e{uniform(rng, -1.5, 1.5), random_unit(rng, L)};
        sum_bound += std::abs(e.weight) * output_bound(e.unit);
        out.inputs.push_back(std::move(e));
      }
      double node_bound = sum_bound;
      if (uniform(rng, 0.0, 1.0) < shape.outer_probability) {
        out.outer = random_unit(rng, domain_for(sum_bound));
        node_bound = output_bound(*out.outer);
      }
      next.push_back(node_bound);
      layer.outputs.push_back(std::move(out));
    }
    bound = std::move(next);
    layers.push_back(std::move(layer));
  }
  return KanNetwork(std::move(layers));
}

std::vector<UnitAbstraction> random_abstractions(Rng& rng, const KanNetwork& net,
                                                 int max_pieces, int intervals) {
  std::vector<UnitAbstraction> abs;
  for (const auto& id : net.unit_ids()) {
    const auto& u = net.unit(id);
    const Grid g(u.domain_limit(), intervals);
    const auto r = optimal_pwa(u, g, uniform_int(rng, 1, max_pieces));
    abs.push_back({r.pwa, r.discrete_error + discretization_correction(u, r.pwa, g)});
  }
  return abs;
}

std::vector<double> sample_box(Rng& rng, const InputBox& box) {
  std::vector<double> x(box.dim());
  for (std::size_t d = 0; d < box.dim(); ++d) x[d] = uniform(rng, box.lower[d], box.upper[d]);
  return x;
}

double dense_error(const UnivariateUnit& unit, const PwaFunction& pwa, int n) {
  const double L = unit.domain_limit();
  double e = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = i == n - 1 ? L : -L + 2.0 * L * i / (n - 1);
    e = std::max(e, std::abs(unit.eval_inner(z) - pwa.eval_inner(z)));
  }
  return e;
}

namespace {

double chord_error(std::span<const double> s, const Grid& grid, int j1, int j2) {
  const double n1 = grid.point(j1);
  const double slope = (s[j2] - s[j1]) / (grid.point(j2) - n1);
  double e = 0.0;
  for (int j = j1; j <= j2; ++j) {
    e = std::max(e, std::abs(s[j] - (s[j1] + (grid.point(j) - n1) * slope)));
  }
  return e;
}

void enumerate_subsets(std::span<const double> s, const Grid& grid, int pieces_left, int start,
                       double so_far, double& best) {
  const int J = grid.intervals();
  // Close the current piece at J.
  best = std::min(best, std::max(so_far, chord_error(s, grid, start, J)));
  if (pieces_left <= 1) return;
  for (int b = start + 1; b < J; ++b) {
    enumerate_subsets(s, grid, pieces_left - 1, b,
                      std::max(so_far, chord_error(s, grid, start, b)), best);
  }
}

}  // namespace

double brute_force_pwa_error(std::span<const double> samples, const Grid& grid, int k) {
  double best = std::numeric_limits<double>::infinity();
  enumerate_subsets(samples, grid, k, 0, 0.0, best);
  return best;
}

std::vector<std::vector<double>> enumerate_path_weights(
    const KanNetwork& net, std::span<const UnitErrorProfile> profiles) {
  const auto& ids = net.unit_ids();
  auto lambda = [&](const UnitId& id) { return profiles[net.unit_index(id)].lipschitz; };
  const int K = net.num_layers();
  std::vector<std::vector<double>> W(ids.size(), std::vector<double>(net.output_dim(), 0.0));

  // Walk every path from the output of node (i, j), multiplying as we go.
  std::function<void(int, int, double, std::vector<double>&)> from_node =
      [&](int i, int j, double product, std::vector<double>& acc) {
        if (i == K) {
          acc[j - 1] += product;
          return;
        }
        const auto& outs = net.layers()[i].outputs;  // layer i + 1
        for (int jp = 1; jp <= static_cast<int>(outs.size()); ++jp) {
          const UnitId unit{i + 1, jp, j};
          double p = product * std::abs(net.edge_weight(unit)) * lambda(unit);
          if (outs[jp - 1].outer) p *= lambda(UnitId{i + 1, jp, 0});
          from_node(i + 1, jp, p, acc);
        }
      };

  for (std::size_t u = 0; u < ids.size(); ++u) {
    const UnitId& id = ids[u];
    double start = 1.0;
    if (!id.is_outer()) {
      start = std::abs(net.edge_weight(id));
      if (net.layers()[id.layer - 1].outputs[id.output - 1].outer) {
        start *= lambda(UnitId{id.layer, id.output, 0});
      }
    }
    from_node(id.layer, id.output, start, W[u]);
  }
  return W;
}

BruteMck brute_force_mck(const KnapsackInstance& inst) {
  const std::size_t N = inst.options.size();
  BruteMck best;
  std::vector<int> cur(N, 0);
  auto better = [&](double value, const std::vector<int>& choice) {
    if (!best.feasible) return true;
    if (value != best.value) return value < best.value;
    for (std::size_t i = 0; i < N; ++i) {
      const double a = inst.options[i][choice[i]].value;
      const double b = inst.options[i][best.choices[i]].value;
      if (a != b) return a < b;
      if (choice[i] != best.choices[i]) return choice[i] < best.choices[i];
    }
    return false;
  };
  for (;;) {
    std::int64_t w = 0;
    double v = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      w += inst.options[i][cur[i]].weight;
      v += inst.options[i][cur[i]].value;
    }
    if (w <= inst.budget && better(v, cur)) {
      best.feasible = true;
      best.value = v;
      best.choices = cur;
    }
    std::size_t i = 0;
    while (i < N && ++cur[i] == static_cast<int>(inst.options[i].size())) cur[i++] = 0;
    if (i == N) break;
  }
  return best;
}

Exhaustive exhaustive_optimum(const MilpModel& model) {
  const auto& vars = model.variables();
  std::vector<std::vector<int>> groups;
  std::vector<bool> grouped(vars.size(), false);
  for (const auto& row : model.constraints()) {
    if (row.sense != RowSense::Equal || row.rhs != 1.0 || row.terms.empty()) continue;
    bool ok = true;
    for (const auto& t : row.terms) {
      ok = ok && t.coef == 1.0 && vars[t.var].type == VarType::Binary;
    }
    if (!ok) continue;
    std::vector<int> g;
    for (const auto& t : row.terms) {
      g.push_back(t.var);
      grouped[t.var] = true;
    }
    groups.push_back(std::move(g));
  }
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (vars[v].type == VarType::Binary && !grouped[v]) groups.push_back({static_cast<int>(v)});
  }

  LpProblem lp = relaxation(model);
  Exhaustive out;
  const bool maximize = model.objective().sense == ObjectiveSense::Maximize;

  // Depth-first over groups. A partial fixing whose relaxation is infeasible
  // has no feasible completion, so it is skipped; no objective pruning.
  std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
    ++out.lp_solves;
    const LpResult r = lp_solve(lp);
    if (r.status != LpStatus::Optimal) return;
    if (depth == groups.size()) {
      if (!out.feasible || (maximize ? r.objective > out.objective : r.objective < out.objective)) {
        out.feasible = true;
        out.objective = r.objective;
      }
      return;
    }
    const auto& g = groups[depth];
    std::vector<std::pair<double, double>> saved;
    for (int v : g) saved.emplace_back(lp.lower[v], lp.upper[v]);
    const std::size_t options = g.size() == 1 ? 2 : g.size();
    for (std::size_t c = 0; c < options; ++c) {
      for (std::size_t m = 0; m < g.size(); ++m) {
        const double val = g.size() == 1 ? static_cast<double>(c) : (m == c ? 1.0 : 0.0);
        lp.lower[g[m]] = lp.upper[g[m]] = val;
      }
      dfs(depth + 1);
    }
    for (std::size_t m = 0; m < g.size(); ++m) {
      lp.lower[g[m]] = saved[m].first;
      lp.upper[g[m]] = saved[m].second;
    }
  };
  dfs(0);
  return out;
}

namespace {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
bool gauss(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    }
    if (std::abs(A[piv][c]) < 1e-10) return false;
    std::swap(A[piv], A[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= A[c][k] * x[k];
    x[c] = s / A[c][c];
  }
  return true;
}

}  // namespace

VertexOracle vertex_enumeration(const LpProblem& lp) {
  const std::size_t n = lp.objective.size();
  struct Plane {
    std::vector<double> a;
    double rhs;
  };
  std::vector<Plane> mandatory, optional;
  for (const auto& row : lp.rows) {
    Plane p{std::vector<double>(n, 0.0), row.rhs};
    for (const auto& t : row.terms) p.a[t.var] += t.coef;
    (row.sense == RowSense::Equal ? mandatory : optional).push_back(std::move(p));
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (double bound : {lp.lower[j], lp.upper[j]}) {
      Plane p{std::vector<double>(n, 0.0), bound};
      p.a[j] = 1.0;
      optional.push_back(std::move(p));
    }
  }
  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) {
      if (x[j] < lp.lower[j] - 1e-9 || x[j] > lp.upper[j] + 1e-9) return false;
    }
    for (const auto& row : lp.rows) {
      double s = 0.0;
      for (const auto& t : row.terms) s += t.coef * x[t.var];
      const double tol = 1e-9 * std::max(1.0, std::abs(row.rhs));
      if (row.sense == RowSense::LessEqual && s > row.rhs + tol) return false;
      if (row.sense == RowSense::GreaterEqual && s < row.rhs - tol) return false;
      if (row.sense == RowSense::Equal && std::abs(s - row.rhs) > tol) return false;
    }
    return true;
  };

  VertexOracle out;
  if (mandatory.size() > n) return out;
  const std::size_t need = n - mandatory.size();
  std::vector<std::size_t> pick(need);
  for (std::size_t i = 0; i < need; ++i) pick[i] = i;
  for (;;) {
    if (need <= optional.size()) {
      std::vector<std::vector<double>> A;
      std::vector<double> b;
      for (const auto& p : mandatory) {
        A.push_back(p.a);
        b.push_back(p.rhs);
      }
      for (std::size_t i : pick) {
        A.push_back(optional[i].a);
        b.push_back(optional[i].rhs);
      }
      std::vector<double> x;
      if (gauss(A, b, x) && feasible(x)) {
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * x[j];
        if (!out.feasible || (lp.maximize ? obj > out.objective : obj < out.objective)) {
          out.feasible = true;
          out.objective = obj;
        }
      }
    } else {
      break;
    }
    // Next combination of `need` indices out of optional.size().
    std::size_t i = need;
    while (i > 0 && pick[i - 1] == optional.size() - need + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < need; ++k) pick[k] = pick[k - 1] + 1;
  }
  return out;
}

double dual_bound(const LpProblem& lp, std::span<const double> duals) {
  const std::size_t n = lp.objective.size();
  std::vector<double> r = lp.objective;
  double bound = 0.0;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    double y = duals[i];
    // Project onto the sign-feasible cone so the bound stays valid.
    const bool le = lp.rows[i].sense == RowSense::LessEqual;
    const bool ge = lp.rows[i].sense == RowSense::GreaterEqual;
    if (lp.maximize ? (le && y < 0.0) || (ge && y > 0.0) : (le && y > 0.0) || (ge && y < 0.0)) {
      y = 0.0;
    }
    bound += y * lp.rows[i].rhs;
    for (const auto& t : lp.rows[i].terms) r[t.var] -= y * t.coef;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double a = r[j] * lp.lower[j];
    const double b = r[j] * lp.upper[j];
    bound += lp.maximize ? std::max(a, b) : std::min(a, b);
  }
  return bound;
}

LpProblem random_lp(Rng& rng, int vars, int rows) {
  LpProblem lp;
  std::vector<double> x0;
  for (int j = 0; j < vars; ++j) {
    lp.lower.push_back(uniform(rng, -5.0, 0.0));
    lp.upper.push_back(uniform(rng, 0.5, 5.0));
    x0.push_back(uniform(rng, lp.lower.back(), lp.upper.back()));
    lp.objective.push_back(uniform(rng, -1.0, 1.0));
  }
  const int equalities = std::min(vars / 2, uniform_int(rng, 0, 2));
  for (int i = 0; i < rows; ++i) {
    LpRow row;
    double act = 0.0;
    for (int j = 0; j < vars; ++j) {
      if (uniform(rng, 0.0, 1.0) < 0.3) continue;
      const double a = std::round(uniform(rng, -4.0, 4.0) * 4.0) / 4.0;
      if (a == 0.0) continue;
      row.terms.push_back({j, a});
      act += a * x0[j];
    }
    if (row.terms.empty()) row.terms.push_back({0, 1.0}), act = x0[0];
    if (i < equalities) {
      row.sense = RowSense::Equal;
      row.rhs = act;
    } else if (uniform(rng, 0.0, 1.0) < 0.5) {
      row.sense = RowSense::LessEqual;
      row.rhs = act + uniform(rng, 0.0, 1.0);
    } else {
      row.sense = RowSense::GreaterEqual;
      row.rhs = act - uniform(rng, 0.0, 1.0);
    }
    lp.rows.push_back(std::move(row));
  }
  lp.maximize = uniform(rng, 0.0, 1.0) < 0.5;
  return lp;
}

}  // namespace testsupport
