// Acceptance runner: one PASS/FAIL line per criterion, each with its measured
// evidence and runtime. Exit status is nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "kanver/benchmarks.hpp"
#include "kanver/branch_and_bound.hpp"
#include "kanver/encode.hpp"
#include "kanver/errors.hpp"
#include "kanver/verify.hpp"
#include "support.hpp"

using namespace kanver;
using testsupport::Rng;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = seconds_since(t0);
  const bool in_time = s < limit_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::ostringstream line;
  line.precision(3);
  line << (pass ? "PASS " : "FAIL ") << name << " [" << std::fixed << s << " s, limit "
       << limit_seconds << " s" << (in_time ? "" : ", over time") << "] " << o.detail;
  std::cout << line.str() << std::endl;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome dp_optimality() {
  Rng rng(1001);
  int mismatches = 0, bitwise = 0;
  for (int t = 0; t < 200; ++t) {
    const double L = testsupport::uniform(rng, 0.5, 2.5);
    const auto u = testsupport::random_unit(rng, L);
    const Grid g(L, testsupport::uniform_int(rng, 2, 24));
    const int k = testsupport::uniform_int(rng, 1, 4);
    const double dp = optimal_pwa(u, g, k).discrete_error;
    const double brute = testsupport::brute_force_pwa_error(sample_grid(u, g), g, k);
    if (dp == brute) {
      ++bitwise;
    } else if (std::abs(dp - brute) > 1e-12 * std::max(1.0, std::abs(brute))) {
      ++mismatches;
    }
  }
  return {mismatches == 0,
          "200 units, " + std::to_string(bitwise) + " bitwise equal, " + std::to_string(mismatches) +
              " mismatches"};
}

Outcome correction_sandwich() {
  Rng rng(1002);
  int below = 0, above = 0;
  double tightest = INFINITY;
  for (int t = 0; t < 100; ++t) {
    const double L = testsupport::uniform(rng, 0.5, 2.5);
    const auto u = testsupport::random_unit(rng, L);
    const int J = testsupport::uniform_int(rng, 8, 128);
    const Grid g(L, J);
    const auto r = optimal_pwa(u, g, testsupport::uniform_int(rng, 1, 8));
    const double corr = discretization_correction(u, r.pwa, g);
    const double dense = testsupport::dense_error(u, r.pwa, 100 * J + 1);
    if (dense < r.discrete_error - 1e-9) ++below;
    if (dense > r.discrete_error + corr + 1e-9) ++above;
    tightest = std::min(tightest, r.discrete_error + corr - dense);
  }
  return {below == 0 && above == 0, "100 units, " + std::to_string(below) + " below, " +
                                        std::to_string(above) + " above; smallest margin " +
                                        fmt(tightest)};
}

Outcome global_error_soundness() {
  Rng rng(1003);
  long violations = 0, samples = 0;
  double worst_ratio = 0.0;
  for (int t = 0; t < 100; ++t) {
    const testsupport::NetShape shape{{testsupport::uniform_int(rng, 1, 3), testsupport::uniform_int(rng, 1, 3),
                          testsupport::uniform_int(rng, 1, 3)},
                         0.3,
                         1.0};
    const auto net = testsupport::random_network(rng, shape);
    const auto abs = testsupport::random_abstractions(rng, net, 6);
    std::vector<double> errors;
    for (const auto& a : abs) errors.push_back(a.error);
    const auto profiles = make_profiles(net, errors);
    const auto map = path_weights(net, profiles);
    std::vector<double> bound(static_cast<std::size_t>(net.output_dim()));
    for (int o = 0; o < net.output_dim(); ++o) bound[o] = global_error_bound(map, profiles, o);
    const InputBox box(std::vector<double>(net.input_dim(), -0.999),
                       std::vector<double>(net.input_dim(), 0.999));
    for (int s = 0; s < 10000; ++s) {
      const auto x = testsupport::sample_box(rng, box);
      const auto f = eval_network(net, x);
      const auto g = eval_abstract(net, abs, x);
      for (int o = 0; o < net.output_dim(); ++o) {
        const double d = std::abs(f[o] - g[o]);
        if (d > bound[o]) ++violations;
        if (bound[o] > 0) worst_ratio = std::max(worst_ratio, d / bound[o]);
      }
      ++samples;
    }
  }
  return {violations == 0, "100 nets x 10^4 inputs, " + std::to_string(violations) +
                               " violations; largest |f - f_hat| / bound " + fmt(worst_ratio)};
}

double time_mck(const KnapsackInstance& inst) {
  double best = INFINITY;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    volatile double v = solve_mck(inst).total_value;
    (void)v;
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

KnapsackInstance scaling_instance(Rng& rng, int n, int k, std::int64_t budget) {
  KnapsackInstance inst;
  inst.budget = budget;
  for (int i = 0; i < n; ++i) {
    std::vector<KnapsackItem> items;
    std::int64_t w = 0;
    for (int j = 0; j < k; ++j) {
      items.push_back({w, static_cast<double>(k - j)});
      w += 1 + static_cast<std::int64_t>(testsupport::uniform(rng, 0.0, 2.0 * budget / (n * k)));
    }
    inst.options.push_back(std::move(items));
  }
  return inst;
}

// Least-squares slope of log t against log size.
double loglog_slope(const std::vector<double>& size, const std::vector<double>& t) {
  const double n = static_cast<double>(size.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < size.size(); ++i) {
    const double x = std::log(size[i]), y = std::log(t[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome knapsack_exactness() {
  Rng rng(1004);
  int mismatches = 0, infeasible = 0;
  for (int t = 0; t < 500; ++t) {
    const int n = testsupport::uniform_int(rng, 1, 8);
    int kmax = 1;
    while (std::pow(kmax + 1, n) <= 65536.0 && kmax < 16) ++kmax;
    const int k = testsupport::uniform_int(rng, 1, kmax);
    KnapsackInstance inst;
    std::int64_t heavy = 0;
    for (int i = 0; i < n; ++i) {
      std::vector<KnapsackItem> items;
      std::int64_t w = testsupport::uniform_int(rng, 0, 3);
      for (int j = 0; j < k; ++j) {
        items.push_back({w, static_cast<double>(testsupport::uniform_int(rng, 0, 30))});
        w += testsupport::uniform_int(rng, 1, 8);
      }
      heavy += items.back().weight;
      inst.options.push_back(std::move(items));
    }
    inst.budget = testsupport::uniform_int(rng, 0, static_cast<int>(heavy));
    const auto brute = testsupport::brute_force_mck(inst);
    if (!brute.feasible) {
      ++infeasible;
      try {
        solve_mck(inst);
        ++mismatches;
      } catch (const InfeasibleBudget&) {
      }
      continue;
    }
    const auto s = solve_mck(inst);
    if (s.total_value != brute.value || s.choices != brute.choices) ++mismatches;
  }

  // Runtime against each of W, N, k with the other two fixed.
  const std::vector<double> scale{1, 2, 4, 8};
  std::vector<double> tw, tn, tk;
  for (double f : scale) {
    tw.push_back(time_mck(scaling_instance(rng, 8, 8, static_cast<std::int64_t>(25000 * f))));
    tn.push_back(time_mck(scaling_instance(rng, static_cast<int>(4 * f), 8, 50000)));
    tk.push_back(time_mck(scaling_instance(rng, 8, static_cast<int>(4 * f), 50000)));
  }
  const double sw = loglog_slope(scale, tw), sn = loglog_slope(scale, tn), sk = loglog_slope(scale, tk);
  auto linear = [](double s) { return s >= 0.7 && s <= 1.3; };
  return {mismatches == 0 && linear(sw) && linear(sn) && linear(sk),
          "500 instances (" + std::to_string(infeasible) + " infeasible), " +
              std::to_string(mismatches) + " mismatches; log-log runtime slopes W " + fmt(sw) +
              ", N " + fmt(sn) + ", k " + fmt(sk)};
}

// The random nets shared by the end-to-end soundness and solver-exactness lines.
struct RandomCase {
  KanNetwork net;
  std::vector<UnitAbstraction> abs;
  InputBox box;
};

std::vector<RandomCase> random_cases() {
  Rng rng(1005);
  std::vector<RandomCase> cases;
  while (cases.size() < 50) {
    const testsupport::NetShape shape{{testsupport::uniform_int(rng, 1, 2), 2, 1}, 0.3, 1.0};
    auto net = testsupport::random_network(rng, shape);
    if (net.num_units() > 6) continue;
    auto abs = testsupport::random_abstractions(rng, net, 4);
    std::vector<double> lo, hi;
    for (int d = 0; d < net.input_dim(); ++d) {
      const double c = testsupport::uniform(rng, -0.5, 0.5);
      const double r = testsupport::uniform(rng, 0.05, 0.45);
      lo.push_back(c - r);
      hi.push_back(c + r);
    }
    cases.push_back({std::move(net), std::move(abs), InputBox(lo, hi)});
  }
  return cases;
}

Outcome end_to_end_soundness(const std::vector<RandomCase>& cases,
                             const std::vector<Benchmark>& benches) {
  int violations = 0, checked = 0;
  for (const auto& c : cases) {
    const auto hi = solve(encode(c.net, c.abs, c.box, 0, ObjectiveSense::Maximize).model);
    const auto lo = solve(encode(c.net, c.abs, c.box, 0, ObjectiveSense::Minimize).model);
    const auto e = empirical_range(c.net, c.box);
    if (lo.bound > e.lo || e.hi > hi.bound) ++violations;
    ++checked;
  }
  std::string bench_detail;
  for (const auto& b : benches) {
    const auto cfg = default_config(b.net);
    const auto ctx = prepare(b.net, cfg);
    const auto box = InputBox::around(b.center, b.radius);
    const auto r = verify_range(b.net, ctx, box, default_delta(ctx, 0), cfg);
    const auto e = empirical_range(b.net, box);
    const bool ok = r.alpha <= e.lo && e.hi <= r.beta;
    if (!ok) ++violations;
    ++checked;
    bench_detail += " " + b.name + " [" + fmt(r.alpha) + ", " + fmt(r.beta) + "] vs [" +
                    fmt(e.lo) + ", " + fmt(e.hi) + "]" + (ok ? "" : " VIOLATED") + ";";
  }
  return {violations == 0, std::to_string(checked) + " boxes (50 random nets + " +
                               std::to_string(benches.size()) + " benchmarks), " +
                               std::to_string(violations) + " violations;" + bench_detail};
}

Outcome solver_exactness(const std::vector<RandomCase>& cases) {
  SolveConfig exact;
  exact.mip_gap = 0.0;
  exact.timeout_seconds = 60.0;
  int mismatches = 0, open = 0;
  long lp_solves = 0;
  double worst = 0.0;
  for (const auto& c : cases) {
    for (auto sense : {ObjectiveSense::Maximize, ObjectiveSense::Minimize}) {
      const auto m = encode(c.net, c.abs, c.box, 0, sense).model;
      const auto r = solve(m, exact);
      const auto oracle = testsupport::exhaustive_optimum(m);
      lp_solves += oracle.lp_solves;
      if (r.status != SolveStatus::Optimal) {
        ++open;
        continue;
      }
      const double d = std::abs(r.objective - oracle.objective);
      worst = std::max(worst, d);
      if (!oracle.feasible || d > 1e-6) ++mismatches;
    }
  }
  return {mismatches == 0 && open == 0,
          "100 solves, " + std::to_string(mismatches) + " mismatches, " + std::to_string(open) +
              " not closed; largest |B&B - exhaustive| " + fmt(worst) + " over " +
              std::to_string(lp_solves) + " oracle LPs"};
}

Outcome allocation_trend(const std::vector<Benchmark>& benches) {
  BenchConfig bc;
  bc.verify.solve.mip_gap = 0.0;
  bc.verify.solve.timeout_seconds = 60.0;
  const auto rows = benchmark_suite(benches, bc);
  int both = 0, fewer_binaries = 0, not_wider = 0, open = 0;
  std::string detail;
  for (const auto& r : rows) {
    const bool narrow = r.optimized.width() <= r.vanilla.width() + 1e-6;
    const bool fewer = r.optimized.binaries < r.vanilla.binaries;
    if (!r.optimized.closed() || !r.vanilla.closed()) ++open;
    not_wider += narrow;
    fewer_binaries += fewer;
    both += narrow && fewer;
    detail += " " + r.name + " width " + fmt(r.optimized.width()) + " vs " +
              fmt(r.vanilla.width()) + ", binaries " + std::to_string(r.optimized.binaries) +
              " vs " + std::to_string(r.vanilla.binaries) + (narrow && fewer ? "" : " (miss)") + ";";
  }
  const int n = static_cast<int>(rows.size());
  return {both >= 4 && open == 0,
          std::to_string(both) + "/" + std::to_string(n) +
              " benchmarks with width <= vanilla and fewer binaries (need >= 4); width " +
              std::to_string(not_wider) + "/" + std::to_string(n) + ", binaries " +
              std::to_string(fewer_binaries) + "/" + std::to_string(n) + ";" + detail};
}

Outcome sensitivity_soundness(const std::vector<Benchmark>& benches) {
  const double eps = 0.01;
  int violations = 0, features = 0;
  double tightest = INFINITY;
  for (const auto& b : benches) {
    auto cfg = default_config(b.net);
    cfg.solve.timeout_seconds = 30.0;
    const auto ctx = prepare(b.net, cfg);
    const auto box = InputBox::around(b.center, b.radius);
    for (const auto& s : sensitivity_sweep(b.net, ctx, box, eps, default_delta(ctx, 0), cfg)) {
      ++features;
      if (s.max_divergence < s.empirical) ++violations;
      tightest = std::min(tightest, s.max_divergence - s.empirical);
    }
  }
  // f(x) = c·x through one exact linear unit.
  bool linear_ok = true;
  std::string linear_detail;
  for (double c : {2.0, -0.75}) {
    KanNetwork net({Layer{{LayerOutput{
        std::nullopt, {Edge{1.0, UnivariateUnit::tabulated({-c, c}, 1.0)}}}}}});
    VerifyConfig cfg;
    cfg.grid_intervals = 4096;
    cfg.max_pieces = 8;
    cfg.solve.mip_gap = 0.0;
    const auto ctx = prepare(net, cfg);
    const auto s = sensitivity(net, ctx, InputBox({-0.5}, {0.5}), 0, eps, default_delta(ctx, 0), cfg);
    const double expected = std::abs(c) * eps;
    const double tol = 2.0 * s.total_error + 1e-9;
    const bool ok = s.max_divergence >= expected - 1e-9 && s.max_divergence <= expected + tol &&
                    std::abs(s.empirical - expected) <= 1e-9;
    linear_ok = linear_ok && ok;
    linear_detail += " c=" + fmt(c) + ": MD " + fmt(s.max_divergence) + " vs |c|eps " +
                     fmt(expected) + " (tolerance 2*delta_total " + fmt(tol) + ");";
  }
  return {violations == 0 && linear_ok,
          std::to_string(features) + " features over " + std::to_string(benches.size()) +
              " benchmarks, " + std::to_string(violations) +
              " with MD < empirical; smallest MD - empirical " + fmt(tightest) + ";" + linear_detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the KAN verification toolkit"};
  std::string models = "models";
  app.add_option("--models", models, "Directory with the bundled .kan.json benchmarks");
  CLI11_PARSE(app, argc, argv);

  const auto benches = load_benchmarks(models);
  report("DP optimality", 60, dp_optimality);
  report("Discretization sandwich", 60, correction_sandwich);
  report("Global error bound soundness", 120, global_error_soundness);
  report("Knapsack exactness and linear runtime", 120, knapsack_exactness);
  const auto cases = random_cases();
  report("MILP end-to-end soundness", 600, [&] { return end_to_end_soundness(cases, benches); });
  report("Solver exactness", 600, [&] { return solver_exactness(cases); });
  report("Optimized vs vanilla trend", 600, [&] { return allocation_trend(benches); });
  report("Sensitivity soundness", 600, [&] { return sensitivity_soundness(benches); });
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
