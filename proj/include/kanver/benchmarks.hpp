#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "kanver/network.hpp"
#include "kanver/verify.hpp"

namespace kanver {

/// Cubic B-spline with clamped uniform knots interpolating f at the Greville
/// abscissae of [-L, L].
UnivariateUnit spline_unit(const std::function<double(double)>& f, double domain_limit,
                           int coefficients);

/// Hand-built KANs whose reachable unit inputs stay strictly inside each
/// unit's domain for boxes within radius 1 of the origin, plus a 0.01 margin.
KanNetwork bessel_network();        // J0(20x)
KanNetwork product_network();       // x·y
KanNetwork exp_sin_network();       // exp(sin(πx) + y²)
KanNetwork exp4_network();          // exp(½(sin(π(x1²+x2²)) + sin(π(x3²+x4²))))
KanNetwork mean_sin_network(int inputs = 8);  // exp(mean sin²(πx_i/2))

struct Benchmark {
  std::string name;
  KanNetwork net;
  std::vector<double> center;
  double radius = 0.5;
  int vanilla_pieces = 4;  // uniform piece count that fixes the matched budget
};

std::vector<Benchmark> bundled_benchmarks();
/// Same benchmarks, networks read from `<dir>/<name>.kan.json`. Throws
/// std::runtime_error naming the first missing file.
std::vector<Benchmark> load_benchmarks(const std::filesystem::path& dir);

struct BenchConfig {
  VerifyConfig verify;
  std::vector<double> radii;  // empty: each benchmark's own radius
  int samples = 10000;
};

struct BenchRow {
  std::string name;
  double radius = 0.0;
  double delta = 0.0;
  int vanilla_pieces = 0;
  RangeResult optimized;
  RangeResult vanilla;
  Interval empirical;
};

/// Vanilla uniform allocation at `vanilla_pieces`, then the knapsack at the
/// vanilla bound as budget; both verified on the same box.
std::vector<BenchRow> benchmark_suite(const std::vector<Benchmark>& benches,
                                      const BenchConfig& config);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace kanver
