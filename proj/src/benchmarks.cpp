#include "kanver/benchmarks.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kanver/errors.hpp"
#include "kanver/lp_format.hpp"
#include "kanver/model_io.hpp"

namespace kanver {

UnivariateUnit spline_unit(const std::function<double(double)>& f, double L, int n) {
  if (n < 4) throw InvalidArgument("cubic spline needs at least 4 coefficients");
  constexpr int p = 3;
  std::vector<double> knots;
  for (int i = 0; i < p; ++i) knots.push_back(-L);
  const int spans = n - p;
  for (int i = 0; i <= spans; ++i) knots.push_back(i == spans ? L : -L + 2.0 * L * i / spans);
  for (int i = 0; i < p; ++i) knots.push_back(L);

  std::vector<double> xi(n);
  for (int i = 0; i < n; ++i) xi[i] = (knots[i + 1] + knots[i + 2] + knots[i + 3]) / 3.0;
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b(n);
  BSplineParams basis{p, knots, std::vector<double>(n, 0.0)};
  for (int j = 0; j < n; ++j) {
    basis.coefficients.assign(n, 0.0);
    basis.coefficients[j] = 1.0;
    for (int i = 0; i < n; ++i) A(i, j) = bspline_eval(basis, xi[i]);
  }
  for (int i = 0; i < n; ++i) b(i) = f(xi[i]);
  const Eigen::VectorXd c = A.partialPivLu().solve(b);
  return UnivariateUnit(BSplineParams{p, knots, std::vector<double>(c.data(), c.data() + n)}, L);
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInputLimit = 1.25;

Edge edge(UnivariateUnit u, double w = 1.0) { return Edge{w, std::move(u)}; }

}  // namespace

KanNetwork bessel_network() {
  Layer l1{{LayerOutput{std::nullopt, {edge(UnivariateUnit::affine(1.0, 0.0, kInputLimit))}}}};
  Layer l2{{LayerOutput{std::nullopt,
                        {edge(spline_unit([](double h) { return std::cyl_bessel_j(0.0, 20.0 * std::abs(h)); },
                                          1.25, 96))}}}};
  return KanNetwork({l1, l2});
}

KanNetwork product_network() {
  auto id = [] { return UnivariateUnit::affine(1.0, 0.0, kInputLimit); };
  auto neg = [] { return UnivariateUnit::affine(-1.0, 0.0, kInputLimit); };
  Layer l1{{LayerOutput{std::nullopt, {edge(id()), edge(id())}},
            LayerOutput{std::nullopt, {edge(id()), edge(neg())}}}};
  auto sq = [](double s) {
    return spline_unit([s](double h) { return s * h * h / 4.0; }, 2.1, 12);
  };
  Layer l2{{LayerOutput{std::nullopt, {edge(sq(1.0)), edge(sq(-1.0))}}}};
  return KanNetwork({l1, l2});
}

KanNetwork exp_sin_network() {
  Layer l1{{LayerOutput{std::nullopt,
                        {edge(spline_unit([](double x) { return std::sin(kPi * x); }, kInputLimit, 24)),
                         edge(spline_unit([](double y) { return y * y; }, kInputLimit, 12))}}}};
  Layer l2{{LayerOutput{std::nullopt,
                        {edge(spline_unit([](double h) { return std::exp(h); }, 2.2, 16))}}}};
  return KanNetwork({l1, l2});
}

KanNetwork exp4_network() {
  auto sq = [] { return spline_unit([](double x) { return x * x; }, kInputLimit, 12); };
  auto zero = [] { return UnivariateUnit::zero(kInputLimit); };
  Layer l1{{LayerOutput{std::nullopt, {edge(sq()), edge(sq()), edge(zero()), edge(zero())}},
            LayerOutput{std::nullopt, {edge(zero()), edge(zero()), edge(sq()), edge(sq())}}}};
  auto half_sin = [] {
    return spline_unit([](double h) { return 0.5 * std::sin(kPi * h); }, 2.2, 40);
  };
  Layer l2{{LayerOutput{std::nullopt, {edge(half_sin()), edge(half_sin())}}}};
  Layer l3{{LayerOutput{std::nullopt,
                        {edge(spline_unit([](double g) { return std::exp(g); }, 1.2, 12))}}}};
  return KanNetwork({l1, l2, l3});
}

KanNetwork mean_sin_network(int inputs) {
  if (inputs < 1) throw InvalidArgument("mean-sin network needs at least one input");
  const double scale = 1.0 / inputs;
  LayerOutput sum;
  for (int d = 0; d < inputs; ++d) {
    sum.inputs.push_back(edge(spline_unit(
        [scale](double x) {
          const double s = std::sin(kPi * x / 2.0);
          return scale * s * s;
        },
        kInputLimit, 16)));
  }
  Layer l1{{sum}};
  Layer l2{{LayerOutput{std::nullopt,
                        {edge(spline_unit([](double g) { return std::exp(g); }, 1.2, 12))}}}};
  return KanNetwork({l1, l2});
}

std::vector<Benchmark> bundled_benchmarks() {
  std::vector<Benchmark> b;
  b.push_back({"bessel", bessel_network(), {0.1}, 0.5, 12});
  b.push_back({"xy", product_network(), {0.2, -0.3}, 0.5, 4});
  b.push_back({"exp-sin", exp_sin_network(), {0.1, 0.2}, 0.5, 4});
  b.push_back({"exp4", exp4_network(), {0.1, -0.1, 0.2, 0.3}, 0.5, 3});
  b.push_back({"mean-sin-8", mean_sin_network(8), std::vector<double>(8, 0.1), 0.5, 3});
  return b;
}

std::vector<Benchmark> load_benchmarks(const std::filesystem::path& dir) {
  auto b = bundled_benchmarks();
  for (auto& bench : b) bench.net = load_model_file(dir / (bench.name + ".kan.json"));
  return b;
}

std::vector<BenchRow> benchmark_suite(const std::vector<Benchmark>& benches,
                                      const BenchConfig& config) {
  std::vector<BenchRow> rows;
  for (const auto& bench : benches) {
    const AbstractionContext ctx = prepare(bench.net, config.verify);
    const Allocation vanilla =
        vanilla_allocation(bench.net, ctx.tables, ctx.weights, 0, bench.vanilla_pieces);
    std::vector<double> radii = config.radii;
    if (radii.empty()) radii.push_back(bench.radius);
    for (double r : radii) {
      BenchRow row;
      row.name = bench.name;
      row.radius = r;
      row.delta = vanilla.total_error;
      row.vanilla_pieces = bench.vanilla_pieces;
      const InputBox box = InputBox::around(bench.center, r);
      VerifyConfig vc = config.verify;
      vc.uniform_pieces = bench.vanilla_pieces;
      row.vanilla = verify_range(bench.net, ctx, box, row.delta, vc, 0);
      vc.uniform_pieces.reset();
      row.optimized = verify_range(bench.net, ctx, box, row.delta, vc, 0);
      row.empirical = empirical_range(bench.net, box, config.samples, 0);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "benchmark,radius,delta,empirical_lo,empirical_hi,"
         "opt_alpha,opt_beta,opt_width,opt_pieces,opt_binaries,opt_error,opt_status,opt_seconds,"
         "van_pieces_per_unit,van_alpha,van_beta,van_width,van_pieces,van_binaries,van_error,"
         "van_status,van_seconds\n";
  auto status = [](const RangeResult& r) {
    if (r.closed()) return std::string("optimal");
    const auto worst = r.max_status == SolveStatus::Optimal ? r.min_status : r.max_status;
    return std::string(to_string(worst));
  };
  auto secs = [](const RangeResult& r) {
    return r.times.allocation + r.times.encoding + r.times.solving;
  };
  for (const auto& row : rows) {
    const auto& o = row.optimized;
    const auto& v = row.vanilla;
    out << row.name << ',' << format_number(row.radius) << ',' << format_number(row.delta) << ','
        << format_number(row.empirical.lo) << ',' << format_number(row.empirical.hi) << ','
        << format_number(o.alpha) << ',' << format_number(o.beta) << ','
        << format_number(o.width()) << ',' << o.allocation.total_pieces << ',' << o.binaries << ','
        << format_number(o.total_error) << ',' << status(o) << ',' << format_number(secs(o)) << ','
        << row.vanilla_pieces << ',' << format_number(v.alpha) << ',' << format_number(v.beta)
        << ',' << format_number(v.width()) << ',' << v.allocation.total_pieces << ','
        << v.binaries << ',' << format_number(v.total_error) << ',' << status(v) << ','
        << format_number(secs(v)) << '\n';
  }
  return out.str();
}

}  // namespace kanver
