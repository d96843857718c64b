// Command-line front end: approximate | allocate | encode | verify | sensitivity | bench.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kanver/benchmarks.hpp"
#include "kanver/encode.hpp"
#include "kanver/errors.hpp"
#include "kanver/lp_format.hpp"
#include "kanver/model_io.hpp"
#include "kanver/tradeoff_io.hpp"
#include "kanver/verify.hpp"

namespace fs = std::filesystem;
using namespace kanver;

namespace {

constexpr int kExitVerified = 0;
constexpr int kExitError = 1;
constexpr int kExitUnclosed = 2;
constexpr int kExitInfeasibleBudget = 3;

struct Options {
  fs::path model;
  std::string box;
  std::optional<double> delta;
  std::optional<double> radius;
  std::optional<int> pieces;
  fs::path output_dir;
  std::optional<double> mip_gap;
  std::optional<double> timeout;
  std::optional<long> node_limit;
  std::optional<fs::path> emit_lp;
  std::optional<fs::path> ingest_solution;
  bool tight_m = false;
  int j_max = kDefaultGridIntervals;
  std::optional<int> k_max;
  std::optional<int> out_index;
  std::string sense = "max";
  double epsilon = 0.01;
  std::optional<int> feature;
  std::vector<double> radii;
  int samples = 10000;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

/// Box from inline JSON or a file: {"lower": [...], "upper": [...]} or
/// {"center": [...], "radius": r}. --radius overrides the radius or, without
/// --box, centers the box at the origin.
InputBox parse_box(const Options& o, const KanNetwork& net) {
  nlohmann::json j;
  if (!o.box.empty()) {
    const std::string text = fs::exists(o.box) ? read_text(o.box) : o.box;
    j = nlohmann::json::parse(text);
  } else {
    j = {{"center", std::vector<double>(net.input_dim(), 0.0)}, {"radius", o.radius.value_or(0.5)}};
  }
  if (j.contains("lower")) {
    return InputBox(j.at("lower").get<std::vector<double>>(), j.at("upper").get<std::vector<double>>());
  }
  const auto c = j.at("center").get<std::vector<double>>();
  return InputBox::around(c, o.radius.value_or(j.value("radius", 0.5)));
}

VerifyConfig make_config(const Options& o, const KanNetwork& net) {
  VerifyConfig c = default_config(net);
  c.grid_intervals = o.j_max;
  if (o.k_max) c.max_pieces = *o.k_max;
  if (o.mip_gap) c.solve.mip_gap = *o.mip_gap;
  if (o.timeout) c.solve.timeout_seconds = *o.timeout;
  if (o.node_limit) c.solve.node_limit = *o.node_limit;
  c.encode.tight_m = o.tight_m;
  c.uniform_pieces = o.pieces;
  if (!o.output_dir.empty()) {
    c.table_cache = o.output_dir / (o.model.stem().string() + ".tradeoff.json");
  }
  return c;
}

std::vector<int> outputs_of(const Options& o, const KanNetwork& net) {
  if (o.out_index) return {*o.out_index};
  std::vector<int> all;
  for (int i = 0; i < net.output_dim(); ++i) all.push_back(i);
  return all;
}

fs::path out_path(const Options& o, const std::string& suffix) {
  const fs::path dir = o.output_dir.empty() ? fs::path(".") : o.output_dir;
  return dir / (o.model.stem().string() + suffix);
}

int cmd_approximate(const Options& o) {
  const auto net = load_model_file(o.model);
  auto cfg = make_config(o, net);
  if (!cfg.table_cache) cfg.table_cache = out_path(o, ".tradeoff.json");
  const auto ctx = prepare(net, cfg);
  for (std::size_t u = 0; u < ctx.tables.size(); ++u) {
    const auto& t = ctx.tables[u];
    std::cout << net.unit_ids()[u].str() << "  lipschitz=" << format_number(t.lipschitz)
              << "  e(1)=" << format_number(t.entries.front().corrected_error)
              << "  e(" << t.max_pieces() << ")=" << format_number(t.entries.back().corrected_error)
              << "\n";
  }
  std::cout << "tables written to " << cfg.table_cache->string() << "\n";
  return kExitVerified;
}

int cmd_allocate(const Options& o) {
  const auto net = load_model_file(o.model);
  const auto cfg = make_config(o, net);
  const auto ctx = prepare(net, cfg);
  nlohmann::json allocs = nlohmann::json::array();
  for (int out : outputs_of(o, net)) {
    const double delta = o.delta.value_or(default_delta(ctx, out));
    const Allocation a = o.pieces ? vanilla_allocation(net, ctx.tables, ctx.weights, out, *o.pieces)
                                  : optimized_allocation(net, ctx.tables, ctx.weights, out, delta);
    auto j = allocation_to_json(a);
    j["delta"] = delta;
    allocs.push_back(j);
    std::cout << "output " << out << ": delta=" << format_number(delta)
              << " bound=" << format_number(a.total_error) << " pieces=" << a.total_pieces
              << " binaries=" << a.total_binaries << "\n";
  }
  write_text(out_path(o, ".alloc.json"), allocs.dump(1) + "\n");
  write_text(out_path(o, ".weights.json"), path_weights_to_json(ctx.weights, ctx.profiles).dump(1) + "\n");
  return kExitVerified;
}

int cmd_encode(const Options& o) {
  const auto net = load_model_file(o.model);
  const auto cfg = make_config(o, net);
  const auto box = parse_box(o, net);
  const auto ctx = prepare(net, cfg);
  const int out = o.out_index.value_or(0);
  const double delta = o.delta.value_or(default_delta(ctx, out));
  const Allocation a = o.pieces ? vanilla_allocation(net, ctx.tables, ctx.weights, out, *o.pieces)
                                : optimized_allocation(net, ctx.tables, ctx.weights, out, delta);
  const auto abs = abstractions_from(ctx.tables, a);
  const auto sense = o.sense == "min" ? ObjectiveSense::Minimize : ObjectiveSense::Maximize;
  const auto enc = encode(net, abs, box, out, sense, cfg.encode);
  const fs::path lp = o.emit_lp.value_or(out_path(o, ".lp"));
  write_text(lp, write_lp(enc.model));
  std::cout << "wrote " << lp.string() << ": " << enc.model.variables().size() << " variables, "
            << enc.model.constraints().size() << " rows, " << enc.model.num_binaries()
            << " binaries, error bound " << format_number(a.total_error) << "\n";
  if (o.ingest_solution) {
    const auto sol = read_solution(read_text(*o.ingest_solution));
    const auto x = assignment_from_solution(enc.model, sol);
    const double viol = enc.model.max_violation(x);
    std::cout << "ingested solution: objective " << format_number(enc.model.objective_value(x))
              << ", max violation " << format_number(viol) << "\n";
    if (viol > 1e-6) return kExitError;
  }
  return kExitVerified;
}

int cmd_verify(const Options& o) {
  const auto net = load_model_file(o.model);
  const auto cfg = make_config(o, net);
  const auto box = parse_box(o, net);
  const auto ctx = prepare(net, cfg);
  nlohmann::json reports = nlohmann::json::array();
  int code = kExitVerified;
  for (int out : outputs_of(o, net)) {
    const double delta = o.delta.value_or(default_delta(ctx, out));
    if (o.emit_lp) {
      const Allocation a = o.pieces ? vanilla_allocation(net, ctx.tables, ctx.weights, out, *o.pieces)
                                    : optimized_allocation(net, ctx.tables, ctx.weights, out, delta);
      const auto enc = encode(net, abstractions_from(ctx.tables, a), box, out,
                              ObjectiveSense::Maximize, cfg.encode);
      fs::path lp = *o.emit_lp;
      if (net.output_dim() > 1) lp.replace_filename(lp.stem().string() + "_" + std::to_string(out) + lp.extension().string());
      write_text(lp, write_lp(enc.model));
    }
    const RangeResult r = verify_range(net, ctx, box, delta, cfg, out);
    reports.push_back(to_json(r));
    std::cout << "output " << out << ": [" << format_number(r.alpha) << ", " << format_number(r.beta)
              << "]  delta_total=" << format_number(r.total_error) << "  binaries=" << r.binaries
              << "  status=" << to_string(r.min_status) << "/" << to_string(r.max_status) << "\n";
    if (!r.closed()) code = kExitUnclosed;
  }
  if (!o.output_dir.empty()) write_text(out_path(o, ".report.json"), reports.dump(1) + "\n");
  return code;
}

int cmd_sensitivity(const Options& o) {
  const auto net = load_model_file(o.model);
  const auto cfg = make_config(o, net);
  const auto box = parse_box(o, net);
  const auto ctx = prepare(net, cfg);
  const int out = o.out_index.value_or(0);
  const double delta = o.delta.value_or(default_delta(ctx, out));
  std::vector<SensitivityResult> results;
  if (o.feature) {
    results.push_back(sensitivity(net, ctx, box, *o.feature, o.epsilon, delta, cfg, out, o.samples));
  } else {
    results = sensitivity_sweep(net, ctx, box, o.epsilon, delta, cfg, out, o.samples);
  }
  nlohmann::json reports = nlohmann::json::array();
  int code = kExitVerified;
  for (const auto& r : results) {
    reports.push_back(to_json(r));
    std::cout << "feature " << r.feature << ": MD=" << format_number(r.max_divergence)
              << "  empirical=" << format_number(r.empirical) << (r.most_sensitive ? "  *" : "")
              << "\n";
    if (r.max_status != SolveStatus::Optimal || r.min_status != SolveStatus::Optimal) code = kExitUnclosed;
  }
  if (!o.output_dir.empty()) write_text(out_path(o, ".sensitivity.json"), reports.dump(1) + "\n");
  return code;
}

int cmd_bench(const Options& o) {
  const fs::path dir = o.model.empty() ? fs::path("models") : o.model;
  auto benches = load_benchmarks(dir);
  BenchConfig cfg;
  cfg.verify.grid_intervals = o.j_max;
  if (o.k_max) cfg.verify.max_pieces = *o.k_max;
  cfg.verify.solve.mip_gap = o.mip_gap.value_or(0.15);
  if (o.timeout) cfg.verify.solve.timeout_seconds = *o.timeout;
  if (o.node_limit) cfg.verify.solve.node_limit = *o.node_limit;
  cfg.verify.encode.tight_m = o.tight_m;
  cfg.radii = o.radii;
  cfg.samples = o.samples;
  const auto rows = benchmark_suite(benches, cfg);
  const std::string csv = bench_csv(rows);
  std::cout << csv;
  if (!o.output_dir.empty()) write_text(o.output_dir / "bench.csv", csv);
  for (const auto& r : rows) {
    if (!r.optimized.closed() || !r.vanilla.closed()) return kExitUnclosed;
  }
  return kExitVerified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound output-range verification for Kolmogorov-Arnold networks"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c, bool needs_model) {
    auto* m = c->add_option("--model", o.model, needs_model ? "Model .kan.json" : "Benchmark model directory");
    if (needs_model) m->required()->check(CLI::ExistingFile);
    c->add_option("--output", o.output_dir, "Directory for reports and caches");
    c->add_option("--j-max", o.j_max, "Grid intervals per unit")->check(CLI::Range(2, 1 << 16));
    c->add_option("--k-max", o.k_max, "Largest piece count per unit (S_max)")->check(CLI::PositiveNumber);
    c->add_option("--pieces", o.pieces, "Uniform (vanilla) piece count instead of the knapsack")
        ->check(CLI::PositiveNumber);
    c->add_option("--delta", o.delta, "Global error budget")->check(CLI::PositiveNumber);
  };
  auto solving = [&](CLI::App* c) {
    c->add_option("--box", o.box, "Input box: JSON text or file");
    c->add_option("--radius", o.radius, "Box radius around the box center (or the origin)");
    c->add_option("--mip-gap", o.mip_gap, "Relative MIP gap")->check(CLI::NonNegativeNumber);
    c->add_option("--timeout", o.timeout, "Seconds per solve")->check(CLI::PositiveNumber);
    c->add_option("--node-limit", o.node_limit, "Branch-and-bound node limit")->check(CLI::PositiveNumber);
    c->add_flag("--tight-m", o.tight_m, "Use the derived output big-M coefficient alone");
    c->add_option("--out-index", o.out_index, "Network output (0-based); default all");
  };

  auto* approx = app.add_subcommand("approximate", "Build per-unit trade-off tables");
  common(approx, true);
  auto* alloc = app.add_subcommand("allocate", "Allocate pieces under an error budget");
  common(alloc, true);
  alloc->add_option("--out-index", o.out_index, "Network output (0-based); default all");
  auto* enc = app.add_subcommand("encode", "Write the MILP as an LP file");
  common(enc, true);
  solving(enc);
  enc->add_option("--emit-lp", o.emit_lp, "LP file path");
  enc->add_option("--sense", o.sense, "max or min")->check(CLI::IsMember({"max", "min"}));
  enc->add_option("--ingest-solution", o.ingest_solution, "Check an external solver's solution")
      ->check(CLI::ExistingFile);
  auto* ver = app.add_subcommand("verify", "Bound the output range over a box");
  common(ver, true);
  solving(ver);
  ver->add_option("--emit-lp", o.emit_lp, "Also write the maximization MILP");
  auto* sens = app.add_subcommand("sensitivity", "Worst-case output change per input feature");
  common(sens, true);
  solving(sens);
  sens->add_option("--epsilon", o.epsilon, "Perturbation radius")->check(CLI::NonNegativeNumber);
  sens->add_option("--feature", o.feature, "Single feature (0-based); default all");
  sens->add_option("--samples", o.samples, "Paired samples for the empirical divergence");
  auto* bench = app.add_subcommand("bench", "Optimized vs vanilla allocation on bundled benchmarks");
  common(bench, false);
  solving(bench);
  bench->add_option("--radii", o.radii, "Box radii to sweep")->delimiter(',');
  bench->add_option("--samples", o.samples, "Samples for empirical ranges");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*approx) return cmd_approximate(o);
    if (*alloc) return cmd_allocate(o);
    if (*enc) return cmd_encode(o);
    if (*ver) return cmd_verify(o);
    if (*sens) return cmd_sensitivity(o);
    if (*bench) return cmd_bench(o);
  } catch (const InfeasibleBudget& e) {
    std::cerr << "infeasible budget: " << e.what() << "\nminimum achievable bound: "
              << format_number(e.minimum_achievable()) << "\n";
    return kExitInfeasibleBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
