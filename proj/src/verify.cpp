#include "kanver/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <random>

#include "kanver/errors.hpp"
#include "kanver/tradeoff_io.hpp"

namespace kanver {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

void check_output(const KanNetwork& net, int output) {
  if (output < 0 || output >= net.output_dim()) {
    throw InvalidArgument("output " + std::to_string(output) + " out of range");
  }
}

void check_box(const KanNetwork& net, const InputBox& box) {
  if (static_cast<int>(box.dim()) != net.input_dim()) {
    throw InvalidArgument("box has " + std::to_string(box.dim()) + " dimensions, network expects " +
                          std::to_string(net.input_dim()));
  }
}

Allocation allocate(const KanNetwork& net, const AbstractionContext& ctx, double delta,
                    const VerifyConfig& config, int output) {
  if (config.uniform_pieces) {
    return vanilla_allocation(net, ctx.tables, ctx.weights, output, *config.uniform_pieces);
  }
  return optimized_allocation(net, ctx.tables, ctx.weights, output, delta);
}

std::vector<double> sample_point(const InputBox& box, std::mt19937_64& rng) {
  std::vector<double> x(box.dim());
  for (std::size_t d = 0; d < box.dim(); ++d) {
    std::uniform_real_distribution<double> u(box.lower[d], box.upper[d]);
    x[d] = box.lower[d] == box.upper[d] ? box.lower[d] : u(rng);
  }
  return x;
}

}  // namespace

HyperParams preset_for(std::size_t parameter_count) {
  if (parameter_count < 1000) return {262, 0.15, 100.0};
  if (parameter_count < 10000) return {262, 0.15, 150.0};
  return {175, 0.2, 200.0};
}

VerifyConfig default_config(const KanNetwork& net) {
  const auto hp = preset_for(net.parameter_count());
  VerifyConfig c;
  c.max_pieces = hp.max_pieces;
  c.solve.mip_gap = hp.mip_gap;
  c.solve.timeout_seconds = hp.timeout_seconds;
  return c;
}

AbstractionContext prepare(const KanNetwork& net, const VerifyConfig& config) {
  const auto t0 = Clock::now();
  AbstractionContext ctx;
  const int kmax = std::min(config.max_pieces, config.grid_intervals);
  ctx.tables = build_network_tables(net, config.grid_intervals, kmax, config.table_cache);
  ctx.profiles = make_profiles(net);
  for (std::size_t u = 0; u < ctx.profiles.size(); ++u) {
    ctx.profiles[u].lipschitz = ctx.tables[u].lipschitz;
  }
  ctx.weights = path_weights(net, ctx.profiles);
  ctx.seconds = since(t0);
  return ctx;
}

double default_delta(const AbstractionContext& ctx, int output) {
  const double floor_error = minimum_achievable_error(ctx.tables, ctx.weights, output);
  return floor_error > 0.0 ? 3.4 * floor_error : 1e-12;
}

std::vector<UnitId> boundary_jump_units(const KanNetwork& net) {
  std::vector<UnitId> out;
  for (const auto& id : net.unit_ids()) {
    if (net.unit(id).boundary_jump() > 1e-9) out.push_back(id);
  }
  return out;
}

RangeResult verify_range(const KanNetwork& net, const AbstractionContext& ctx, const InputBox& box,
                         double delta, const VerifyConfig& config, int output) {
  check_output(net, output);
  check_box(net, box);
  RangeResult r;
  r.output = output;
  r.delta = delta;
  r.times.tables = ctx.seconds;

  auto t = Clock::now();
  r.allocation = allocate(net, ctx, delta, config, output);
  r.total_error = r.allocation.total_error;
  const auto abs = abstractions_from(ctx.tables, r.allocation);
  r.times.allocation = since(t);

  t = Clock::now();
  EncodedMilp enc = encode(net, abs, box, output, ObjectiveSense::Maximize, config.encode);
  MilpModel min_model = enc.model;
  min_model.set_objective(ObjectiveSense::Minimize, enc.model.objective().terms);
  r.binaries = enc.model.num_binaries();
  r.times.encoding = since(t);

  t = Clock::now();
  auto hi = std::async(std::launch::async, [&] { return solve(enc.model, config.solve); });
  auto lo = std::async(std::launch::async, [&] { return solve(min_model, config.solve); });
  const SolveResult smax = hi.get();
  const SolveResult smin = lo.get();
  r.times.solving = since(t);
  if (smax.status == SolveStatus::Infeasible || smin.status == SolveStatus::Infeasible) {
    throw SolverError("encoded MILP is infeasible; the input box or big-M constants are inconsistent");
  }
  r.beta = smax.bound;
  r.alpha = smin.bound;
  r.max_status = smax.status;
  r.min_status = smin.status;
  r.max_incumbent = smax.has_incumbent ? smax.objective : r.beta;
  r.min_incumbent = smin.has_incumbent ? smin.objective : r.alpha;
  r.nodes = smax.nodes + smin.nodes;

  r.notes.push_back(config.encode.tight_m
                        ? "output big-M: M_y + |a|M_z + |b| + e"
                        : "output big-M: max(2 M_y, M_y + |a|M_z + |b| + e)");
  for (const auto& id : boundary_jump_units(net)) {
    r.notes.push_back("unit " + id.str() +
                      " is nonzero at +-L; its zero extension jumps and Lipschitz bounds hold only "
                      "inside (-L, L)");
  }
  return r;
}

RangeResult verify_range(const KanNetwork& net, const InputBox& box, double delta,
                         const VerifyConfig& config, int output) {
  return verify_range(net, prepare(net, config), box, delta, config, output);
}

Interval empirical_range(const KanNetwork& net, const InputBox& box, int samples, int output,
                         std::uint64_t seed) {
  check_output(net, output);
  check_box(net, box);
  if (samples < 1) throw InvalidArgument("need at least one sample");
  std::mt19937_64 rng(seed);
  Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int s = 0; s < samples; ++s) {
    const double y = eval_network(net, sample_point(box, rng))[output];
    r.lo = std::min(r.lo, y);
    r.hi = std::max(r.hi, y);
  }
  return r;
}

double empirical_divergence(const KanNetwork& net, const InputBox& box, int feature, double radius,
                            int samples, int output, std::uint64_t seed) {
  check_output(net, output);
  check_box(net, box);
  if (feature < 0 || feature >= net.input_dim()) throw InvalidArgument("feature out of range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift(-radius, radius);
  double md = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto x = sample_point(box, rng);
    const double y = eval_network(net, x)[output];
    const double base = x[feature];
    for (double dx : {-radius, radius, radius > 0 ? shift(rng) : 0.0}) {
      x[feature] = base + dx;
      md = std::max(md, std::abs(y - eval_network(net, x)[output]));
    }
  }
  return md;
}

SensitivityResult sensitivity(const KanNetwork& net, const AbstractionContext& ctx,
                              const InputBox& box, int feature, double radius, double delta,
                              const VerifyConfig& config, int output, int samples) {
  check_output(net, output);
  check_box(net, box);
  const auto t0 = Clock::now();
  SensitivityResult r;
  r.feature = feature;
  r.radius = radius;
  const Allocation alloc = allocate(net, ctx, delta, config, output);
  r.total_error = alloc.total_error;
  auto abs = abstractions_from(ctx.tables, alloc);
  for (auto& a : abs) a.error = 0.0;

  auto hi_model =
      encode_sensitivity(net, abs, box, feature, radius, output, ObjectiveSense::Maximize, config.encode);
  MilpModel lo_model = hi_model.model;
  lo_model.set_objective(ObjectiveSense::Minimize, hi_model.model.objective().terms);
  auto hi = std::async(std::launch::async, [&] { return solve(hi_model.model, config.solve); });
  auto lo = std::async(std::launch::async, [&] { return solve(lo_model, config.solve); });
  const SolveResult smax = hi.get();
  const SolveResult smin = lo.get();
  if (smax.status == SolveStatus::Infeasible || smin.status == SolveStatus::Infeasible) {
    throw SolverError("sensitivity MILP is infeasible");
  }
  r.upper = smax.bound;
  r.lower = smin.bound;
  r.max_status = smax.status;
  r.min_status = smin.status;
  r.max_divergence = std::max({r.upper, -r.lower, 0.0}) + 2.0 * r.total_error;
  r.empirical = empirical_divergence(net, box, feature, radius, samples, output);
  r.seconds = since(t0);
  return r;
}

std::vector<SensitivityResult> sensitivity_sweep(const KanNetwork& net,
                                                 const AbstractionContext& ctx,
                                                 const InputBox& box, double radius, double delta,
                                                 const VerifyConfig& config, int output,
                                                 int samples) {
  std::vector<std::future<SensitivityResult>> jobs;
  for (int d = 0; d < net.input_dim(); ++d) {
    jobs.push_back(std::async(std::launch::async, [&, d] {
      return sensitivity(net, ctx, box, d, radius, delta, config, output, samples);
    }));
  }
  std::vector<SensitivityResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  auto it = std::max_element(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.max_divergence < b.max_divergence;
  });
  if (it != out.end()) it->most_sensitive = true;
  return out;
}

nlohmann::json to_json(const RangeResult& r) {
  return {{"output", r.output},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"width", r.width()},
          {"delta", r.delta},
          {"total_error", r.total_error},
          {"min_status", std::string(to_string(r.min_status))},
          {"max_status", std::string(to_string(r.max_status))},
          {"min_witness", r.min_incumbent},
          {"max_witness", r.max_incumbent},
          {"nodes", r.nodes},
          {"binaries", r.binaries},
          {"total_pieces", r.allocation.total_pieces},
          {"guarantee",
           "alpha <= f(x) <= beta for every x in the box; the abstraction stays within "
           "total_error of f everywhere"},
          {"times",
           {{"tables", r.times.tables},
            {"allocation", r.times.allocation},
            {"encoding", r.times.encoding},
            {"solving", r.times.solving}}},
          {"allocation", allocation_to_json(r.allocation)},
          {"notes", r.notes}};
}

nlohmann::json to_json(const SensitivityResult& r) {
  return {{"feature", r.feature},
          {"radius", r.radius},
          {"max_divergence", r.max_divergence},
          {"empirical_divergence", r.empirical},
          {"total_error", r.total_error},
          {"difference_upper", r.upper},
          {"difference_lower", r.lower},
          {"max_status", std::string(to_string(r.max_status))},
          {"min_status", std::string(to_string(r.min_status))},
          {"most_sensitive", r.most_sensitive},
          {"seconds", r.seconds}};
}

}  // namespace kanver
