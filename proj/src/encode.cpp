#include "kanver/encode.hpp"

#include <algorithm>
#include <cmath>

#include "kanver/errors.hpp"

namespace kanver {

std::vector<UnitAbstraction> abstractions_from(std::span<const TradeoffTable> tables,
                                               const Allocation& alloc) {
  if (tables.size() != alloc.budgets.size()) {
    throw EncodingError("allocation covers " + std::to_string(alloc.budgets.size()) +
                        " units, network has " + std::to_string(tables.size()));
  }
  std::vector<UnitAbstraction> out;
  out.reserve(tables.size());
  for (std::size_t u = 0; u < tables.size(); ++u) {
    const auto& e = tables[u].at(alloc.budgets[u]);
    if (alloc.exact_budget) {
      out.push_back({e.budget_pwa, e.budget_error});
    } else {
      out.push_back({e.pwa, e.corrected_error});
    }
  }
  return out;
}

namespace {

void check_abstractions(const KanNetwork& net, std::span<const UnitAbstraction> abs) {
  if (abs.size() < net.num_units()) {
    throw EncodingError("no abstraction for unit " + net.unit_ids()[abs.size()].str());
  }
  if (abs.size() > net.num_units()) throw EncodingError("more abstractions than units");
  for (std::size_t u = 0; u < abs.size(); ++u) {
    const auto& id = net.unit_ids()[u];
    const double L = net.unit(id).domain_limit();
    if (abs[u].pwa.breakpoints().front() != -L || abs[u].pwa.breakpoints().back() != L) {
      throw EncodingError("abstraction of unit " + id.str() + " does not span [-L, L]");
    }
    if (!(abs[u].error >= 0.0)) throw EncodingError("negative error for unit " + id.str());
  }
}

std::string suffix(const UnitId& id) { return id.str(); }

void add_row(MilpModel& m, std::string name, std::vector<Term> terms, RowSense sense, double rhs) {
  std::erase_if(terms, [](const Term& t) { return t.coef == 0.0; });
  m.add_constraint(std::move(name), std::move(terms), sense, rhs);
}

}  // namespace

MConstants estimate_m_constants(const KanNetwork& net, std::span<const UnitAbstraction> abs,
                                const InputBox& box) {
  check_abstractions(net, abs);
  if (static_cast<int>(box.dim()) != net.input_dim()) {
    throw InvalidArgument("box dimension does not match the network input");
  }
  MConstants m;
  m.m_z.assign(net.num_units(), 0.0);
  m.m_y.assign(net.num_units(), 0.0);
  std::vector<double> node(box.dim());
  for (std::size_t d = 0; d < box.dim(); ++d) node[d] = box.magnitude(d);
  for (int i = 1; i <= net.num_layers(); ++i) {
    const auto& outs = net.layers()[i - 1].outputs;
    std::vector<double> next(outs.size(), 0.0);
    for (std::size_t j = 0; j < outs.size(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < outs[j].inputs.size(); ++k) {
        const auto u = net.unit_index({i, static_cast<int>(j + 1), static_cast<int>(k + 1)});
        m.m_z[u] = node[k];
        m.m_y[u] = abs[u].pwa.max_abs_value() + abs[u].error;
        sum += std::abs(outs[j].inputs[k].weight) * m.m_y[u];
      }
      next[j] = sum;
      if (outs[j].outer) {
        const auto u = net.unit_index({i, static_cast<int>(j + 1), 0});
        m.m_z[u] = sum;
        m.m_y[u] = abs[u].pwa.max_abs_value() + abs[u].error;
        next[j] = m.m_y[u];
      }
    }
    node.swap(next);
  }
  return m;
}

double output_big_m(const PwaFunction& pwa, int piece, double m_z, double m_y, double error,
                    const EncodeOptions& options) {
  const double derived =
      m_y + std::abs(pwa.slope(piece)) * m_z + std::abs(pwa.intercept(piece)) + error;
  return options.tight_m ? derived : std::max(2.0 * m_y, derived);
}

NetworkEncoding encode_network(MilpModel& model, const KanNetwork& net,
                               std::span<const UnitAbstraction> abs, const InputBox& box,
                               std::span<const int> inputs, const EncodeOptions& options,
                               const std::string& prefix) {
  NetworkEncoding enc;
  enc.m = estimate_m_constants(net, abs, box);
  if (static_cast<int>(inputs.size()) != net.input_dim()) {
    throw EncodingError("expected one input variable per input dimension");
  }
  enc.inputs.assign(inputs.begin(), inputs.end());
  enc.units.resize(net.num_units());
  const auto& P = prefix;

  auto encode_unit = [&](const UnitId& id, int source) {
    const auto u = net.unit_index(id);
    const auto& a = abs[u];
    const auto& pwa = a.pwa;
    const double L = net.unit(id).domain_limit();
    const double mz = enc.m.m_z[u];
    const double my = enc.m.m_y[u];
    const double e = a.error;
    const int l = pwa.num_pieces();
    const std::string s = suffix(id);
    UnitVars v;
    v.z = model.add_variable(P + "z_" + s, -mz, mz);
    v.y = model.add_variable(P + "y_" + s, -my, my);
    for (int p = 0; p <= l + 1; ++p) {
      v.w.push_back(model.add_variable(P + "w_" + s + "_" + std::to_string(p), 0.0, 1.0,
                                       VarType::Binary));
    }
    add_row(model, P + "link_" + s, {{v.z, 1.0}, {source, -1.0}}, RowSense::Equal, 0.0);
    std::vector<Term> one;
    for (int w : v.w) one.push_back({w, 1.0});
    add_row(model, P + "one_" + s, std::move(one), RowSense::Equal, 1.0);

    const int below = v.w.front();
    const int above = v.w.back();
    add_row(model, P + "below_" + s, {{v.z, 1.0}, {below, L + mz}}, RowSense::LessEqual, mz);
    add_row(model, P + "above_" + s, {{v.z, 1.0}, {above, -(L + mz)}}, RowSense::GreaterEqual, -mz);
    for (int q : {below, above}) {
      const std::string tag = q == below ? "below" : "above";
      add_row(model, P + "y" + tag + "hi_" + s, {{v.y, 1.0}, {q, my}}, RowSense::LessEqual, my);
      add_row(model, P + "y" + tag + "lo_" + s, {{v.y, 1.0}, {q, -my}}, RowSense::GreaterEqual,
              -my);
    }
    const auto& t = pwa.breakpoints();
    for (int p = 1; p <= l; ++p) {
      const int w = v.w[p];
      const std::string ps = s + "_" + std::to_string(p);
      add_row(model, P + "zlo_" + ps, {{v.z, 1.0}, {w, -(t[p - 1] + mz)}}, RowSense::GreaterEqual,
              -mz);
      add_row(model, P + "zhi_" + ps, {{v.z, 1.0}, {w, -(t[p] - mz)}}, RowSense::LessEqual, mz);
      const double a_p = pwa.slope(p - 1);
      const double b_p = pwa.intercept(p - 1);
      const double C = output_big_m(pwa, p - 1, mz, my, e, options);
      add_row(model, P + "yhi_" + ps, {{v.y, 1.0}, {v.z, -a_p}, {w, C}}, RowSense::LessEqual,
              b_p + e + C);
      add_row(model, P + "ylo_" + ps, {{v.y, 1.0}, {v.z, -a_p}, {w, -C}}, RowSense::GreaterEqual,
              b_p - e - C);
    }
    enc.units[u] = std::move(v);
  };

  std::vector<int> node = enc.inputs;
  for (int i = 1; i <= net.num_layers(); ++i) {
    const auto& outs = net.layers()[i - 1].outputs;
    std::vector<int> next(outs.size());
    enc.sums.emplace_back();
    for (std::size_t j = 0; j < outs.size(); ++j) {
      const int jj = static_cast<int>(j + 1);
      std::vector<Term> sum_terms;
      double bound = 0.0;
      for (std::size_t k = 0; k < outs[j].inputs.size(); ++k) {
        const UnitId id{i, jj, static_cast<int>(k + 1)};
        encode_unit(id, node[k]);
        const auto u = net.unit_index(id);
        const double w = outs[j].inputs[k].weight;
        sum_terms.push_back({enc.units[u].y, -w});
        bound += std::abs(w) * enc.m.m_y[u];
      }
      const std::string ss = std::to_string(i) + "_" + std::to_string(jj);
      const int sv = model.add_variable(P + "s_" + ss, -bound, bound);
      sum_terms.insert(sum_terms.begin(), Term{sv, 1.0});
      add_row(model, P + "sum_" + ss, std::move(sum_terms), RowSense::Equal, 0.0);
      enc.sums.back().push_back(sv);
      next[j] = sv;
      if (outs[j].outer) {
        const UnitId id{i, jj, 0};
        encode_unit(id, sv);
        next[j] = enc.units[net.unit_index(id)].y;
      }
    }
    node.swap(next);
  }
  enc.outputs = node;
  return enc;
}

EncodedMilp encode(const KanNetwork& net, std::span<const UnitAbstraction> abs,
                   const InputBox& box, int output, ObjectiveSense sense,
                   const EncodeOptions& options) {
  check_abstractions(net, abs);
  if (output < 0 || output >= net.output_dim()) throw InvalidArgument("output out of range");
  if (static_cast<int>(box.dim()) != net.input_dim()) {
    throw InvalidArgument("box dimension does not match the network input");
  }
  EncodedMilp out;
  std::vector<int> x;
  for (std::size_t d = 0; d < box.dim(); ++d) {
    x.push_back(out.model.add_variable("x_" + std::to_string(d + 1), box.lower[d], box.upper[d]));
  }
  out.encoding = encode_network(out.model, net, abs, box, x, options);
  out.model.set_objective(sense, {{out.encoding.outputs[output], 1.0}});
  return out;
}

SensitivityEncoding encode_sensitivity(const KanNetwork& net, std::span<const UnitAbstraction> abs,
                                       const InputBox& box, int feature, double radius,
                                       int output, ObjectiveSense sense,
                                       const EncodeOptions& options) {
  check_abstractions(net, abs);
  if (feature < 0 || feature >= net.input_dim()) throw InvalidArgument("feature out of range");
  if (output < 0 || output >= net.output_dim()) throw InvalidArgument("output out of range");
  if (!(radius >= 0.0)) throw InvalidArgument("perturbation must be >= 0");
  if (static_cast<int>(box.dim()) != net.input_dim()) {
    throw InvalidArgument("box dimension does not match the network input");
  }
  SensitivityEncoding out;
  auto& m = out.model;
  std::vector<int> x;
  for (std::size_t d = 0; d < box.dim(); ++d) {
    x.push_back(m.add_variable("x_" + std::to_string(d + 1), box.lower[d], box.upper[d]));
  }
  const auto f = static_cast<std::size_t>(feature);
  InputBox wide = box;
  wide.lower[f] -= radius;
  wide.upper[f] += radius;
  out.perturbed_input =
      m.add_variable("xp_" + std::to_string(feature + 1), wide.lower[f], wide.upper[f]);
  m.add_constraint("perturb_hi", {{out.perturbed_input, 1.0}, {x[f], -1.0}}, RowSense::LessEqual,
                   radius);
  m.add_constraint("perturb_lo", {{out.perturbed_input, 1.0}, {x[f], -1.0}},
                   RowSense::GreaterEqual, -radius);
  std::vector<int> xb = x;
  xb[f] = out.perturbed_input;
  out.copy_a = encode_network(m, net, abs, box, x, options, "a_");
  out.copy_b = encode_network(m, net, abs, wide, xb, options, "b_");
  const int ya = out.copy_a.outputs[output];
  const int yb = out.copy_b.outputs[output];
  const double bound = m.variables()[ya].upper + m.variables()[yb].upper;
  out.difference = m.add_variable("t", -bound, bound);
  m.add_constraint("difference", {{out.difference, 1.0}, {ya, -1.0}, {yb, 1.0}}, RowSense::Equal,
                   0.0);
  m.set_objective(sense, {{out.difference, 1.0}});
  return out;
}

void replay_into(std::vector<double>& a, const NetworkEncoding& enc, const KanNetwork& net,
                 std::span<const UnitAbstraction> abs, std::span<const double> x,
                 bool true_units) {
  if (static_cast<int>(x.size()) != net.input_dim()) throw InvalidArgument("input size mismatch");
  for (std::size_t d = 0; d < x.size(); ++d) a[enc.inputs[d]] = x[d];

  auto apply = [&](const UnitId& id, double z) {
    const auto u = net.unit_index(id);
    const auto& v = enc.units[u];
    const auto& pwa = abs[u].pwa;
    const double L = net.unit(id).domain_limit();
    a[v.z] = z;
    for (int w : v.w) a[w] = 0.0;
    if (z <= -L) {
      a[v.w.front()] = 1.0;
    } else if (z >= L) {
      a[v.w.back()] = 1.0;
    } else {
      a[v.w[pwa.piece_index(z) + 1]] = 1.0;
    }
    const double y = true_units ? net.unit(id).eval(z) : pwa.eval(z);
    a[v.y] = y;
    return y;
  };

  std::vector<double> node(x.begin(), x.end());
  for (int i = 1; i <= net.num_layers(); ++i) {
    const auto& outs = net.layers()[i - 1].outputs;
    std::vector<double> next(outs.size());
    for (std::size_t j = 0; j < outs.size(); ++j) {
      const int jj = static_cast<int>(j + 1);
      double s = 0.0;
      for (std::size_t k = 0; k < outs[j].inputs.size(); ++k) {
        s += outs[j].inputs[k].weight * apply({i, jj, static_cast<int>(k + 1)}, node[k]);
      }
      a[enc.sums[i - 1][j]] = s;
      next[j] = outs[j].outer ? apply({i, jj, 0}, s) : s;
    }
    node.swap(next);
  }
}

std::vector<double> replay_assignment(const MilpModel& model, const NetworkEncoding& enc,
                                      const KanNetwork& net, std::span<const UnitAbstraction> abs,
                                      std::span<const double> x, bool true_units) {
  std::vector<double> a(model.variables().size(), 0.0);
  replay_into(a, enc, net, abs, x, true_units);
  return a;
}

std::vector<double> eval_abstract(const KanNetwork& net, std::span<const UnitAbstraction> abs,
                                  std::span<const double> x) {
  check_abstractions(net, abs);
  return eval_network(net, x, [&](const UnitId& id, const UnivariateUnit&, double z) {
    return abs[net.unit_index(id)].pwa.eval(z);
  });
}

}  // namespace kanver
