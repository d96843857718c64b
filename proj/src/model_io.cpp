#include "kanver/model_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kanver/errors.hpp"

namespace kanver {

using nlohmann::json;

namespace {

const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ModelError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(path + "/" + key, "missing required key");
  return *it;
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!ok.count(it.key())) throw ModelError(path + "/" + it.key(), "unexpected key");
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ModelError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ModelError(path, "number must be finite");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) throw ModelError(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "/" + std::to_string(i)));
  return out;
}

const json& array_member(const json& obj, const std::string& key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_array()) throw ModelError(path + "/" + key, "expected an array");
  return v;
}

}  // namespace

json unit_to_json(const UnivariateUnit& unit) {
  json params = std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RbfSumParams>) {
          return {{"centers", p.centers}, {"widths", p.widths}, {"weights", p.weights}};
        } else if constexpr (std::is_same_v<T, BSplineParams>) {
          return {{"degree", p.degree}, {"knots", p.knots}, {"coefficients", p.coefficients}};
        } else if constexpr (std::is_same_v<T, PiecewisePolynomialParams>) {
          return {{"breakpoints", p.breakpoints}, {"coefficients", p.coefficients}};
        } else {
          return {{"values", p.values}};
        }
      },
      unit.params());
  json base = nullptr;
  if (unit.affine_base()) base = json::array({unit.affine_base()->slope, unit.affine_base()->intercept});
  return {{"kind", std::string(to_string(unit.kind()))},
          {"L", unit.domain_limit()},
          {"affine_base", base},
          {"params", params}};
}

UnivariateUnit unit_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw ModelError(path, "unit must be an object");
  only_keys(doc, {"kind", "L", "affine_base", "params"}, path);
  const json& kind_node = member(doc, "kind", path);
  if (!kind_node.is_string()) throw ModelError(path + "/kind", "expected a string");
  const auto kind = parse_unit_kind(kind_node.get<std::string>());
  if (!kind) throw ModelError(path + "/kind", "unknown unit kind '" + kind_node.get<std::string>() + "'");
  const double L = number(member(doc, "L", path), path + "/L");
  if (L <= 0.0) throw ModelError(path + "/L", "domain limit L must be > 0 (unit at " + path + ")");

  std::optional<AffineBase> base;
  if (auto it = doc.find("affine_base"); it != doc.end() && !it->is_null()) {
    const auto v = numbers(*it, path + "/affine_base");
    if (v.size() != 2) throw ModelError(path + "/affine_base", "expected [slope, intercept]");
    base = AffineBase{v[0], v[1]};
  }

  const std::string pp = path + "/params";
  const json& params = member(doc, "params", path);
  if (!params.is_object()) throw ModelError(pp, "expected an object");
  UnitParams unit_params;
  switch (*kind) {
    case UnitKind::RbfSum:
      only_keys(params, {"centers", "widths", "weights"}, pp);
      unit_params = RbfSumParams{numbers(member(params, "centers", pp), pp + "/centers"),
                                 numbers(member(params, "widths", pp), pp + "/widths"),
                                 numbers(member(params, "weights", pp), pp + "/weights")};
      break;
    case UnitKind::BSpline: {
      only_keys(params, {"degree", "knots", "coefficients"}, pp);
      const json& deg = member(params, "degree", pp);
      if (!deg.is_number_integer()) throw ModelError(pp + "/degree", "expected an integer");
      unit_params = BSplineParams{deg.get<int>(), numbers(member(params, "knots", pp), pp + "/knots"),
                                  numbers(member(params, "coefficients", pp), pp + "/coefficients")};
      break;
    }
    case UnitKind::PiecewisePolynomial: {
      only_keys(params, {"breakpoints", "coefficients"}, pp);
      PiecewisePolynomialParams p;
      p.breakpoints = numbers(member(params, "breakpoints", pp), pp + "/breakpoints");
      const json& coeffs = array_member(params, "coefficients", pp);
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        p.coefficients.push_back(numbers(coeffs[i], pp + "/coefficients/" + std::to_string(i)));
      }
      unit_params = std::move(p);
      break;
    }
    case UnitKind::Tabulated:
      only_keys(params, {"values"}, pp);
      unit_params = TabulatedParams{numbers(member(params, "values", pp), pp + "/values")};
      break;
  }
  try {
    return UnivariateUnit(std::move(unit_params), L, base);
  } catch (const InvalidArgument& e) {
    throw ModelError(path, e.what());
  }
}

KanNetwork load_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    // Syntax errors and number overflow (e.g. 1e999) both land here.
    throw ModelError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("", "model must be a JSON object");
  only_keys(doc, {"version", "layer_widths", "layers"}, "");
  const json& version = member(doc, "version", "");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw ModelError("/version", "unsupported version (expected 1)");
  }
  const json& widths_node = array_member(doc, "layer_widths", "");
  std::vector<int> widths;
  for (std::size_t i = 0; i < widths_node.size(); ++i) {
    if (!widths_node[i].is_number_integer() || widths_node[i].get<int>() < 1) {
      throw ModelError("/layer_widths/" + std::to_string(i), "expected a positive integer");
    }
    widths.push_back(widths_node[i].get<int>());
  }
  const json& layers_node = array_member(doc, "layers", "");
  if (layers_node.empty()) throw ModelError("/layers", "network needs at least one layer");
  if (widths.size() != layers_node.size() + 1) {
    throw ModelError("/layer_widths", "expected one width per layer plus the input width");
  }

  std::vector<Layer> layers;
  for (std::size_t i = 0; i < layers_node.size(); ++i) {
    const std::string lp = "/layers/" + std::to_string(i);
    const json& layer = layers_node[i];
    if (!layer.is_object()) throw ModelError(lp, "expected an object");
    only_keys(layer, {"outputs"}, lp);
    const json& outs = array_member(layer, "outputs", lp);
    if (static_cast<int>(outs.size()) != widths[i + 1]) {
      throw ModelError(lp + "/outputs", "expected " + std::to_string(widths[i + 1]) + " outputs");
    }
    Layer built;
    for (std::size_t j = 0; j < outs.size(); ++j) {
      const std::string op = lp + "/outputs/" + std::to_string(j);
      if (!outs[j].is_object()) throw ModelError(op, "expected an object");
      only_keys(outs[j], {"outer", "inputs"}, op);
      LayerOutput out;
      if (auto it = outs[j].find("outer"); it != outs[j].end() && !it->is_null()) {
        out.outer = unit_from_json(*it, op + "/outer");
      }
      const json& ins = array_member(outs[j], "inputs", op);
      if (static_cast<int>(ins.size()) != widths[i]) {
        throw ModelError(op + "/inputs", "expected " + std::to_string(widths[i]) + " inputs");
      }
      for (std::size_t k = 0; k < ins.size(); ++k) {
        const std::string ip = op + "/inputs/" + std::to_string(k);
        if (!ins[k].is_object()) throw ModelError(ip, "expected an object");
        only_keys(ins[k], {"weight", "unit"}, ip);
        double weight = 1.0;
        if (auto it = ins[k].find("weight"); it != ins[k].end()) weight = number(*it, ip + "/weight");
        out.inputs.push_back({weight, unit_from_json(member(ins[k], "unit", ip), ip + "/unit")});
      }
      built.outputs.push_back(std::move(out));
    }
    layers.push_back(std::move(built));
  }
  return KanNetwork(std::move(layers));
}

std::string save_model(const KanNetwork& net) {
  json layers = json::array();
  for (const auto& layer : net.layers()) {
    json outs = json::array();
    for (const auto& out : layer.outputs) {
      json ins = json::array();
      for (const auto& e : out.inputs) ins.push_back({{"weight", e.weight}, {"unit", unit_to_json(e.unit)}});
      outs.push_back({{"outer", out.outer ? unit_to_json(*out.outer) : json(nullptr)}, {"inputs", ins}});
    }
    layers.push_back({{"outputs", outs}});
  }
  json doc = {{"version", 1}, {"layer_widths", net.layer_widths()}, {"layers", layers}};
  return doc.dump(1) + "\n";
}

KanNetwork load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

void save_model_file(const KanNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  out << save_model(net);
}

}  // namespace kanver
