#include "kanver/error_prop.hpp"

#include <cmath>
#include <string>

#include "kanver/errors.hpp"

namespace kanver {

double unit_lipschitz(const UnivariateUnit& unit) { return unit.max_abs_derivative(); }

std::vector<UnitErrorProfile> make_profiles(const KanNetwork& net, std::span<const double> errors) {
  if (!errors.empty() && errors.size() != net.num_units()) {
    throw InvalidArgument("expected one error per unit");
  }
  std::vector<UnitErrorProfile> out;
  out.reserve(net.num_units());
  for (std::size_t u = 0; u < net.num_units(); ++u) {
    const auto& id = net.unit_ids()[u];
    out.push_back({id, unit_lipschitz(net.unit(id)), errors.empty() ? 0.0 : errors[u]});
  }
  return out;
}

PathWeightMap path_weights(const KanNetwork& net, std::span<const UnitErrorProfile> profiles) {
  if (profiles.size() != net.num_units()) throw InvalidArgument("expected one profile per unit");
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    if (!(profiles[u].id == net.unit_ids()[u])) {
      throw InvalidArgument("profile " + std::to_string(u) + " is for unit " +
                            profiles[u].id.str() + ", expected " + net.unit_ids()[u].str());
    }
    if (!(profiles[u].lipschitz >= 0.0) || !(profiles[u].pwa_error >= 0.0)) {
      throw InvalidArgument("profile values must be non-negative");
    }
  }
  PathWeightMap map;
  map.units = net.unit_ids();
  map.num_outputs = net.output_dim();
  map.weights.assign(net.num_units(), std::vector<double>(map.num_outputs, 0.0));

  const int K = net.num_layers();
  for (int o = 0; o < map.num_outputs; ++o) {
    // g[j]: weight of the path tail starting at layer i's output node j.
    std::vector<double> g(net.layer_widths()[K], 0.0);
    g[o] = 1.0;
    for (int i = K; i >= 1; --i) {
      const auto& outs = net.layers()[i - 1].outputs;
      std::vector<double> prev(net.layer_widths()[i - 1], 0.0);
      for (std::size_t j = 0; j < outs.size(); ++j) {
        double g_sum = g[j];
        if (outs[j].outer) {
          const UnitId oid{i, static_cast<int>(j + 1), 0};
          const std::size_t u = net.unit_index(oid);
          map.weights[u][o] = g[j];
          g_sum = profiles[u].lipschitz * g[j];
        }
        for (std::size_t k = 0; k < outs[j].inputs.size(); ++k) {
          const UnitId id{i, static_cast<int>(j + 1), static_cast<int>(k + 1)};
          const std::size_t u = net.unit_index(id);
          const double w = std::abs(outs[j].inputs[k].weight) * g_sum;
          map.weights[u][o] = w;
          prev[k] += profiles[u].lipschitz * w;
        }
      }
      g.swap(prev);
    }
  }
  return map;
}

double global_error_bound(const PathWeightMap& map, std::span<const UnitErrorProfile> profiles,
                          int output) {
  if (profiles.size() != map.units.size()) throw InvalidArgument("expected one profile per unit");
  if (output < 0 || output >= map.num_outputs) throw InvalidArgument("output index out of range");
  double total = 0.0;
  for (std::size_t u = 0; u < profiles.size(); ++u) total += map.weights[u][output] * profiles[u].pwa_error;
  return total;
}

nlohmann::json path_weights_to_json(const PathWeightMap& map,
                                    std::span<const UnitErrorProfile> profiles) {
  nlohmann::json units = nlohmann::json::object();
  for (std::size_t u = 0; u < map.units.size(); ++u) {
    nlohmann::json entry = {{"weights", map.weights[u]}};
    if (u < profiles.size()) {
      entry["lipschitz"] = profiles[u].lipschitz;
      entry["pwa_error"] = profiles[u].pwa_error;
    }
    units[map.units[u].str()] = std::move(entry);
  }
  return {{"version", 1}, {"num_outputs", map.num_outputs}, {"units", units}};
}

}  // namespace kanver
