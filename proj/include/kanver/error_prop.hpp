#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "kanver/network.hpp"

namespace kanver {

/// Upper bound on max |dψ/dz| over [-L, L], tolerance included.
double unit_lipschitz(const UnivariateUnit& unit);

struct UnitErrorProfile {
  UnitId id;
  double lipschitz = 0.0;
  double pwa_error = 0.0;
};

/// Profiles in unit_ids() order with Lipschitz constants filled in and the
/// given per-unit errors (zero when `errors` is empty).
std::vector<UnitErrorProfile> make_profiles(const KanNetwork& net,
                                            std::span<const double> errors = {});

/// W[u][o] for every unit u (unit_ids() order) and network output o (0-based).
struct PathWeightMap {
  std::vector<UnitId> units;
  int num_outputs = 0;
  std::vector<std::vector<double>> weights;

  double weight(std::size_t unit_index, int output) const { return weights[unit_index][output]; }
};

/// Sum over paths from each unit to each output of the product of downstream
/// Lipschitz constants and |edge weights|, by one backward pass per output.
/// Throws InvalidArgument unless profiles match unit_ids().
PathWeightMap path_weights(const KanNetwork& net, std::span<const UnitErrorProfile> profiles);

/// Σ_u W[u][o]·e_u, a bound on |f_N(x) − f̂_N(x)|_o for every x.
double global_error_bound(const PathWeightMap& map, std::span<const UnitErrorProfile> profiles,
                          int output);

/// `.weights.json` document.
nlohmann::json path_weights_to_json(const PathWeightMap& map,
                                    std::span<const UnitErrorProfile> profiles);

}  // namespace kanver
