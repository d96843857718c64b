#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kanver/unit.hpp"

namespace kanver {

/// Coordinates (i, j, k) of a unit: layer i and output j are 1-based, input k
/// is 1..n_i for inner units and 0 for the outer unit applied to the sum.
struct UnitId {
  int layer = 1;
  int output = 1;
  int input = 1;

  bool is_outer() const { return input == 0; }
  std::string str() const;
  friend bool operator==(const UnitId&, const UnitId&) = default;
};

struct Edge {
  double weight = 1.0;
  UnivariateUnit unit;
};

/// φ_j(z) = outer(Σ_k weight_k · unit_k(z_k)); outer defaults to the identity.
struct LayerOutput {
  std::optional<UnivariateUnit> outer;
  std::vector<Edge> inputs;
};

struct Layer {
  std::vector<LayerOutput> outputs;
};

class KanNetwork {
 public:
  /// Throws InvalidArgument if layer shapes disagree with each other.
  explicit KanNetwork(std::vector<Layer> layers);

  int num_layers() const { return static_cast<int>(layers_.size()); }
  /// n_1 ... n_{K+1}.
  const std::vector<int>& layer_widths() const { return widths_; }
  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  const std::vector<Layer>& layers() const { return layers_; }

  const UnivariateUnit& unit(const UnitId& id) const;
  double edge_weight(const UnitId& id) const;

  /// Every unit in traversal order: per layer, per output, inner units by
  /// input index, then the outer unit if present.
  const std::vector<UnitId>& unit_ids() const { return ids_; }
  std::size_t num_units() const { return ids_.size(); }
  /// Position of `id` in unit_ids().
  std::size_t unit_index(const UnitId& id) const;

  std::size_t parameter_count() const;

 private:
  std::vector<Layer> layers_;
  std::vector<int> widths_;
  std::vector<UnitId> ids_;
};

/// Per-dimension input bounds [lower_d, upper_d].
struct InputBox {
  std::vector<double> lower;
  std::vector<double> upper;

  InputBox() = default;
  /// Throws InvalidArgument unless sizes match and lower <= upper.
  InputBox(std::vector<double> lower, std::vector<double> upper);
  static InputBox around(std::span<const double> center, double radius);

  std::size_t dim() const { return lower.size(); }
  double magnitude(std::size_t d) const;
};

/// Evaluates the unit at `id` on input z; lets callers swap units for abstractions.
using UnitEvaluator = std::function<double(const UnitId&, const UnivariateUnit&, double)>;

/// f_N(x), layer by layer with zero-extended units. Throws InvalidArgument on
/// an input-shape mismatch.
std::vector<double> eval_network(const KanNetwork& net, std::span<const double> x);
std::vector<double> eval_network(const KanNetwork& net, std::span<const double> x,
                                 const UnitEvaluator& evaluator);

}  // namespace kanver
