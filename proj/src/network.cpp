#include "kanver/network.hpp"

#include <algorithm>
#include <cmath>

#include "kanver/errors.hpp"

namespace kanver {

std::string UnitId::str() const {
  return std::to_string(layer) + "_" + std::to_string(output) + "_" + std::to_string(input);
}

KanNetwork::KanNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidArgument("network needs at least one layer");
  const auto& first = layers_.front().outputs;
  if (first.empty() || first.front().inputs.empty()) {
    throw InvalidArgument("layer 1 must have at least one output and one input");
  }
  widths_.push_back(static_cast<int>(first.front().inputs.size()));
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& outs = layers_[i].outputs;
    if (outs.empty()) {
      throw InvalidArgument("layer " + std::to_string(i + 1) + " has no outputs");
    }
    for (std::size_t j = 0; j < outs.size(); ++j) {
      if (static_cast<int>(outs[j].inputs.size()) != widths_.back()) {
        throw InvalidArgument("layer " + std::to_string(i + 1) + " output " +
                              std::to_string(j + 1) + " expects " +
                              std::to_string(widths_.back()) + " inputs");
      }
      for (const auto& e : outs[j].inputs) {
        if (!std::isfinite(e.weight)) throw InvalidArgument("edge weights must be finite");
      }
    }
    widths_.push_back(static_cast<int>(outs.size()));
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (std::size_t j = 0; j < layers_[i].outputs.size(); ++j) {
      const auto& out = layers_[i].outputs[j];
      for (std::size_t k = 0; k < out.inputs.size(); ++k) {
        ids_.push_back({static_cast<int>(i + 1), static_cast<int>(j + 1), static_cast<int>(k + 1)});
      }
      if (out.outer) ids_.push_back({static_cast<int>(i + 1), static_cast<int>(j + 1), 0});
    }
  }
}

const UnivariateUnit& KanNetwork::unit(const UnitId& id) const {
  if (id.layer < 1 || id.layer > num_layers()) throw InvalidArgument("no such layer " + id.str());
  const auto& outs = layers_[id.layer - 1].outputs;
  if (id.output < 1 || id.output > static_cast<int>(outs.size())) {
    throw InvalidArgument("no such output " + id.str());
  }
  const auto& out = outs[id.output - 1];
  if (id.is_outer()) {
    if (!out.outer) throw InvalidArgument("no outer unit at " + id.str());
    return *out.outer;
  }
  if (id.input < 1 || id.input > static_cast<int>(out.inputs.size())) {
    throw InvalidArgument("no such input " + id.str());
  }
  return out.inputs[id.input - 1].unit;
}

double KanNetwork::edge_weight(const UnitId& id) const {
  if (id.is_outer()) return 1.0;
  unit(id);  // bounds check
  return layers_[id.layer - 1].outputs[id.output - 1].inputs[id.input - 1].weight;
}

std::size_t KanNetwork::unit_index(const UnitId& id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw InvalidArgument("unknown unit " + id.str());
  return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t KanNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& id : ids_) n += unit(id).parameter_count() + (id.is_outer() ? 0 : 1);
  return n;
}

InputBox::InputBox(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in dimension");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || lower[d] > upper[d]) {
      throw InvalidArgument("box dimension " + std::to_string(d) + " needs finite lower <= upper");
    }
  }
}

InputBox InputBox::around(std::span<const double> center, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("radius must be >= 0");
  std::vector<double> lo, hi;
  for (double c : center) {
    lo.push_back(c - radius);
    hi.push_back(c + radius);
  }
  return InputBox(std::move(lo), std::move(hi));
}

double InputBox::magnitude(std::size_t d) const {
  return std::max(std::abs(lower.at(d)), std::abs(upper.at(d)));
}

std::vector<double> eval_network(const KanNetwork& net, std::span<const double> x) {
  return eval_network(net, x, [](const UnitId&, const UnivariateUnit& u, double z) {
    return u.eval(z);
  });
}

std::vector<double> eval_network(const KanNetwork& net, std::span<const double> x,
                                 const UnitEvaluator& evaluator) {
  if (static_cast<int>(x.size()) != net.input_dim()) {
    throw InvalidArgument("input has " + std::to_string(x.size()) + " entries, network expects " +
                          std::to_string(net.input_dim()));
  }
  std::vector<double> current(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const auto& outs = net.layers()[i].outputs;
    next.assign(outs.size(), 0.0);
    for (std::size_t j = 0; j < outs.size(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < outs[j].inputs.size(); ++k) {
        const auto& e = outs[j].inputs[k];
        const UnitId id{static_cast<int>(i + 1), static_cast<int>(j + 1), static_cast<int>(k + 1)};
        sum += e.weight * evaluator(id, e.unit, current[k]);
      }
      if (outs[j].outer) {
        const UnitId id{static_cast<int>(i + 1), static_cast<int>(j + 1), 0};
        sum = evaluator(id, *outs[j].outer, sum);
      }
      next[j] = sum;
    }
    current.swap(next);
  }
  return current;
}

}  // namespace kanver
