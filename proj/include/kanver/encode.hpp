#pragma once

#include <span>
#include <string>
#include <vector>

#include "kanver/knapsack.hpp"
#include "kanver/milp_model.hpp"
#include "kanver/network.hpp"
#include "kanver/pwa.hpp"

namespace kanver {

/// The PWA replacing one unit and the error e with |ψ − ψ̂| <= e on [-L, L].
struct UnitAbstraction {
  PwaFunction pwa;
  double error = 0.0;
};

/// Abstractions in unit_ids() order, taken from the allocated trade-off entries.
std::vector<UnitAbstraction> abstractions_from(std::span<const TradeoffTable> tables,
                                               const Allocation& alloc);

/// Per unit (unit_ids() order): |z| <= m_z and |y| <= m_y on every feasible point.
struct MConstants {
  std::vector<double> m_z;
  std::vector<double> m_y;
};

/// First-layer M_z from the box, deeper M_z = Σ |w|·M_y of the feeding units,
/// M_y = max |ψ̂| at breakpoints + e. Throws EncodingError on missing abstractions.
MConstants estimate_m_constants(const KanNetwork& net, std::span<const UnitAbstraction> abs,
                                const InputBox& box);

struct EncodeOptions {
  /// Output big-M coefficient per piece: false uses max(2M_y, M_y + |a|M_z + |b| + e),
  /// true uses M_y + |a|M_z + |b| + e alone.
  bool tight_m = false;
};

/// Big-M coefficient applied to piece `piece` of a unit's output constraints.
double output_big_m(const PwaFunction& pwa, int piece, double m_z, double m_y, double error,
                    const EncodeOptions& options);

struct UnitVars {
  int z = -1;
  int y = -1;
  std::vector<int> w;  // w[0]: z <= -L, w[1..ℓ]: pieces, w[ℓ+1]: z >= L
};

struct NetworkEncoding {
  std::vector<int> inputs;             // x_d
  std::vector<UnitVars> units;         // unit_ids() order
  std::vector<std::vector<int>> sums;  // sums[i-1][j-1] = s_i_j
  std::vector<int> outputs;            // variable holding each network output
  MConstants m;
};

/// Adds the abstracted network to `model`, reading inputs from `inputs` (one
/// variable per input dimension) whose magnitude bounds come from `box`.
/// Names are prefixed by `prefix`.
NetworkEncoding encode_network(MilpModel& model, const KanNetwork& net,
                               std::span<const UnitAbstraction> abs, const InputBox& box,
                               std::span<const int> inputs, const EncodeOptions& options,
                               const std::string& prefix = "");

struct EncodedMilp {
  MilpModel model;
  NetworkEncoding encoding;
};

/// Full MILP: input box as bounds on x_d, the abstracted network, and an
/// objective on network output `output` (0-based).
EncodedMilp encode(const KanNetwork& net, std::span<const UnitAbstraction> abs,
                   const InputBox& box, int output, ObjectiveSense sense,
                   const EncodeOptions& options = {});

/// Two copies sharing all inputs except feature d, whose second copy ranges
/// over [x_d − ε, x_d + ε]; objective on t = y_A − y_B for `output`.
struct SensitivityEncoding {
  MilpModel model;
  NetworkEncoding copy_a;
  NetworkEncoding copy_b;
  int perturbed_input = -1;
  int difference = -1;  // t
};
SensitivityEncoding encode_sensitivity(const KanNetwork& net, std::span<const UnitAbstraction> abs,
                                       const InputBox& box, int feature, double radius,
                                       int output, ObjectiveSense sense,
                                       const EncodeOptions& options = {});

/// Assignment induced by input x: units evaluated through their abstractions
/// (or through the true units when `true_units`), active piece indicators set.
std::vector<double> replay_assignment(const MilpModel& model, const NetworkEncoding& enc,
                                      const KanNetwork& net, std::span<const UnitAbstraction> abs,
                                      std::span<const double> x, bool true_units = false);
/// Writes the variables of one encoded copy into an existing assignment.
void replay_into(std::vector<double>& assignment, const NetworkEncoding& enc,
                 const KanNetwork& net, std::span<const UnitAbstraction> abs,
                 std::span<const double> x, bool true_units = false);

/// f̂_N(x): the network with every unit replaced by its abstraction.
std::vector<double> eval_abstract(const KanNetwork& net, std::span<const UnitAbstraction> abs,
                                  std::span<const double> x);

}  // namespace kanver
