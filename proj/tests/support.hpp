#pragma once

// Random generators and independent oracles shared by the unit tests and the
// acceptance runner. Oracles avoid the code paths they check: brute-force
// enumeration, dense sampling, explicit path enumeration.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "kanver/encode.hpp"
#include "kanver/error_prop.hpp"
#include "kanver/knapsack.hpp"
#include "kanver/milp_model.hpp"
#include "kanver/network.hpp"
#include "kanver/pwa.hpp"
#include "kanver/simplex.hpp"
#include "kanver/unit.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);  // inclusive

/// Gaussian bumps, clamped cubic B-splines, C¹ cubic Hermite pieces, or
/// tabulated values, each with an optional affine base. Values stay O(1).
kanver::UnivariateUnit random_rbf_unit(Rng& rng, double L, int centers = 0);
kanver::UnivariateUnit random_bspline_unit(Rng& rng, double L);
kanver::UnivariateUnit random_polynomial_unit(Rng& rng, double L);
kanver::UnivariateUnit random_tabulated_unit(Rng& rng, double L);
kanver::UnivariateUnit random_unit(Rng& rng, double L);

/// max |ψ(z)| over `n` evenly spaced points of [-L, L].
double sampled_max_abs(const kanver::UnivariateUnit& unit, int n = 2001);

struct NetShape {
  std::vector<int> widths;   // n_1 .. n_{K+1}
  double outer_probability = 0.0;
  double input_limit = 1.0;  // L of the first layer
};

/// Random KAN whose every downstream domain is wide enough that the sums
/// reachable from inputs in (-L_1, L_1), through the units or any abstraction
/// within `abstraction_slack` of them, stay strictly inside it.
kanver::KanNetwork random_network(Rng& rng, const NetShape& shape,
                                  double abstraction_slack = 0.5);

/// Per unit, the optimal PWA on a `intervals` grid with a random budget in
/// [1, max_pieces] and its certified (discrete + correction) error.
std::vector<kanver::UnitAbstraction> random_abstractions(Rng& rng, const kanver::KanNetwork& net,
                                                         int max_pieces = 4, int intervals = 32);

/// Uniform point of the box.
std::vector<double> sample_box(Rng& rng, const kanver::InputBox& box);

/// max_j |ψ(z_j) − ψ̂(z_j)| over `n` evenly spaced points of [-L, L].
double dense_error(const kanver::UnivariateUnit& unit, const kanver::PwaFunction& pwa,
                   int n = 100001);

/// Minimum over every subset of at most k−1 interior grid points of the
/// largest chord deviation, with the same arithmetic as the DP.
double brute_force_pwa_error(std::span<const double> samples, const kanver::Grid& grid, int k);

/// W[u][o] by enumerating every path from each unit to each output.
std::vector<std::vector<double>> enumerate_path_weights(
    const kanver::KanNetwork& net, std::span<const kanver::UnitErrorProfile> profiles);

struct BruteMck {
  double value = 0.0;
  std::vector<int> choices;  // lexicographically smallest optimal (value, index) sequence
  bool feasible = false;
};
BruteMck brute_force_mck(const kanver::KnapsackInstance& inst);

struct Exhaustive {
  bool feasible = false;
  double objective = 0.0;
  long lp_solves = 0;
};
/// Optimum of `model` by enumerating every binary assignment that respects
/// the exactly-one rows and solving the remaining LP for each. A partial
/// fixing is pruned only when its LP is infeasible, never on its bound.
Exhaustive exhaustive_optimum(const kanver::MilpModel& model);

/// Every basic solution of a small LP, by enumerating active sets.
struct VertexOracle {
  bool feasible = false;
  double objective = 0.0;
};
VertexOracle vertex_enumeration(const kanver::LpProblem& lp);

/// Upper bound (maximize) or lower bound (minimize) on the LP optimum from
/// the returned duals: b·y + Σ_j extreme of r_j x_j over [l_j, u_j].
double dual_bound(const kanver::LpProblem& lp, std::span<const double> duals);

/// Random bounded LP with `vars` variables and `rows` rows, feasible by
/// construction around a random interior point.
kanver::LpProblem random_lp(Rng& rng, int vars, int rows);

}  // namespace testsupport
