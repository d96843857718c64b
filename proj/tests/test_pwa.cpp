#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kanver/benchmarks.hpp"
#include "kanver/errors.hpp"
#include "kanver/pwa.hpp"
#include "support.hpp"

using namespace kanver;
using testsupport::Rng;

namespace {

UnivariateUnit square(double L) {
  return UnivariateUnit(PiecewisePolynomialParams{{-L, L}, {{L * L, -2.0 * L, 1.0}}}, L);
}

UnivariateUnit abs_unit() {
  return UnivariateUnit(PiecewisePolynomialParams{{-1.0, 0.0, 1.0}, {{1.0, -1.0}, {0.0, 1.0}}}, 1.0);
}

}  // namespace

TEST_CASE("grid points run from -L to exactly L") {
  const Grid g(1.3, 7);
  CHECK(g.point(0) == -1.3);
  CHECK(g.point(7) == 1.3);
  CHECK(g.spacing() == doctest::Approx(2.6 / 7));
  CHECK_THROWS_AS(Grid(1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(Grid(0.0, 4), InvalidArgument);
}

TEST_CASE("PWA functions merge coincident breakpoints and stay continuous") {
  PwaFunction f({-1.0, -0.5, -0.5, 0.25, 1.0}, {0.0, 1.0, 1.0, -2.0, 3.0});
  CHECK(f.num_pieces() == 3);
  const auto& bp = f.breakpoints();
  for (std::size_t i = 1; i + 1 < bp.size(); ++i) {
    const double left = f.slope(static_cast<int>(i) - 1) * bp[i] + f.intercept(static_cast<int>(i) - 1);
    const double right = f.slope(static_cast<int>(i)) * bp[i] + f.intercept(static_cast<int>(i));
    CHECK(left == doctest::Approx(right));
    CHECK(f.eval_inner(bp[i]) == doctest::Approx(f.values()[i]));
  }
  CHECK(f.eval(1.0) == 0.0);
  CHECK(f.eval(-1.5) == 0.0);
  CHECK_THROWS_AS(PwaFunction({0.0, 0.0}, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(PwaFunction({0.0, -1.0}, {1.0, 1.0}), InvalidArgument);
}

TEST_CASE("single-piece error of an affine unit is zero") {
  const auto u = UnivariateUnit::affine(2.5, -0.5, 1.5);
  const Grid g(1.5, 16);
  CHECK(single_piece_error(u, g, 0, 16) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(single_piece_error(u, g, 3, 9) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("single-piece error of z squared over 5 grid points is 1") {
  // Chord from (-1, 1) to (1, 1) is y = 1; deviation peaks at z = 0.
  CHECK(single_piece_error(square(1.0), Grid(1.0, 4), 0, 4) == 1.0);
}

TEST_CASE("single-piece error of random cubics equals a naive loop") {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto u = testsupport::random_polynomial_unit(rng, 1.0);
    const Grid g(1.0, 63);
    const int j1 = testsupport::uniform_int(rng, 0, 62);
    const int j2 = testsupport::uniform_int(rng, j1 + 1, 63);
    const double z1 = -1.0 + j1 * g.spacing();
    const double z2 = j2 == 63 ? 1.0 : -1.0 + j2 * g.spacing();
    double naive = 0.0;
    for (int j = j1; j <= j2; ++j) {
      const double z = j == 63 ? 1.0 : -1.0 + j * g.spacing();
      const double line = u.eval_inner(z1) + (z - z1) * (u.eval_inner(z2) - u.eval_inner(z1)) / (z2 - z1);
      naive = std::max(naive, std::abs(u.eval_inner(z) - line));
    }
    CHECK(single_piece_error(u, g, j1, j2) == doctest::Approx(naive).epsilon(1e-12));
  }
  CHECK_THROWS_AS(single_piece_error(square(1.0), Grid(1.0, 4), 2, 2), InvalidArgument);
  CHECK_THROWS_AS(single_piece_error(square(1.0), Grid(1.0, 4), 0, 5), InvalidArgument);
}

TEST_CASE("an affine unit needs one piece from -L to L") {
  const auto r = optimal_pwa(UnivariateUnit::affine(-1.0, 0.3, 2.0), Grid(2.0, 32), 1);
  CHECK(r.discrete_error == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.pwa.breakpoints() == std::vector<double>{-2.0, 2.0});
}

TEST_CASE("|z| is exact with two pieces split at zero") {
  const auto r = optimal_pwa(abs_unit(), Grid(1.0, 10), 2);
  CHECK(r.discrete_error == 0.0);
  REQUIRE(r.pwa.num_pieces() == 2);
  CHECK(r.pwa.breakpoints()[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.grid_indices == std::vector<int>{0, 5, 10});
}

TEST_CASE("zero pieces is an invalid argument") {
  CHECK_THROWS_AS(optimal_pwa(abs_unit(), Grid(1.0, 10), 0), InvalidArgument);
}

TEST_CASE("property: DP optimum equals brute-force breakpoint enumeration") {
  Rng rng(32);
  for (int t = 0; t < 60; ++t) {
    const double L = testsupport::uniform(rng, 0.5, 2.0);
    const auto u = testsupport::random_unit(rng, L);
    const Grid g(L, testsupport::uniform_int(rng, 2, 24));
    const int k = testsupport::uniform_int(rng, 1, 4);
    const auto r = optimal_pwa(u, g, k);
    const auto samples = sample_grid(u, g);
    CHECK(r.discrete_error == testsupport::brute_force_pwa_error(samples, g, k));
    CHECK(r.pwa.num_pieces() <= k);
    // Interpolation: the PWA passes through ψ at its breakpoints.
    for (std::size_t i = 0; i < r.grid_indices.size(); ++i) {
      CHECK(r.pwa.values()[i] == samples[r.grid_indices[i]]);
    }
  }
}

TEST_CASE("the affine correction is twice the slope times the spacing") {
  const auto u = UnivariateUnit::affine(1.5, 0.0, 1.0);
  const Grid g(1.0, 20);
  const auto r = optimal_pwa(u, g, 3);
  const double c = discretization_correction(u, r.pwa, g);
  CHECK(c == doctest::Approx(3.0 * g.spacing()).epsilon(1e-9));
  CHECK(testsupport::dense_error(u, r.pwa) <= r.discrete_error + c);
}

TEST_CASE("corrected bound for z squared covers dense sampling") {
  const auto u = square(1.0);
  const Grid g(1.0, 8);
  const auto r = optimal_pwa(u, g, 2);
  const double dense = testsupport::dense_error(u, r.pwa, 100001);
  CHECK(dense <= r.discrete_error + discretization_correction(u, r.pwa, g));
  CHECK(dense >= r.discrete_error);
}

TEST_CASE("property: corrected bound covers 100 random rbf units") {
  Rng rng(33);
  for (int t = 0; t < 100; ++t) {
    const double L = testsupport::uniform(rng, 0.5, 2.0);
    const auto u = testsupport::random_rbf_unit(rng, L);
    const Grid g(L, testsupport::uniform_int(rng, 8, 64));
    const auto r = optimal_pwa(u, g, testsupport::uniform_int(rng, 1, 6));
    const double bound = r.discrete_error + discretization_correction(u, r.pwa, g);
    CHECK(testsupport::dense_error(u, r.pwa, 20001) <= bound);
  }
}

TEST_CASE("affine units have zero discrete error at every budget") {
  const auto t = build_tradeoff_table(UnivariateUnit::affine(0.7, 0.1, 1.0), Grid(1.0, 32), 6);
  REQUIRE(t.max_pieces() == 6);
  for (const auto& e : t.entries) CHECK(e.discrete_error == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("table entries agree with independent runs at each budget") {
  Rng rng(34);
  for (int t = 0; t < 10; ++t) {
    const auto u = testsupport::random_unit(rng, 1.0);
    const Grid g(1.0, 40);
    const auto table = build_tradeoff_table(u, g, 8);
    for (int k = 1; k <= 8; ++k) {
      const auto r = optimal_pwa(u, g, k);
      const auto& e = table.at(k);
      CHECK(e.discrete_error == r.discrete_error);
      CHECK(e.budget_pwa.breakpoints() == r.pwa.breakpoints());
      CHECK(e.budget_error ==
            doctest::Approx(r.discrete_error + discretization_correction(u, r.pwa, g)));
      // The certificate comes from an earlier or equal budget and is no worse.
      CHECK(e.certified_budget <= k);
      CHECK(e.corrected_error <= e.budget_error);
      CHECK(e.pwa.breakpoints() == table.at(e.certified_budget).budget_pwa.breakpoints());
    }
    CHECK_THROWS_AS(table.at(0), InvalidArgument);
    CHECK_THROWS_AS(table.at(9), InvalidArgument);
  }
}

TEST_CASE("sin(3z) table errors never increase with the budget") {
  const double pi = std::numbers::pi;
  const auto u = spline_unit([](double z) { return std::sin(3.0 * z); }, pi, 40);
  const auto t = build_tradeoff_table(u, Grid(pi, 128), 40);
  for (int k = 2; k <= t.max_pieces(); ++k) {
    CHECK(t.at(k).discrete_error <= t.at(k - 1).discrete_error);
    CHECK(t.at(k).corrected_error <= t.at(k - 1).corrected_error);
  }
}

TEST_CASE("piece budgets above the grid size are capped") {
  const auto t = build_tradeoff_table(abs_unit(), Grid(1.0, 6), 20);
  CHECK(t.max_pieces() == 6);
}

TEST_CASE("property: continuous error lies in the discrete-plus-correction sandwich") {
  Rng rng(35);
  for (int t = 0; t < 40; ++t) {
    const double L = testsupport::uniform(rng, 0.5, 2.0);
    const auto u = testsupport::random_unit(rng, L);
    const int J = testsupport::uniform_int(rng, 4, 48);
    const Grid g(L, J);
    const auto r = optimal_pwa(u, g, testsupport::uniform_int(rng, 1, 5));
    // 200 samples per grid cell, grid points included.
    const double dense = testsupport::dense_error(u, r.pwa, 200 * J + 1);
    CHECK(dense >= r.discrete_error - 1e-9);
    CHECK(dense <= r.discrete_error + discretization_correction(u, r.pwa, g) + 1e-9);
  }
}
