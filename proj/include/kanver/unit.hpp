#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace kanver {

enum class UnitKind { RbfSum, BSpline, PiecewisePolynomial, Tabulated };

std::string_view to_string(UnitKind kind);
std::optional<UnitKind> parse_unit_kind(std::string_view name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Enclosure of dψ/dz over a query interval. `range.lo` is within `tolerance`
/// of the true minimum and `range.hi` within `tolerance` of the true maximum.
struct DerivativeBound {
  Interval range;
  double tolerance = 0.0;
};

/// Linear term folded into a unit: ψ(z) = f(z) + slope·z + intercept on [-L, L].
struct AffineBase {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Σ_i weights[i]·exp(-((z - centers[i]) / widths[i])²), the FastKAN basis.
struct RbfSumParams {
  std::vector<double> centers;
  std::vector<double> widths;
  std::vector<double> weights;
};

/// Σ_i coefficients[i]·B_{i,degree}(z) over a non-decreasing knot vector with
/// knots.size() == coefficients.size() + degree + 1.
struct BSplineParams {
  int degree = 3;
  std::vector<double> knots;
  std::vector<double> coefficients;
};

/// Piece i covers [breakpoints[i], breakpoints[i+1]] and evaluates
/// Σ_m coefficients[i][m]·(z - breakpoints[i])^m.
struct PiecewisePolynomialParams {
  std::vector<double> breakpoints;
  std::vector<std::vector<double>> coefficients;
};

/// Values on a uniform grid over [-L, L], linearly interpolated.
struct TabulatedParams {
  std::vector<double> values;
};

using UnitParams =
    std::variant<RbfSumParams, BSplineParams, PiecewisePolynomialParams, TabulatedParams>;

/// One univariate function ψ of a KAN: continuous on [-L, L], exactly zero
/// for |z| >= L. Immutable after construction.
class UnivariateUnit {
 public:
  /// Throws InvalidArgument when the parameters violate the unit contract.
  UnivariateUnit(UnitParams params, double domain_limit,
                 std::optional<AffineBase> affine_base = std::nullopt);

  static UnivariateUnit tabulated(std::vector<double> values, double domain_limit,
                                  std::optional<AffineBase> affine_base = std::nullopt);
  /// z ↦ slope·z + intercept on [-L, L].
  static UnivariateUnit affine(double slope, double intercept, double domain_limit);
  static UnivariateUnit zero(double domain_limit);

  UnitKind kind() const;
  const UnitParams& params() const { return params_; }
  double domain_limit() const { return limit_; }
  const std::optional<AffineBase>& affine_base() const { return affine_base_; }

  /// Zero-extended evaluation.
  double eval(double z) const;
  double operator()(double z) const { return eval(z); }
  /// The continuous function on the closed domain [-L, L] (clamped outside).
  double eval_inner(double z) const;

  /// Requires -L < a < b < L; throws DomainError otherwise.
  DerivativeBound derivative_interval(double a, double b) const;
  /// Same enclosure but accepts the closed domain, -L <= a < b <= L.
  DerivativeBound derivative_range(double a, double b) const;
  /// max |dψ/dz| over [-L, L], including the enclosure tolerance.
  double max_abs_derivative() const;

  /// max(|ψ(-L)|, |ψ(L)|): size of the jump introduced by zero extension.
  double boundary_jump() const;

  /// Number of free coefficients (counts toward model parameter totals).
  std::size_t parameter_count() const;

 private:
  struct DerivativeSegment {
    double x0 = 0.0;
    double x1 = 0.0;
    std::vector<double> coeffs;  // dψ/dz in powers of (z - x0)
  };

  double eval_core(double z) const;
  DerivativeBound core_derivative(double a, double b) const;
  DerivativeBound sampled_rbf_derivative(const RbfSumParams& p, double a, double b) const;
  DerivativeBound tabulated_derivative(const TabulatedParams& p, double a, double b) const;
  DerivativeBound segment_derivative(double a, double b) const;

  UnitParams params_;
  double limit_;
  std::optional<AffineBase> affine_base_;
  std::vector<DerivativeSegment> segments_;  // bspline / piecewise-polynomial only
};

/// Real roots of Σ coeffs[m]·t^m inside [lo, hi], ascending.
std::vector<double> polynomial_roots(const std::vector<double>& coeffs, double lo, double hi);
double polynomial_eval(const std::vector<double>& coeffs, double t);

/// Value of a B-spline at z by de Boor's recurrence; zero outside the base interval.
double bspline_eval(const BSplineParams& spline, double z);

}  // namespace kanver
