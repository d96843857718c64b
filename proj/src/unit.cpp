#include "kanver/unit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kanver/errors.hpp"

namespace kanver {

namespace {

// Sample count bounds for the rbf derivative enclosure.
constexpr int kMinDerivativeSamples = 257;
constexpr int kMaxDerivativeSamples = 65537;
constexpr double kDerivativeTarget = 1e-6;

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

double deboor(const std::vector<double>& t, const std::vector<double>& c, int p, int span,
              double x) {
  std::vector<double> d(static_cast<std::size_t>(p) + 1);
  for (int j = 0; j <= p; ++j) d[j] = c[j + span - p];
  for (int r = 1; r <= p; ++r) {
    for (int j = p; j >= r; --j) {
      const double left = t[j + span - p];
      const double denom = t[j + 1 + span - r] - left;
      const double alpha = denom > 0.0 ? (x - left) / denom : 0.0;
      d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j];
    }
  }
  return d[p];
}

// Last non-empty span index m (p <= m < n) with t[m] <= x.
int find_span(const std::vector<double>& t, int p, int n, double x) {
  auto first = t.begin() + p;
  auto last = t.begin() + n;
  int m = static_cast<int>(std::upper_bound(first, last, x) - t.begin()) - 1;
  m = std::clamp(m, p, n - 1);
  while (m > p && !(t[m] < t[m + 1])) --m;
  return m;
}

struct SplineDerivative {
  std::vector<double> knots;
  std::vector<double> coeffs;
  int degree;
};

SplineDerivative differentiate(const SplineDerivative& s) {
  SplineDerivative out;
  out.degree = s.degree - 1;
  const int n = static_cast<int>(s.coeffs.size());
  out.knots.assign(s.knots.begin() + 1, s.knots.end() - 1);
  out.coeffs.resize(static_cast<std::size_t>(std::max(n - 1, 0)));
  for (int i = 0; i + 1 < n; ++i) {
    const double denom = s.knots[i + s.degree + 1] - s.knots[i + 1];
    out.coeffs[i] = denom > 0.0 ? s.degree * (s.coeffs[i + 1] - s.coeffs[i]) / denom : 0.0;
  }
  return out;
}

}  // namespace

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::RbfSum: return "rbf-sum";
    case UnitKind::BSpline: return "bspline";
    case UnitKind::PiecewisePolynomial: return "piecewise-polynomial";
    case UnitKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

std::optional<UnitKind> parse_unit_kind(std::string_view name) {
  if (name == "rbf-sum") return UnitKind::RbfSum;
  if (name == "bspline") return UnitKind::BSpline;
  if (name == "piecewise-polynomial") return UnitKind::PiecewisePolynomial;
  if (name == "tabulated") return UnitKind::Tabulated;
  return std::nullopt;
}

double polynomial_eval(const std::vector<double>& coeffs, double t) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

std::vector<double> polynomial_roots(const std::vector<double>& coeffs, double lo, double hi) {
  std::vector<double> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  std::vector<double> roots;
  if (c.size() <= 1 || !(lo < hi)) return roots;
  if (c.size() == 2) {
    const double r = -c[0] / c[1];
    if (r >= lo && r <= hi) roots.push_back(r);
    return roots;
  }
  // Critical points split [lo, hi] into monotone stretches with at most one root each.
  std::vector<double> deriv(c.size() - 1);
  for (std::size_t m = 1; m < c.size(); ++m) deriv[m - 1] = static_cast<double>(m) * c[m];
  std::vector<double> cuts{lo};
  for (double r : polynomial_roots(deriv, lo, hi)) cuts.push_back(r);
  cuts.push_back(hi);

  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double a = cuts[s];
    double b = cuts[s + 1];
    double fa = polynomial_eval(c, a);
    const double fb = polynomial_eval(c, b);
    if (fa == 0.0) {
      if (roots.empty() || roots.back() != a) roots.push_back(a);
      continue;
    }
    if (fb == 0.0 || (fa < 0.0) == (fb < 0.0)) {
      if (fb == 0.0 && s + 2 == cuts.size()) roots.push_back(b);
      continue;
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const double fm = polynomial_eval(c, mid);
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

double bspline_eval(const BSplineParams& s, double z) {
  const int p = s.degree;
  const int n = static_cast<int>(s.coefficients.size());
  if (z < s.knots[p] || z > s.knots[n]) return 0.0;
  return deboor(s.knots, s.coefficients, p, find_span(s.knots, p, n, z), z);
}

UnivariateUnit::UnivariateUnit(UnitParams params, double domain_limit,
                               std::optional<AffineBase> affine_base)
    : params_(std::move(params)), limit_(domain_limit), affine_base_(affine_base) {
  require(std::isfinite(limit_) && limit_ > 0.0, "domain limit L must be finite and > 0");
  if (affine_base_) {
    require(std::isfinite(affine_base_->slope) && std::isfinite(affine_base_->intercept),
            "affine_base must be finite");
  }
  const double L = limit_;

  if (auto* p = std::get_if<RbfSumParams>(&params_)) {
    require(!p->centers.empty(), "rbf-sum needs at least one center");
    require(p->centers.size() == p->widths.size() && p->centers.size() == p->weights.size(),
            "rbf-sum centers, widths and weights must have equal length");
    require(all_finite(p->centers) && all_finite(p->widths) && all_finite(p->weights),
            "rbf-sum coefficients must be finite");
    for (double h : p->widths) require(h > 0.0, "rbf-sum widths must be > 0");
  } else if (auto* p = std::get_if<TabulatedParams>(&params_)) {
    require(p->values.size() >= 2, "tabulated unit needs at least two values");
    require(all_finite(p->values), "tabulated values must be finite");
  } else if (auto* p = std::get_if<BSplineParams>(&params_)) {
    const int deg = p->degree;
    const int n = static_cast<int>(p->coefficients.size());
    require(deg >= 1, "bspline degree must be >= 1");
    require(n >= deg + 1, "bspline needs at least degree + 1 coefficients");
    require(static_cast<int>(p->knots.size()) == n + deg + 1,
            "bspline knots must number coefficients + degree + 1");
    require(all_finite(p->knots) && all_finite(p->coefficients),
            "bspline coefficients must be finite");
    require(std::is_sorted(p->knots.begin(), p->knots.end()), "bspline knots must be non-decreasing");
    require(p->knots[deg] <= -L && p->knots[n] >= L,
            "bspline base interval [t_p, t_n] must cover [-L, L]");

    // Power-basis form of dψ/dz on every non-empty span, from the Taylor
    // coefficients D^r ψ(t_m+) / r! at the span's left knot.
    std::vector<SplineDerivative> derivs;
    derivs.push_back({p->knots, p->coefficients, deg});
    for (int r = 1; r <= deg; ++r) derivs.push_back(differentiate(derivs.back()));
    for (int m = deg; m < n; ++m) {
      const double x0 = p->knots[m];
      const double x1 = p->knots[m + 1];
      if (!(x0 < x1) || x1 <= -L || x0 >= L) continue;
      DerivativeSegment seg{x0, x1, {}};
      double factorial = 1.0;
      for (int r = 1; r <= deg; ++r) {
        const auto& d = derivs[r];
        const double value = deboor(d.knots, d.coeffs, d.degree, m - r, x0);
        if (r > 1) factorial *= (r - 1);
        seg.coeffs.push_back(value / factorial);
      }
      segments_.push_back(std::move(seg));
    }
  } else if (auto* p = std::get_if<PiecewisePolynomialParams>(&params_)) {
    const auto& x = p->breakpoints;
    require(x.size() >= 2, "piecewise-polynomial needs at least two breakpoints");
    require(p->coefficients.size() + 1 == x.size(),
            "piecewise-polynomial needs one coefficient list per piece");
    require(all_finite(x), "piecewise-polynomial breakpoints must be finite");
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      require(x[i] < x[i + 1], "piecewise-polynomial breakpoints must be strictly increasing");
    }
    require(x.front() <= -L && x.back() >= L, "piecewise-polynomial breakpoints must cover [-L, L]");
    for (const auto& c : p->coefficients) {
      require(!c.empty(), "piecewise-polynomial pieces need at least one coefficient");
      require(all_finite(c), "piecewise-polynomial coefficients must be finite");
    }
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      const double left = polynomial_eval(p->coefficients[i - 1], x[i] - x[i - 1]);
      const double right = p->coefficients[i][0];
      const double scale = std::max({1.0, std::abs(left), std::abs(right)});
      if (std::abs(left - right) > 1e-9 * scale) {
        std::ostringstream os;
        os << "piecewise-polynomial is discontinuous at breakpoint " << i;
        throw InvalidArgument(os.str());
      }
    }
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      if (x[i + 1] <= -L || x[i] >= L) continue;
      const auto& c = p->coefficients[i];
      DerivativeSegment seg{x[i], x[i + 1], {}};
      for (std::size_t m = 1; m < c.size(); ++m) seg.coeffs.push_back(static_cast<double>(m) * c[m]);
      if (seg.coeffs.empty()) seg.coeffs.push_back(0.0);
      segments_.push_back(std::move(seg));
    }
  }
}

UnivariateUnit UnivariateUnit::tabulated(std::vector<double> values, double domain_limit,
                                         std::optional<AffineBase> affine_base) {
  return UnivariateUnit(TabulatedParams{std::move(values)}, domain_limit, affine_base);
}

UnivariateUnit UnivariateUnit::affine(double slope, double intercept, double domain_limit) {
  return tabulated({intercept - slope * domain_limit, intercept + slope * domain_limit},
                   domain_limit);
}

UnivariateUnit UnivariateUnit::zero(double domain_limit) {
  return tabulated({0.0, 0.0}, domain_limit);
}

UnitKind UnivariateUnit::kind() const {
  return static_cast<UnitKind>(params_.index());
}

double UnivariateUnit::eval(double z) const {
  if (!(std::abs(z) < limit_)) return 0.0;
  return eval_core(z);
}

double UnivariateUnit::eval_inner(double z) const {
  return eval_core(std::clamp(z, -limit_, limit_));
}

double UnivariateUnit::eval_core(double z) const {
  double value = std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RbfSumParams>) {
          double acc = 0.0;
          for (std::size_t i = 0; i < p.centers.size(); ++i) {
            const double u = (z - p.centers[i]) / p.widths[i];
            acc += p.weights[i] * std::exp(-u * u);
          }
          return acc;
        } else if constexpr (std::is_same_v<T, BSplineParams>) {
          return bspline_eval(p, z);
        } else if constexpr (std::is_same_v<T, PiecewisePolynomialParams>) {
          const auto& x = p.breakpoints;
          auto it = std::upper_bound(x.begin(), x.end(), z);
          std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
          i = std::min(i, p.coefficients.size() - 1);
          return polynomial_eval(p.coefficients[i], z - x[i]);
        } else {
          const std::size_t cells = p.values.size() - 1;
          const double h = 2.0 * limit_ / static_cast<double>(cells);
          const double t = (z + limit_) / h;
          const std::size_t i =
              std::min(static_cast<std::size_t>(std::max(std::floor(t), 0.0)), cells - 1);
          const double frac = t - static_cast<double>(i);
          return p.values[i] + frac * (p.values[i + 1] - p.values[i]);
        }
      },
      params_);
  if (affine_base_) value += affine_base_->slope * z + affine_base_->intercept;
  return value;
}

DerivativeBound UnivariateUnit::derivative_interval(double a, double b) const {
  if (!(a < b)) throw DomainError("derivative_interval requires a < b");
  if (!(a > -limit_ && b < limit_)) {
    throw DomainError("derivative_interval bounds must lie inside (-L, L)");
  }
  return derivative_range(a, b);
}

DerivativeBound UnivariateUnit::derivative_range(double a, double b) const {
  if (!(a < b) || a < -limit_ || b > limit_) {
    throw DomainError("derivative_range requires -L <= a < b <= L");
  }
  DerivativeBound out = core_derivative(a, b);
  if (affine_base_) {
    out.range.lo += affine_base_->slope;
    out.range.hi += affine_base_->slope;
  }
  return out;
}

double UnivariateUnit::max_abs_derivative() const {
  const DerivativeBound d = derivative_range(-limit_, limit_);
  return std::max(std::abs(d.range.lo), std::abs(d.range.hi)) + d.tolerance;
}

double UnivariateUnit::boundary_jump() const {
  return std::max(std::abs(eval_core(-limit_)), std::abs(eval_core(limit_)));
}

std::size_t UnivariateUnit::parameter_count() const {
  std::size_t count = std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RbfSumParams>) {
          return p.weights.size();
        } else if constexpr (std::is_same_v<T, BSplineParams>) {
          return p.coefficients.size();
        } else if constexpr (std::is_same_v<T, PiecewisePolynomialParams>) {
          std::size_t n = 0;
          for (const auto& c : p.coefficients) n += c.size();
          return n;
        } else {
          return p.values.size();
        }
      },
      params_);
  if (affine_base_) count += 1;
  return count;
}

DerivativeBound UnivariateUnit::core_derivative(double a, double b) const {
  if (auto* p = std::get_if<RbfSumParams>(&params_)) return sampled_rbf_derivative(*p, a, b);
  if (auto* p = std::get_if<TabulatedParams>(&params_)) return tabulated_derivative(*p, a, b);
  return segment_derivative(a, b);
}

DerivativeBound UnivariateUnit::sampled_rbf_derivative(const RbfSumParams& p, double a,
                                                       double b) const {
  // |ψ''| <= Σ 2|w|/h², so a sample spacing of s misses extrema by at most M2·s/2.
  double m2 = 0.0;
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    m2 += 2.0 * std::abs(p.weights[i]) / (p.widths[i] * p.widths[i]);
  }
  const double wanted = std::ceil((b - a) * m2 / (2.0 * kDerivativeTarget)) + 1.0;
  const int samples = static_cast<int>(
      std::clamp(wanted, static_cast<double>(kMinDerivativeSamples),
                 static_cast<double>(kMaxDerivativeSamples)));
  const double spacing = (b - a) / static_cast<double>(samples - 1);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int s = 0; s < samples; ++s) {
    const double z = s + 1 == samples ? b : a + spacing * s;
    double d = 0.0;
    for (std::size_t i = 0; i < p.centers.size(); ++i) {
      const double h = p.widths[i];
      const double u = (z - p.centers[i]) / h;
      d += p.weights[i] * (-2.0 * u / h) * std::exp(-u * u);
    }
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const double eps = 0.5 * m2 * spacing;
  return {{lo - eps, hi + eps}, eps};
}

DerivativeBound UnivariateUnit::tabulated_derivative(const TabulatedParams& p, double a,
                                                     double b) const {
  // Piecewise-linear: the derivative set is exactly the slopes of touched cells.
  const long cells = static_cast<long>(p.values.size()) - 1;
  const double h = 2.0 * limit_ / static_cast<double>(cells);
  const double ta = (a + limit_) / h;
  const double tb = (b + limit_) / h;
  long first = static_cast<long>(std::floor(ta));
  if (static_cast<double>(first) == ta) --first;  // one-sided slope at a kink
  long last = static_cast<long>(std::ceil(tb)) - 1;
  if (static_cast<double>(last + 1) == tb) ++last;
  first = std::clamp(first, 0L, cells - 1);
  last = std::clamp(last, first, cells - 1);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (long i = first; i <= last; ++i) {
    const double slope = (p.values[i + 1] - p.values[i]) / h;
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  return {{lo, hi}, 0.0};
}

DerivativeBound UnivariateUnit::segment_derivative(double a, double b) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& seg : segments_) {
    const double s0 = std::max(a, seg.x0);
    const double s1 = std::min(b, seg.x1);
    if (s0 > s1) continue;
    const double t0 = s0 - seg.x0;
    const double t1 = s1 - seg.x0;
    std::vector<double> candidates{t0, t1};
    if (seg.coeffs.size() > 2) {
      std::vector<double> second(seg.coeffs.size() - 1);
      for (std::size_t m = 1; m < seg.coeffs.size(); ++m) {
        second[m - 1] = static_cast<double>(m) * seg.coeffs[m];
      }
      for (double r : polynomial_roots(second, t0, t1)) candidates.push_back(r);
    }
    for (double t : candidates) {
      const double v = polynomial_eval(seg.coeffs, t);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) return {{0.0, 0.0}, 0.0};
  const double eps = 1e-10 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  return {{lo - eps, hi + eps}, eps};
}

}  // namespace kanver
