#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "errors.hpp"
#include "poly.hpp"
#include "sphere.hpp"

namespace holoscope {

/// Numerator/denominator pair of a rational self-map of the sphere.
///
/// The map is held in both affine charts: (num, den) act on the standard
/// coordinate and (num_rev, den_rev), the coefficient reversals padded to the
/// map degree, act on the reciprocal coordinate w = 1/z, so that
/// f(1/w) = num_rev(w) / den_rev(w). Polynomial maps are normalized to den = 1.
class RationalMap {
 public:
  static constexpr double kCoprimeTolerance = 1e-10;

  RationalMap(Poly num, Poly den) : RationalMap(std::move(num), std::move(den), true) {}

  static RationalMap polynomial(Poly p) { return RationalMap(std::move(p), Poly::constant(1.0)); }
  static RationalMap identity() { return polynomial(identity_poly()); }

  /// Construction without the resultant test, for internally derived maps
  /// (compositions, conjugates) that are coprime whenever their inputs are.
  static RationalMap unchecked(Poly num, Poly den) { return RationalMap(std::move(num), std::move(den), false); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  const Poly& num_reversed() const { return num_rev_; }
  const Poly& den_reversed() const { return den_rev_; }
  int degree() const { return degree_; }
  bool is_polynomial() const { return den_.degree() == 0; }

  /// Numerator and denominator acting on the coordinate of `chart`.
  std::pair<const Poly&, const Poly&> in_chart(Chart chart) const {
    if (chart == Chart::standard) return {num_, den_};
    return {num_rev_, den_rev_};
  }

 private:
  RationalMap(Poly num, Poly den, bool check) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw ConfigError("rational map denominator is identically zero");
    if (num_.is_zero()) throw ConfigError("rational map numerator is identically zero");
    if (!num_.all_finite() || !den_.all_finite())
      throw ConvergenceError("rational map coefficients overflowed; iterate by evaluation instead");
    if (den_.degree() == 0 && den_[0] != Cx{1.0}) {
      num_ *= 1.0 / den_[0];
      den_ = Poly::constant(1.0);
    }
    degree_ = std::max(num_.degree(), den_.degree());
    if (degree_ < 1) throw ConfigError("rational map must have degree at least 1");
    if (check && den_.degree() > 0 && normalized_resultant() <= kCoprimeTolerance)
      throw ConfigError("numerator and denominator share a root (normalized resultant below 1e-10)");
    num_rev_ = num_.reversed(degree_);
    den_rev_ = den_.reversed(degree_);
  }

  // |Res(num, den)| of the coefficient vectors scaled to unit 2-norm.
  double normalized_resultant() const {
    const int m = num_.degree();
    const int n = den_.degree();
    if (m == 0 || n == 0) return 1.0;
    auto unit = [](const Poly& p) {
      double s = 0.0;
      for (const Cx& a : p.coeffs()) s += std::norm(a);
      return 1.0 / std::sqrt(s);
    };
    const double sa = unit(num_);
    const double sb = unit(den_);
    const int size = m + n;
    Eigen::MatrixXcd syl = Eigen::MatrixXcd::Zero(size, size);
    for (int r = 0; r < n; ++r)
      for (int k = 0; k <= m; ++k) syl(r, r + k) = num_[m - k] * sa;
    for (int r = 0; r < m; ++r)
      for (int k = 0; k <= n; ++k) syl(n + r, r + k) = den_[n - k] * sb;
    return std::abs(syl.determinant());
  }

  Poly num_, den_, num_rev_, den_rev_;
  int degree_ = 0;
};

namespace detail {

struct ChartValue {
  Cx a, b;        // numerator / denominator values
  double scale;   // sum |coeff| |u|^k over both, for the indeterminacy test
};

inline ChartValue chart_value(const RationalMap& f, Chart chart, Cx u) {
  auto [p, q] = f.in_chart(chart);
  const double r = std::abs(u);
  return {p(u), q(u), p.abs_eval(r) + q.abs_eval(r)};
}

inline SpherePoint finish(const ChartValue& v) {
  constexpr double tiny = 64.0 * std::numeric_limits<double>::epsilon();
  if (std::abs(v.a) <= tiny * v.scale && std::abs(v.b) <= tiny * v.scale)
    throw PreconditionError("indeterminate point: numerator and denominator both vanish");
  if (std::abs(v.a) <= SpherePoint::kChartSwitch * std::abs(v.b)) return SpherePoint(v.a / v.b);
  return SpherePoint::in_chart(Chart::reciprocal, v.b / v.a);
}

}  // namespace detail

/// f(z), computed in the chart that holds z. Poles map exactly to infinity.
inline SpherePoint eval(const RationalMap& f, const SpherePoint& z) {
  return detail::finish(detail::chart_value(f, z.chart(), z.value()));
}

/// f(z) computed from the coordinate of z in a forced chart.
inline SpherePoint eval_in_chart(const RationalMap& f, const SpherePoint& z, Chart chart) {
  return detail::finish(detail::chart_value(f, chart, z.coordinate(chart)));
}

/// Derivative of f at z. Standard-chart derivative whenever z and f(z) are
/// finite; at z = infinity the source is the reciprocal chart and at
/// f(z) = infinity the target is, so multipliers at infinity come out right.
inline Cx derivative(const RationalMap& f, const SpherePoint& z) {
  const Chart s = z.chart();
  const Cx u = z.value();
  auto [p, q] = f.in_chart(s);
  auto [a, da] = p.eval_with_derivative(u);
  auto [b, db] = q.eval_with_derivative(u);
  detail::finish({a, b, p.abs_eval(std::abs(u)) + q.abs_eval(std::abs(u))});  // indeterminacy check

  bool target_reciprocal = std::abs(a) > SpherePoint::kChartSwitch * std::abs(b);
  Cx w, dw;
  if (!target_reciprocal) {
    w = a / b;
    dw = (da * b - a * db) / (b * b);
  } else {
    w = b / a;
    dw = (db * a - b * da) / (a * a);
  }
  if (s == Chart::reciprocal && u != Cx{}) dw *= -(u * u);
  if (target_reciprocal && w != Cx{}) dw *= -1.0 / (w * w);
  return dw;
}

inline SpherePoint iterate(const RationalMap& f, SpherePoint z, int n) {
  if (n < 0) throw PreconditionError("iterate: negative iteration count");
  for (int i = 0; i < n; ++i) z = eval(f, z);
  return z;
}

/// Coefficients of f o g by polynomial arithmetic.
inline RationalMap compose(const RationalMap& f, const RationalMap& g) {
  const int d = f.degree();
  std::vector<Poly> npow{Poly::constant(1.0)};
  std::vector<Poly> dpow{Poly::constant(1.0)};
  for (int i = 1; i <= d; ++i) {
    npow.push_back(npow.back() * g.num());
    dpow.push_back(dpow.back() * g.den());
  }
  Poly num, den;
  for (int i = 0; i <= d; ++i) {
    const Poly mixed = npow[static_cast<std::size_t>(i)] * dpow[static_cast<std::size_t>(d - i)];
    if (f.num()[i] != Cx{}) num += mixed * f.num()[i];
    if (f.den()[i] != Cx{}) den += mixed * f.den()[i];
  }
  if (!num.all_finite() || !den.all_finite())
    throw ConvergenceError("coefficient overflow in composition; iterate by evaluation instead");
  return RationalMap::unchecked(std::move(num), std::move(den));
}

/// f^n as a single rational map (n = 0 gives the identity).
inline RationalMap compose_power(const RationalMap& f, int n) {
  if (n < 0) throw PreconditionError("compose_power: negative exponent");
  RationalMap acc = RationalMap::identity();
  for (int i = 0; i < n; ++i) acc = compose(f, acc);
  return acc;
}

/// The conjugate 1 / f(1/z), i.e. f seen in the reciprocal chart.
inline RationalMap conjugate_by_inversion(const RationalMap& f) {
  return RationalMap::unchecked(f.den_reversed(), f.num_reversed());
}

}  // namespace holoscope
