#pragma once

#include <cmath>
#include <complex>
#include <limits>

#include "errors.hpp"

namespace holoscope {

using Cx = std::complex<double>;

enum class Chart { standard, reciprocal };

/// A point of the Riemann sphere held in whichever of the two affine charts
/// keeps its coordinate bounded: `standard` stores z with |z| <= 2,
/// `reciprocal` stores w = 1/z with |w| < 1/2. Infinity is reciprocal 0.
class SpherePoint {
 public:
  static constexpr double kChartSwitch = 2.0;

  SpherePoint() = default;
  SpherePoint(Cx z) { assign(Chart::standard, z); }  // NOLINT: implicit from finite values
  SpherePoint(double x) : SpherePoint(Cx{x, 0.0}) {}  // NOLINT

  static SpherePoint in_chart(Chart chart, Cx value) {
    SpherePoint p;
    p.assign(chart, value);
    return p;
  }
  static SpherePoint infinity() { return in_chart(Chart::reciprocal, Cx{0.0, 0.0}); }

  Chart chart() const { return chart_; }
  Cx value() const { return value_; }
  bool is_infinity() const { return chart_ == Chart::reciprocal && value_ == Cx{0.0, 0.0}; }

  /// Coordinate of the point in the requested chart. May be large (or inf
  /// at the pole of that chart).
  Cx coordinate(Chart chart) const {
    if (chart == chart_) return value_;
    if (value_ == Cx{0.0, 0.0}) return Cx{std::numeric_limits<double>::infinity(), 0.0};
    return 1.0 / value_;
  }

  /// Standard-chart coordinate; throws at infinity.
  Cx finite() const {
    if (is_infinity()) throw PreconditionError("point at infinity has no finite coordinate");
    return coordinate(Chart::standard);
  }

 private:
  void assign(Chart chart, Cx v) {
    if (std::isnan(v.real()) || std::isnan(v.imag())) throw NumericError("NaN sphere coordinate");
    if (std::isinf(v.real()) || std::isinf(v.imag())) {
      chart = chart == Chart::standard ? Chart::reciprocal : Chart::standard;
      v = Cx{0.0, 0.0};
    }
    const double r = std::abs(v);
    if (chart == Chart::standard && r > kChartSwitch) {
      chart = Chart::reciprocal;
      v = 1.0 / v;
    } else if (chart == Chart::reciprocal && r > 1.0 / kChartSwitch) {
      chart = Chart::standard;
      v = 1.0 / v;
    }
    chart_ = chart;
    value_ = v;
  }

  Chart chart_ = Chart::standard;
  Cx value_{0.0, 0.0};
};

/// Chordal distance |z-w| / sqrt((1+|z|^2)(1+|w|^2)), bounded by 1.
inline double chordal(const SpherePoint& a, const SpherePoint& b) {
  const Cx u = a.value();
  const Cx v = b.value();
  const double nu = std::norm(u);
  const double nv = std::norm(v);
  if (a.chart() == b.chart()) {
    return std::abs(u - v) / std::sqrt((1.0 + nu) * (1.0 + nv));
  }
  // one coordinate is reciprocal: |1 - u v| / sqrt((1+|u|^2)(1+|v|^2))
  return std::abs(1.0 - u * v) / std::sqrt((1.0 + nu) * (1.0 + nv));
}

inline double chordal(Cx a, Cx b) { return chordal(SpherePoint(a), SpherePoint(b)); }

}  // namespace holoscope
