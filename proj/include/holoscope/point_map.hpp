#pragma once

#include <functional>
#include <optional>

#include "linearization.hpp"
#include "rational_map.hpp"

namespace holoscope {

/// A map of the sphere that may be undefined at some inputs (nullopt).
using PointMap = std::function<std::optional<SpherePoint>(const SpherePoint&)>;

inline PointMap as_point_map(RationalMap f) {
  return [f = std::move(f)](const SpherePoint& z) -> std::optional<SpherePoint> { return eval(f, z); };
}

/// zeta -> chi(zeta) on the disk |zeta| <= domain_radius of the standard chart.
inline PointMap as_point_map(GeneralizedLinearizer g, RationalMap f, double domain_radius) {
  return [g = std::move(g), f = std::move(f), domain_radius](const SpherePoint& z) -> std::optional<SpherePoint> {
    if (z.chart() != Chart::standard || std::abs(z.value()) > domain_radius) return std::nullopt;
    return eval_generalized(g, f, z.value());
  };
}

inline PointMap compose_point_maps(PointMap outer, PointMap inner) {
  return [outer = std::move(outer), inner = std::move(inner)](const SpherePoint& z) -> std::optional<SpherePoint> {
    auto w = inner(z);
    if (!w) return std::nullopt;
    return outer(*w);
  };
}

}  // namespace holoscope
