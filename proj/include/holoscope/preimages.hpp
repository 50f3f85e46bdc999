#pragma once

#include <vector>

#include "rational_map.hpp"
#include "roots.hpp"

namespace holoscope {

/// The d preimages of `target` under f, with multiplicity; infinity appears
/// degree - deg(num - t den) times when it is a preimage.
inline std::vector<SpherePoint> preimages(const RationalMap& f, const SpherePoint& target) {
  const Cx v = target.value();
  const Poly eq = target.chart() == Chart::standard ? f.num() - f.den() * v : f.num() * v - f.den();
  std::vector<SpherePoint> out;
  out.reserve(static_cast<std::size_t>(f.degree()));
  const int k = eq.degree();
  if (k == 1) {
    out.emplace_back(-eq[0] / eq[1]);
  } else if (k == 2) {
    auto [r1, r2] = quadratic_roots(eq[2], eq[1], eq[0]);
    out.emplace_back(r1);
    out.emplace_back(r2);
  } else if (k > 2) {
    for (const Cx& r : aberth_roots(eq).roots) out.emplace_back(r);
  }
  while (static_cast<int>(out.size()) < f.degree()) out.push_back(SpherePoint::infinity());
  return out;
}

/// Critical points of f in the standard chart (roots of num' den - num den').
inline std::vector<Cx> finite_critical_points(const RationalMap& f) {
  const Poly w = f.num().derivative() * f.den() - f.num() * f.den().derivative();
  if (w.degree() < 1) return {};
  return aberth_roots(w).roots;
}

}  // namespace holoscope
