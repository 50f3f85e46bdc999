#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "preimages.hpp"
#include "rational_map.hpp"
#include "roots.hpp"

namespace holoscope {

enum class CycleKind { repelling, attracting, superattracting, indifferent };

inline const char* to_string(CycleKind k) {
  switch (k) {
    case CycleKind::repelling: return "repelling";
    case CycleKind::attracting: return "attracting";
    case CycleKind::superattracting: return "superattracting";
    case CycleKind::indifferent: return "indifferent";
  }
  return "?";
}

struct Cycle {
  int period = 0;
  std::vector<SpherePoint> points;
  Cx multiplier{};
  CycleKind kind = CycleKind::indifferent;
  int multiplicity = 1;  // > 1 marks a root cluster (parabolic candidate)
};

/// Two roots closer than the dedup radius, reported instead of being merged silently.
struct RootCluster {
  SpherePoint center;
  int multiplicity = 0;
};

struct PeriodicSearch {
  std::vector<Cycle> cycles;
  std::vector<RootCluster> clusters;
  std::int64_t expected_fixed_points = 0;  // degree^n + 1
  std::int64_t found_fixed_points = 0;     // with multiplicity, including infinity
  bool deficit = false;
};

struct PeriodicOptions {
  int n_max = 12;
  std::int64_t max_census = 1'000'000;
  int max_iter = 500;
  double dedup_radius = 1e-7;    // chordal
  double verify_residual = 1e-8; // chordal
  double classification_band = 1e-6;
  double superattracting_cutoff = 1e-10;
};

inline CycleKind classify_multiplier(Cx lambda, const PeriodicOptions& opt = {}) {
  const double m = std::abs(lambda);
  if (m <= opt.superattracting_cutoff) return CycleKind::superattracting;
  if (m > 1.0 + opt.classification_band) return CycleKind::repelling;
  if (m < 1.0 - opt.classification_band) return CycleKind::attracting;
  return CycleKind::indifferent;
}

/// Product of derivatives along the cycle (chart-corrected at infinity).
/// Throws if the points do not form a cycle of f.
inline Cx multiplier(const RationalMap& f, const Cycle& cycle, double tol = 1e-8) {
  const auto n = cycle.points.size();
  if (n == 0 || static_cast<int>(n) != cycle.period)
    throw PreconditionError("multiplier: cycle point count does not match its period");
  Cx lambda{1.0};
  for (std::size_t i = 0; i < n; ++i) {
    const SpherePoint next = eval(f, cycle.points[i]);
    if (chordal(next, cycle.points[(i + 1) % n]) > tol) {
      std::ostringstream msg;
      msg << "multiplier: point " << i << " of the cycle does not map to its successor (chordal residual "
          << chordal(next, cycle.points[(i + 1) % n]) << ")";
      throw PreconditionError(msg.str());
    }
    lambda *= derivative(f, cycle.points[i]);
  }
  return lambda;
}

namespace detail {

inline std::int64_t checked_power(std::int64_t base, int exp, std::int64_t cap) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

// Newton on f^n(z) - z with the derivative accumulated along the orbit.
inline SpherePoint polish_periodic(const RationalMap& f, SpherePoint z, int n) {
  if (z.chart() != Chart::standard) return z;
  for (int iter = 0; iter < 4; ++iter) {
    Cx w = z.value();
    Cx dw{1.0};
    SpherePoint orbit = z;
    bool ok = true;
    for (int k = 0; k < n; ++k) {
      dw *= derivative(f, orbit);
      orbit = eval(f, orbit);
      if (orbit.chart() != Chart::standard) { ok = false; break; }
    }
    if (!ok) return z;
    const Cx g = orbit.value() - w;
    const Cx dg = dw - 1.0;
    if (std::abs(dg) < 1e-6) return z;  // near-parabolic: leave the cluster centre alone
    const Cx step = g / dg;
    if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-6 * (1.0 + std::abs(w))) return z;
    z = SpherePoint(w - step);
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return z;
}

/// P(z) / P'(z) for P = N_n - z D_n, where (N_n, D_n) is f^n in homogeneous
/// form, evaluated along the orbit. Each step rescales the pair, which leaves
/// the ratio unchanged since every step is homogeneous.
inline Cx fixed_point_newton_ratio(const RationalMap& f, int n, Cx z) {
  const Poly& a = f.num();
  const Poly& b = f.den();
  const int d = f.degree();
  Cx N = z, D = 1.0, dN = 1.0, dD = 0.0;
  std::vector<Cx> np(static_cast<std::size_t>(d) + 1), dp(static_cast<std::size_t>(d) + 1);
  for (int step = 0; step < n; ++step) {
    // powers N^k and D^k with derivatives via the product rule
    Cx An{}, Bn{}, dAn{}, dBn{};
    np[0] = dp[0] = 1.0;
    for (int k = 1; k <= d; ++k) {
      np[static_cast<std::size_t>(k)] = np[static_cast<std::size_t>(k) - 1] * N;
      dp[static_cast<std::size_t>(k)] = dp[static_cast<std::size_t>(k) - 1] * D;
    }
    for (int k = 0; k <= d; ++k) {
      const Cx nk = np[static_cast<std::size_t>(k)], dk = dp[static_cast<std::size_t>(d - k)];
      const Cx dnk = k > 0 ? static_cast<double>(k) * np[static_cast<std::size_t>(k) - 1] * dN : Cx{};
      const Cx ddk = d - k > 0 ? static_cast<double>(d - k) * dp[static_cast<std::size_t>(d - k) - 1] * dD : Cx{};
      const Cx term = nk * dk, dterm = dnk * dk + nk * ddk;
      An += a[k] * term;
      dAn += a[k] * dterm;
      Bn += b[k] * term;
      dBn += b[k] * dterm;
    }
    const double s = std::max(std::abs(An), std::abs(Bn));
    if (!(s > 0.0) || !std::isfinite(s)) return Cx{};
    N = An / s;
    D = Bn / s;
    dN = dAn / s;
    dD = dBn / s;
  }
  const Cx P = N - z * D;
  const Cx dP = dN - D - z * dD;
  if (dP == Cx{}) return Cx{};
  return P / dP;
}

/// Aberth-Ehrlich sweeps on roots of the fixed-point numerator of f^n,
/// with corrections from the orbit evaluation instead of the expanded
/// coefficients, whose conditioning degrades quickly with n.
inline std::vector<Cx> refine_fixed_roots(const RationalMap& f, int n, std::vector<Cx> z, int max_sweeps = 100) {
  const std::size_t m = z.size();
  std::vector<bool> done(m, false);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (done[i]) continue;
      const Cx c = fixed_point_newton_ratio(f, n, z[i]);
      Cx rep{};
      for (std::size_t j = 0; j < m; ++j)
        if (j != i && z[j] != z[i]) rep += 1.0 / (z[i] - z[j]);
      const Cx step = c / (1.0 - c * rep);
      if (!std::isfinite(std::abs(step))) {
        done[i] = true;
        continue;
      }
      z[i] -= step;
      if (std::abs(step) <= 4e-16 * (1.0 + std::abs(z[i])))
        done[i] = true;
      else
        moved = true;
    }
    if (!moved) break;
  }
  return z;
}

/// Finite points of f^-n(x) for x near J_f, one per inverse branch of f^n.
/// A contracting branch g puts g(x) within |x - p| / |lambda| of its fixed
/// point p, so these seed the refinement close to the roots. x is reached
/// by a fixed backward chain of 40 steps from a generic point.
inline std::vector<Cx> preimage_seeds(const RationalMap& f, int n) {
  SpherePoint x(Cx{0.1234, 0.0567});
  for (int k = 0; k < 40; ++k) {
    for (const auto& y : preimages(f, x))
      if (!y.is_infinity()) {
        x = y;
        break;
      }
  }
  std::vector<SpherePoint> level{x};
  for (int k = 0; k < n; ++k) {
    std::vector<SpherePoint> next;
    next.reserve(level.size() * static_cast<std::size_t>(f.degree()));
    for (const auto& y : level)
      for (const auto& w : preimages(f, y))
        if (!w.is_infinity()) next.push_back(w);
    level = std::move(next);
  }
  std::vector<Cx> out;
  out.reserve(level.size());
  for (const auto& y : level) out.push_back(y.finite());
  return out;
}

inline int primitive_period(const RationalMap& f, const SpherePoint& z, int n, double tol) {
  SpherePoint w = z;
  for (int k = 1; k <= n; ++k) {
    w = eval(f, w);
    if (n % k == 0 && chordal(w, z) < tol) return k;
  }
  return 0;
}

}  // namespace detail

/// All cycles of primitive period n. The fixed points of f^n are the roots
/// of num(f^n) - z den(f^n) plus infinity when f^n fixes it; they are
/// clustered at the dedup radius, points of lower period are removed, and
/// the rest are grouped into cycles along their orbits.
inline PeriodicSearch find_periodic_points(const RationalMap& f, int n, const PeriodicOptions& opt = {}) {
  if (n < 1 || n > opt.n_max) throw PreconditionError("periodic_points: period outside [1, n_max]");
  const std::int64_t census = detail::checked_power(f.degree(), n, opt.max_census);
  if (census > opt.max_census) throw PreconditionError("periodic_points: degree^n exceeds the census cap");

  PeriodicSearch out;
  out.expected_fixed_points = census + 1;

  // Starting guesses from the expanded fixed-point numerator when it is
  // representable; polynomial maps fall back to a circle around the filled
  // Julia set, since the orbit refinement needs only the root count.
  std::vector<Cx> guesses;
  int finite_degree = 0;
  try {
    const RationalMap fn = compose_power(f, n);
    const Poly fixed_poly = fn.num() - identity_poly() * fn.den();
    if (fixed_poly.is_zero()) throw PreconditionError("periodic_points: f^n is the identity");
    finite_degree = fixed_poly.degree();
    guesses = aberth_roots(fixed_poly, opt.max_iter).roots;
  } catch (const ConvergenceError&) {
    if (!f.is_polynomial()) throw;
    finite_degree = static_cast<int>(census);
    guesses = detail::preimage_seeds(f, n);
  }
  if (n > 1) guesses = detail::refine_fixed_roots(f, n, std::move(guesses), 500);

  // roots that fail to settle on a fixed point of f^n are not counted
  std::vector<Cx> settled;
  settled.reserve(guesses.size());
  for (Cx z : guesses)
    if (std::isfinite(std::abs(z)) && chordal(iterate(f, SpherePoint(z), n), SpherePoint(z)) < 1e-6) settled.push_back(z);
  const RootSolve solve{std::move(settled), 0, 0.0};

  // cluster roots (single linkage at the dedup radius)
  struct Root {
    SpherePoint z;
    int mult;
  };
  std::vector<Root> roots;
  std::vector<int> owner(solve.roots.size(), -1);
  for (std::size_t i = 0; i < solve.roots.size(); ++i) {
    if (owner[i] >= 0) continue;
    owner[i] = static_cast<int>(roots.size());
    std::vector<std::size_t> members{i};
    for (std::size_t m = 0; m < members.size(); ++m)
      for (std::size_t j = 0; j < solve.roots.size(); ++j)
        if (owner[j] < 0 && chordal(solve.roots[members[m]], solve.roots[j]) < opt.dedup_radius) {
          owner[j] = owner[i];
          members.push_back(j);
        }
    Cx centre{};
    for (std::size_t m : members) centre += solve.roots[m];
    centre /= static_cast<double>(members.size());
    roots.push_back({SpherePoint(centre), static_cast<int>(members.size())});
  }
  std::int64_t found = static_cast<std::int64_t>(solve.roots.size());
  const int infinity_mult = static_cast<int>(out.expected_fixed_points) - finite_degree;
  if (infinity_mult > 0 && iterate(f, SpherePoint::infinity(), n).is_infinity()) {
    roots.push_back({SpherePoint::infinity(), infinity_mult});
    found += infinity_mult;
  }
  out.found_fixed_points = found;

  for (Root& r : roots) {
    if (r.mult == 1) r.z = detail::polish_periodic(f, r.z, n);
    if (r.mult > 1) out.clusters.push_back({r.z, r.mult});
  }

  // keep primitive period n and group into orbits
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    if (detail::primitive_period(f, roots[i].z, n, opt.verify_residual * 10.0) != n) {
      used[i] = true;
      continue;
    }
    Cycle c;
    c.period = n;
    c.multiplicity = roots[i].mult;
    c.points.push_back(roots[i].z);
    used[i] = true;
    SpherePoint w = roots[i].z;
    for (int k = 1; k < n; ++k) {
      w = eval(f, w);
      std::size_t best = roots.size();
      double best_d = opt.dedup_radius * 10.0;
      for (std::size_t j = 0; j < roots.size(); ++j) {
        if (used[j]) continue;
        const double dj = chordal(w, roots[j].z);
        if (dj < best_d) {
          best_d = dj;
          best = j;
        }
      }
      if (best == roots.size()) {
        out.deficit = true;  // orbit point not among the roots: census incomplete
        c.points.push_back(w);
      } else {
        used[best] = true;
        c.points.push_back(roots[best].z);
      }
    }
    c.multiplier = multiplier(f, c, c.multiplicity > 1 ? 1e-6 : opt.verify_residual);
    c.kind = classify_multiplier(c.multiplier, opt);
    out.cycles.push_back(std::move(c));
  }
  if (out.found_fixed_points != out.expected_fixed_points) out.deficit = true;
  return out;
}

inline std::vector<Cycle> periodic_points(const RationalMap& f, int n, const PeriodicOptions& opt = {}) {
  return find_periodic_points(f, n, opt).cycles;
}

}  // namespace holoscope
