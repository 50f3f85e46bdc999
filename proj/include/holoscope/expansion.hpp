#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "measures.hpp"
#include "parallel.hpp"
#include "preimages.hpp"
#include "random.hpp"
#include "rational_map.hpp"

namespace holoscope {

enum class BranchMode {
  random,   // uniform choice among the d preimages
  nearest,  // the preimage closest to the previous point (follows a fixed point's branch)
};

struct ShrinkOptions {
  BranchMode mode = BranchMode::random;
  double koebe = 4.0;
  double julia_tolerance = 1e-6;
};

struct ShrinkEstimate {
  Cx center{};
  double radius = 0.0;
  std::vector<double> diam_by_n;         // index n-1 for n = 1..n_max; only certified n
  std::vector<int> branch_count_by_n;    // certified branches at each n
  double fitted_rate = 0.0;
  bool truncated = false;  // every branch lost univalence before n_max
};

namespace detail {

/// Least-squares slope of ys against xs.
inline double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / den;
}

// Mean log |f'| over 200 forward steps; -inf when the orbit falls into an
// attracting cycle fast enough to drive the derivative to zero.
inline double forward_lyapunov(const RationalMap& f, Cx x, int steps = 200) {
  SpherePoint z(x);
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double g = std::abs(derivative(f, z));
    if (g == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(g);
    z = eval(f, z);
  }
  return acc / steps;
}

inline void require_on_julia(const RationalMap& f, Cx x, double tol) {
  if (f.is_polynomial()) {
    const double R = auto_escape_radius(f);
    if (!(green_function(f, x, 1000, R).value < tol))
      throw PreconditionError("shrink_rate_estimate: point is off the Julia set (Green value above 1e-6)");
    // J is the boundary of K: some nearby point must escape.
    for (int k = 0; k < 16; ++k) {
      const Cx y = x + std::polar(tol, 2.0 * std::numbers::pi * k / 16);
      if (green_function(f, y, 100000, R).value > 0.0) return;
    }
    throw PreconditionError("shrink_rate_estimate: point lies in the interior of the filled Julia set");
  }
  if (forward_lyapunov(f, x) < -1e-3)
    throw PreconditionError("shrink_rate_estimate: orbit converges to an attracting cycle");
}

}  // namespace detail

/// Pullback diameters of B(x, r) along sampled backward branches. A branch
/// of length n contributes K r / |(f^n)'| while it stays univalent, which is
/// certified step by step by keeping 2 K r / |(f^j)'(x_j)| below the
/// distance from x_j to the critical points of f.
inline ShrinkEstimate shrink_rate_estimate(const RationalMap& f, Cx x, double r, int n_max, int branch_budget,
                                           std::uint64_t seed, const ShrinkOptions& opt = {}) {
  if (!(r > 0.0) || r > 0.2) throw PreconditionError("shrink_rate_estimate: radius must lie in (0, 0.2]");
  if (n_max < 1 || branch_budget < 1) throw PreconditionError("shrink_rate_estimate: n_max and budget must be positive");
  detail::require_on_julia(f, x, opt.julia_tolerance);
  const std::vector<Cx> crit = finite_critical_points(f);

  const auto nb = static_cast<std::size_t>(branch_budget);
  const auto nn = static_cast<std::size_t>(n_max);
  // per-branch |(f^n)'| at the pullback point, 0 once univalence is lost
  std::vector<std::vector<double>> gain(nb, std::vector<double>(nn, 0.0));
  parallel_for(nb, [&](std::size_t b) {
    Stream rng(seed, b);
    SpherePoint z(x);
    double g = 1.0;
    for (std::size_t n = 0; n < nn; ++n) {
      const auto pre = preimages(f, z);
      SpherePoint w = pre.front();
      if (opt.mode == BranchMode::random) {
        w = pre[static_cast<std::size_t>(rng.below(static_cast<int>(pre.size())))];
      } else {
        double best = 2.0;
        for (const auto& c : pre)
          if (chordal(c, z) < best) {
            best = chordal(c, z);
            w = c;
          }
      }
      if (w.is_infinity()) return;
      g *= std::abs(derivative(f, w));
      if (!(g > 0.0)) return;
      double dcrit = std::numeric_limits<double>::infinity();
      for (const Cx& c : crit) dcrit = std::min(dcrit, std::abs(w.finite() - c));
      if (!(2.0 * opt.koebe * r / g < dcrit)) return;
      gain[b][n] = g;
      z = w;
    }
  });

  ShrinkEstimate est;
  est.center = x;
  est.radius = r;
  for (std::size_t n = 0; n < nn; ++n) {
    double worst = 0.0;
    int count = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      if (gain[b][n] <= 0.0) continue;
      ++count;
      worst = std::max(worst, opt.koebe * r / gain[b][n]);
    }
    if (count == 0) {
      est.truncated = true;
      break;
    }
    est.diam_by_n.push_back(worst);
    est.branch_count_by_n.push_back(count);
  }
  const std::size_t have = est.diam_by_n.size();
  if (have >= 2) {
    const std::size_t tail = std::max<std::size_t>(2, (have + 1) / 2);
    std::vector<double> xs, ys;
    for (std::size_t i = have - tail; i < have; ++i) {
      xs.push_back(static_cast<double>(i + 1));
      ys.push_back(-std::log(est.diam_by_n[i]));
    }
    est.fitted_rate = std::exp(detail::ls_slope(xs, ys));
  }
  return est;
}

struct BallScalingPoint {
  Cx x{};
  double exponent = std::numeric_limits<double>::quiet_NaN();
  int radii_used = 0;
  bool flagged = false;  // too few samples to fit
};

struct BallScalingReport {
  double theta_hat = std::numeric_limits<double>::quiet_NaN();
  std::vector<BallScalingPoint> per_point;
  std::vector<double> radii;
};

/// Slope of log mu(B(x, r)) against log r for each query point, over radii
/// whose ball holds more than 50 samples; theta_hat is the largest slope.
inline BallScalingReport measure_ball_scaling(const EmpiricalMeasure& mu, const std::vector<Cx>& points,
                                              std::vector<double> radii, std::size_t min_samples = 100000) {
  if (mu.size() < min_samples) throw PreconditionError("measure_ball_scaling: measure needs at least 1e5 samples");
  if (radii.size() < 2) throw PreconditionError("measure_ball_scaling: need at least two radii");
  std::sort(radii.begin(), radii.end());
  if (!(radii.front() > 0.0) || radii.back() / radii.front() < 100.0)
    throw PreconditionError("measure_ball_scaling: radii must span at least two decades");

  BallScalingReport rep;
  rep.radii = radii;
  rep.per_point.resize(points.size());
  parallel_for(points.size(), [&](std::size_t p) {
    const Cx x = points[p];
    std::vector<double> mass(radii.size(), 0.0);
    std::vector<std::size_t> count(radii.size(), 0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double dist = std::abs(mu.points[i] - x);
      if (dist >= radii.back()) continue;
      for (std::size_t k = radii.size(); k-- > 0;) {
        if (dist >= radii[k]) break;
        mass[k] += mu.weights[i];
        ++count[k];
      }
    }
    BallScalingPoint& out = rep.per_point[p];
    out.x = x;
    if (count.back() < 100) {
      out.flagged = true;
      return;
    }
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      if (count[k] <= 50) continue;
      xs.push_back(std::log(radii[k]));
      ys.push_back(std::log(mass[k]));
    }
    out.radii_used = static_cast<int>(xs.size());
    if (xs.size() < 2) {
      out.flagged = true;
      return;
    }
    out.exponent = detail::ls_slope(xs, ys);
  });
  for (const auto& p : rep.per_point)
    if (!p.flagged && (std::isnan(rep.theta_hat) || p.exponent > rep.theta_hat)) rep.theta_hat = p.exponent;
  return rep;
}

/// n radii spaced geometrically from r_min to r_max.
inline std::vector<double> geometric_radii(double r_min, double r_max, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(r_min * std::pow(r_max / r_min, n == 1 ? 0.0 : static_cast<double>(k) / (n - 1)));
  return out;
}

}  // namespace holoscope
