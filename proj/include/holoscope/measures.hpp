#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "point_map.hpp"
#include "preimages.hpp"
#include "random.hpp"
#include "rational_map.hpp"

namespace holoscope {

enum class Provenance { inverse_iteration, brownian_exit, pushforward, external };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::inverse_iteration: return "inverse-iteration";
    case Provenance::brownian_exit: return "brownian-exit";
    case Provenance::pushforward: return "pushforward";
    case Provenance::external: return "external";
  }
  return "?";
}

/// Weighted point cloud. Weights are nonnegative and sum to one.
struct EmpiricalMeasure {
  std::vector<Cx> points;
  std::vector<double> weights;
  std::uint64_t seed = 0;
  Provenance provenance = Provenance::external;
  std::size_t dropped = 0;  // samples discarded while building this measure

  std::size_t size() const { return points.size(); }

  static EmpiricalMeasure uniform(std::vector<Cx> pts, std::uint64_t seed, Provenance prov) {
    EmpiricalMeasure m;
    m.weights.assign(pts.size(), pts.empty() ? 0.0 : 1.0 / static_cast<double>(pts.size()));
    m.points = std::move(pts);
    m.seed = seed;
    m.provenance = prov;
    return m;
  }

  void validate() const {
    if (points.size() != weights.size()) throw ConfigError("measure: point and weight counts differ");
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!(weights[i] >= 0.0)) throw ConfigError("measure: negative or NaN weight");
      if (!std::isfinite(points[i].real()) || !std::isfinite(points[i].imag()))
        throw ConfigError("measure: non-finite point");
      s += weights[i];
    }
    if (!points.empty() && std::abs(s - 1.0) > 1e-9) throw ConfigError("measure: weights do not sum to 1");
  }

  /// Rescale weights to sum to one (after loading or filtering).
  void normalize() {
    const double s = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (s > 0.0)
      for (double& w : weights) w /= s;
  }
};

// ---------------------------------------------------------------------------
// Green's function of a polynomial

struct GreenEvaluation {
  double value = 0.0;
  std::optional<int> escape_time;
  bool converged = false;  // false when the orbit stayed bounded through n_max
};

/// Escape radius R with |z| > R forcing escape: 1 + max |a_k / a_d|, scaled
/// for non-monic maps.
inline double auto_escape_radius(const RationalMap& f) {
  const Poly& p = f.num();
  const double lead = std::abs(p.leading());
  double m = 0.0;
  for (const Cx& a : p.coeffs()) m = std::max(m, std::abs(a) / lead);
  const int d = p.degree();
  return (1.0 + m) * std::max(1.0, std::pow(lead, -1.0 / (d - 1)));
}

inline void require_polynomial(const RationalMap& f, const char* what) {
  if (!f.is_polynomial() || f.degree() < 2) throw PreconditionError(std::string(what) + ": needs a polynomial of degree >= 2");
}

/// G(z) = lim d^-n log|f^n(z)|. After the first escape the orbit is pushed
/// to |w| > 1e12 and G = d^-n (log|w| + log|a_d| / (d - 1)), which leaves an
/// O(1/|w|) tail below double precision.
inline GreenEvaluation green_function(const RationalMap& f, Cx z, int n_max = 1000, double escape_radius = 0.0) {
  require_polynomial(f, "green_function");
  const Poly& p = f.num();
  const int d = p.degree();
  const double R = escape_radius > 0.0 ? escape_radius : auto_escape_radius(f);
  GreenEvaluation g;
  Cx w = z;
  int n = 0;
  while (std::abs(w) <= R) {
    if (n >= n_max) return g;  // bounded: value 0, not converged
    w = p(w);
    ++n;
  }
  g.escape_time = n;
  constexpr double far = 1e12;
  double scale = std::pow(static_cast<double>(d), -n);
  for (int extra = 0; std::abs(w) < far && extra < 64; ++extra) {
    w = p(w);
    scale /= d;
  }
  g.value = scale * (std::log(std::abs(w)) + std::log(std::abs(p.leading())) / (d - 1));
  g.converged = true;
  return g;
}

struct GreenGradient {
  double value = 0.0;
  double grad_norm = 0.0;
};

/// G and |grad G| in one orbit pass: |grad G| = d^-n |(f^n)'(z)| / |f^n(z)|,
/// with the derivative kept as mantissa times e^log_scale against overflow.
inline GreenGradient green_with_gradient(const RationalMap& f, Cx z, int n_max, double R) {
  const Poly& p = f.num();
  const int d = p.degree();
  Cx w = z, dw = 1.0;
  double log_scale = 0.0;
  int n = 0;
  auto step = [&] {
    const auto [v, dv] = p.eval_with_derivative(w);
    dw *= dv;
    w = v;
    if (const double a = std::abs(dw); a > 1e100) {
      dw /= a;
      log_scale += std::log(a);
    }
  };
  while (std::abs(w) <= R) {
    if (n >= n_max) return {};
    step();
    ++n;
  }
  constexpr double far = 1e12;
  for (int extra = 0; std::abs(w) < far && extra < 64; ++extra) {
    step();
    ++n;
  }
  const double scale = std::pow(static_cast<double>(d), -n);
  const double log_w = std::log(std::abs(w));
  GreenGradient g;
  g.value = scale * (log_w + std::log(std::abs(p.leading())) / (d - 1));
  g.grad_norm = scale * std::exp(std::log(std::abs(dw)) + log_scale - log_w);
  return g;
}

/// Lower bound on the distance from w to J_f: sinh(G) / (2 e^G |grad G|).
inline double julia_distance_bound(double green, double grad_norm) {
  if (grad_norm <= 0.0) return 0.0;
  return std::sinh(green) / (2.0 * std::exp(green) * grad_norm);
}

// ---------------------------------------------------------------------------
// Measure of maximal entropy by inverse iteration

/// True when z has a backward orbit of at most two points (the exceptional set).
inline bool is_exceptional(const RationalMap& f, const SpherePoint& z) {
  std::vector<SpherePoint> seen{z};
  std::vector<SpherePoint> frontier{z};
  auto add = [&](const SpherePoint& w) {
    for (const auto& s : seen)
      if (chordal(s, w) < 1e-7) return false;
    seen.push_back(w);
    return true;
  };
  for (int level = 0; level < 2; ++level) {
    std::vector<SpherePoint> next;
    for (const auto& t : frontier)
      for (const auto& w : preimages(f, t))
        if (add(w)) next.push_back(w);
    if (seen.size() > 2) return false;
    frontier = std::move(next);
  }
  return seen.size() <= 2;
}

struct MmemOptions {
  int burn_in = 20;  // minimum chain length
};

/// n_points samples of mu_f; sample i runs its own chain of `depth` random
/// backward steps from z0 (uniform choice among the d preimages), seeded by
/// (seed, i).
inline EmpiricalMeasure sample_mmem(const RationalMap& f, std::size_t n_points, int depth, const SpherePoint& z0,
                                    std::uint64_t seed, const MmemOptions& opt = {}) {
  if (depth < opt.burn_in) throw PreconditionError("sample_mmem: depth must be at least the burn-in of 20 steps");
  if (f.degree() < 2) throw PreconditionError("sample_mmem: degree must be at least 2");
  if (is_exceptional(f, z0))
    throw PreconditionError("sample_mmem: start point is exceptional (its backward orbit has at most two points)");

  const int d = f.degree();
  std::vector<Cx> pts(n_points);
  std::vector<unsigned char> at_infinity(n_points, 0);
  const bool quadratic_poly = f.is_polynomial() && d == 2;
  const Cx a2 = f.num()[2], a1 = f.num()[1], a0 = f.num()[0];
  parallel_for(n_points, [&](std::size_t i) {
    Stream rng(seed, i);
    SpherePoint z = z0;
    for (int s = 0; s < depth; ++s) {
      if (quadratic_poly && z.chart() == Chart::standard) {
        auto [r1, r2] = quadratic_roots(a2, a1, a0 - z.value());
        z = SpherePoint(rng.below(2) == 0 ? r1 : r2);
      } else {
        const auto pre = preimages(f, z);
        z = pre[static_cast<std::size_t>(rng.below(d))];
      }
    }
    if (z.is_infinity())
      at_infinity[i] = 1;
    else
      pts[i] = z.finite();
  });
  std::vector<Cx> kept;
  kept.reserve(n_points);
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < n_points; ++i) {
    if (at_infinity[i])
      ++dropped;
    else
      kept.push_back(pts[i]);
  }
  auto m = EmpiricalMeasure::uniform(std::move(kept), seed, Provenance::inverse_iteration);
  m.dropped = dropped;
  return m;
}

// ---------------------------------------------------------------------------
// Harmonic measure by walk-on-spheres

struct WalkOptions {
  double alpha = 0.9;
  long max_steps = 100000;
  double max_discard_fraction = 0.01;
  int green_n_max = 1000;
};

namespace detail {

// Exit point on |z| = R of Brownian motion from |w| > R: the inversion of
// the interior Poisson law, sampled as a disk automorphism of a uniform angle.
inline Cx exterior_circle_exit(Cx w, double R, Stream& rng) {
  const Cx a = R / std::conj(w);
  const Cx u = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
  return R * (u + a) / (1.0 + std::conj(a) * u);
}

}  // namespace detail

/// Exit distribution on J_f of Brownian motion from z_start, by
/// walk-on-spheres: from w jump to a uniform point on the circle of radius
/// alpha * dhat(w), where dhat is the Green-based distance lower bound; stop
/// once dhat < eps_stop. Far from K_f (|w| > 4 R_esc) the walk returns to
/// the circle of radius 2 R_esc in one exact exterior-Poisson jump, since
/// the exterior walk is otherwise null recurrent.
inline EmpiricalMeasure brownian_exit_measure(const RationalMap& f, Cx z_start, std::size_t n_walks, double eps_stop,
                                              std::uint64_t seed, const WalkOptions& opt = {}) {
  require_polynomial(f, "brownian_exit_measure");
  if (!(eps_stop > 0.0)) throw PreconditionError("brownian_exit_measure: eps_stop must be positive");
  const double R = auto_escape_radius(f);
  if (!(green_function(f, z_start, opt.green_n_max, R).value > 0.0))
    throw PreconditionError("brownian_exit_measure: start point lies in the filled Julia set (G = 0)");
  const double r_return = 2.0 * R;
  const double r_far = 2.0 * r_return;

  std::vector<Cx> exits(n_walks);
  std::vector<unsigned char> discarded(n_walks, 0);
  parallel_for(n_walks, [&](std::size_t i) {
    Stream rng(seed, i);
    Cx w = z_start;
    for (long step = 0;; ++step) {
      if (step >= opt.max_steps) {
        discarded[i] = 1;
        return;
      }
      if (std::abs(w) > r_far) {
        w = detail::exterior_circle_exit(w, r_return, rng);
        continue;
      }
      const auto G = green_with_gradient(f, w, opt.green_n_max, R);
      if (!(G.value > 0.0)) throw NumericError("walk-on-spheres stepped into the filled Julia set");
      const double dhat = julia_distance_bound(G.value, G.grad_norm);
      if (dhat < eps_stop) {
        exits[i] = w;
        return;
      }
      w += std::polar(opt.alpha * dhat, 2.0 * std::numbers::pi * rng.uniform());
    }
  });
  std::vector<Cx> kept;
  kept.reserve(n_walks);
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < n_walks; ++i) {
    if (discarded[i])
      ++dropped;
    else
      kept.push_back(exits[i]);
  }
  if (static_cast<double>(dropped) > opt.max_discard_fraction * static_cast<double>(n_walks)) {
    std::ostringstream msg;
    msg << "brownian_exit_measure: " << dropped << " of " << n_walks << " walks exceeded " << opt.max_steps << " steps";
    throw ConvergenceError(msg.str());
  }
  auto m = EmpiricalMeasure::uniform(std::move(kept), seed, Provenance::brownian_exit);
  m.dropped = dropped;
  return m;
}

// ---------------------------------------------------------------------------
// Comparison and transport

struct Window {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
  bool contains(Cx z) const { return z.real() >= xmin && z.real() < xmax && z.imag() >= ymin && z.imag() < ymax; }
};

struct ComparabilityReport {
  int bins = 0;
  double tv_distance = 0.0;
  double ratio_low = std::numeric_limits<double>::quiet_NaN();
  double ratio_high = std::numeric_limits<double>::quiet_NaN();
  int occupied_bins = 0;   // bins above the shot-noise floor in both measures
  std::size_t samples_a = 0;  // samples inside the window
  std::size_t samples_b = 0;
};

namespace detail {

struct Binned {
  std::vector<double> mass;
  std::size_t count = 0;
};

inline Binned bin_measure(const EmpiricalMeasure& mu, const Window& w, int bins) {
  Binned b;
  b.mass.assign(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins), 0.0);
  double total = 0.0;
  const double sx = bins / (w.xmax - w.xmin);
  const double sy = bins / (w.ymax - w.ymin);
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    const Cx z = mu.points[i];
    if (!w.contains(z)) continue;
    const int ix = std::min(bins - 1, static_cast<int>((z.real() - w.xmin) * sx));
    const int iy = std::min(bins - 1, static_cast<int>((z.imag() - w.ymin) * sy));
    b.mass[static_cast<std::size_t>(iy) * static_cast<std::size_t>(bins) + static_cast<std::size_t>(ix)] += mu.weights[i];
    total += mu.weights[i];
    ++b.count;
  }
  if (total > 0.0)
    for (double& m : b.mass) m /= total;
  return b;
}

}  // namespace detail

/// Binned total variation and density-ratio range of two measures restricted
/// to a window and renormalized. Ratios use only bins where both masses exceed
/// the shot-noise floor 10 / (samples in window).
inline ComparabilityReport measure_compare(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const Window& window,
                                           int bins, std::size_t min_samples = 1000) {
  if (bins < 1) throw PreconditionError("measure_compare: bins must be positive");
  if (!(window.xmax > window.xmin) || !(window.ymax > window.ymin))
    throw PreconditionError("measure_compare: empty window");
  const auto ba = detail::bin_measure(a, window, bins);
  const auto bb = detail::bin_measure(b, window, bins);
  if (ba.count == 0 || bb.count == 0) throw PreconditionError("measure_compare: a measure does not charge the window");
  if (ba.count < min_samples || bb.count < min_samples)
    throw PreconditionError("measure_compare: fewer than the required samples inside the window");
  ComparabilityReport r;
  r.bins = bins;
  r.samples_a = ba.count;
  r.samples_b = bb.count;
  const double floor_a = 10.0 / static_cast<double>(ba.count);
  const double floor_b = 10.0 / static_cast<double>(bb.count);
  double tv = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < ba.mass.size(); ++i) {
    tv += std::abs(ba.mass[i] - bb.mass[i]);
    if (ba.mass[i] > floor_a && bb.mass[i] > floor_b) {
      const double q = ba.mass[i] / bb.mass[i];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      ++r.occupied_bins;
    }
  }
  r.tv_distance = 0.5 * tv;
  if (r.occupied_bins > 0) {
    r.ratio_low = lo;
    r.ratio_high = hi;
  }
  return r;
}

/// sigma_* mu: apply sigma to every sample and keep its weight. Samples where
/// sigma is undefined or lands at infinity are dropped; more than 1% dropped
/// is an error.
inline EmpiricalMeasure pushforward_measure(const PointMap& sigma, const EmpiricalMeasure& mu,
                                            double max_drop_fraction = 0.01) {
  EmpiricalMeasure out;
  out.seed = mu.seed;
  out.provenance = Provenance::pushforward;
  out.points.reserve(mu.size());
  out.weights.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::optional<SpherePoint> w;
    try {
      w = sigma(SpherePoint(mu.points[i]));
    } catch (const NumericError&) {
      w.reset();
    }
    if (!w || w->is_infinity()) {
      ++out.dropped;
      continue;
    }
    out.points.push_back(w->finite());
    out.weights.push_back(mu.weights[i]);
  }
  if (static_cast<double>(out.dropped) > max_drop_fraction * static_cast<double>(mu.size()))
    throw PreconditionError("pushforward_measure: more than 1% of samples fell outside the map's domain");
  if (out.dropped > 0) out.normalize();
  return out;
}

}  // namespace holoscope
