#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "sphere.hpp"

namespace holoscope {

/// B(z) = e^{i phi} prod (z - a_i) / (1 - conj(a_i) z), |a_i| < 1.
/// Angles are measured in turns: x in [0, 1) stands for e^{2 pi i x}.
class BlaschkeProduct {
 public:
  static constexpr int kExpansionSamples = 2048;
  static constexpr int kLiftGrid = 4096;

  explicit BlaschkeProduct(std::vector<Cx> zeros, double rotation = 0.0)
      : zeros_(std::move(zeros)), rotation_(rotation) {
    if (zeros_.empty()) throw ConfigError("Blaschke product needs at least one zero");
    for (const Cx& a : zeros_)
      if (!(std::abs(a) < 1.0)) throw ConfigError("Blaschke zeros must lie in the open unit disk");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int k = 0; k < kExpansionSamples; ++k) {
      const double g = abs_derivative(static_cast<double>(k) / kExpansionSamples);
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    min_derivative_ = lo;
    max_derivative_ = hi;
    expanding_ = lo > 1.0;
    verify_lift();
  }

  int degree() const { return static_cast<int>(zeros_.size()); }
  const std::vector<Cx>& zeros() const { return zeros_; }
  double rotation() const { return rotation_; }
  bool expanding() const { return expanding_; }
  double min_derivative() const { return min_derivative_; }
  double max_derivative() const { return max_derivative_; }

  Cx operator()(Cx z) const {
    Cx acc = std::polar(1.0, rotation_);
    for (const Cx& a : zeros_) acc *= (z - a) / (1.0 - std::conj(a) * z);
    return acc;
  }

  /// Monotone lift F with B(e^{2 pi i x}) = e^{2 pi i F(x)} and F(x+1) = F(x) + d.
  /// Each factor contributes x - Arg(1 - conj(a) e^{2 pi i x}) / pi, and
  /// Re(1 - conj(a) e^{i t}) > 0 keeps the principal argument continuous.
  double lift(double x) const {
    double s = degree() * x + rotation_ / (2.0 * std::numbers::pi);
    const Cx u = std::polar(1.0, 2.0 * std::numbers::pi * x);
    for (const Cx& a : zeros_) s -= std::arg(1.0 - std::conj(a) * u) / std::numbers::pi;
    return s;
  }

  /// Circle map in turns, reduced to [0, 1).
  double circle_map(double x) const {
    const double y = lift(x);
    return y - std::floor(y);
  }

  /// |B'(e^{2 pi i x})| = sum (1 - |a|^2) / |e^{2 pi i x} - a|^2 on the circle.
  double abs_derivative(double x) const {
    const Cx u = std::polar(1.0, 2.0 * std::numbers::pi * x);
    double s = 0.0;
    for (const Cx& a : zeros_) s += (1.0 - std::norm(a)) / std::norm(u - a);
    return s;
  }

  /// n-fold lift F^n(x), tracked as integer part plus fraction so the
  /// fractional precision does not degrade as F^n grows like d^n.
  double lift_iterate(double x, int n) const {
    const double d = degree();
    double whole = std::floor(x);
    double frac = x - whole;
    for (int i = 0; i < n; ++i) {
      const double y = lift(frac);
      const double fy = std::floor(y);
      whole = d * whole + fy;
      frac = y - fy;
    }
    return whole + frac;
  }

 private:
  // The closed-form lift must agree with argument tracking of B along the
  // grid and wind exactly d times.
  void verify_lift() const {
    double tracked = lift(0.0);
    Cx prev = (*this)(Cx{1.0, 0.0});
    for (int k = 1; k <= kLiftGrid; ++k) {
      const double x = static_cast<double>(k) / kLiftGrid;
      const Cx cur = (*this)(std::polar(1.0, 2.0 * std::numbers::pi * x));
      tracked += std::arg(cur / prev) / (2.0 * std::numbers::pi);
      prev = cur;
      if (std::abs(tracked - lift(x)) > 1e-9) throw NumericError("Blaschke lift disagrees with argument tracking");
    }
    if (std::abs(tracked - lift(0.0) - degree()) > 1e-9) throw NumericError("Blaschke lift winding differs from degree");
  }

  std::vector<Cx> zeros_;
  double rotation_;
  double min_derivative_ = 0.0;
  double max_derivative_ = 0.0;
  bool expanding_ = false;
};

namespace detail {

inline void require_expanding(const BlaschkeProduct& B, int n) {
  if (!B.expanding()) throw PreconditionError("hyperbolicity hypothesis violated: min |B'| on the circle is <= 1");
  if (n < 1) throw PreconditionError("period must be at least 1");
  if (std::pow(static_cast<double>(B.degree()), n) > 1e6) throw PreconditionError("degree^n exceeds 1e6");
}

inline double circle_distance(double x, double y) {
  double t = std::abs(x - y);
  t -= std::floor(t);
  return std::min(t, 1.0 - t);
}

}  // namespace detail

/// All d^n - 1 fixed points of the n-th iterate of the circle map, in [0, 1).
/// G(x) = F^n(x) - x is increasing with G(x + 1) = G(x) + d^n - 1, so each
/// integer k in [G(0), G(0) + d^n - 1) has one root, found by bisection.
inline std::vector<double> circle_periodic_orbits(const BlaschkeProduct& B, int n, double angle_tol = 1e-13) {
  detail::require_expanding(B, n);
  const auto count = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(B.degree()), n))) - 1;
  auto G = [&](double x) { return B.lift_iterate(x, n) - x; };
  const double g0 = G(0.0);
  const double k0 = std::ceil(g0);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t j = 0; j < count; ++j) {
    const double k = k0 + static_cast<double>(j);
    double lo = 0.0, hi = 1.0;
    if (G(lo) >= k) {
      out.push_back(0.0);
      continue;
    }
    while (hi - lo > angle_tol) {
      const double mid = 0.5 * (lo + hi);
      if (G(mid) < k)
        lo = mid;
      else
        hi = mid;
    }
    const double x = 0.5 * (lo + hi);
    out.push_back(x >= 1.0 ? 0.0 : x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct SpectrumEntry {
  int period = 0;            // n of the iterate whose fixed point this is
  double angle = 0.0;        // turns in [0, 1)
  double exponent = 0.0;     // (1/n) sum log |B'| along the orbit
  int primitive_period = 0;  // divides period
  double cycle_key = 0.0;    // smallest angle on the orbit
};

struct LyapunovSpectrum {
  std::vector<SpectrumEntry> entries;
  int d = 0;
  int n_max = 0;

  /// One exponent per primitive cycle, sorted.
  std::vector<double> cycle_exponents() const {
    std::map<std::pair<int, std::int64_t>, double> cycles;
    for (const auto& e : entries) {
      if (e.period != e.primitive_period) continue;
      cycles.emplace(std::pair(e.primitive_period, std::llround(e.cycle_key * 1e10)), e.exponent);
    }
    std::vector<double> out;
    out.reserve(cycles.size());
    for (const auto& kv : cycles) out.push_back(kv.second);
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Every periodic angle of periods 1..n_max with its cycle exponent. Orbits
/// are followed by snapping each image to the nearest root of the same
/// census, so per-step errors never compound along the cycle.
inline LyapunovSpectrum lyapunov_spectrum(const BlaschkeProduct& B, int n_max) {
  detail::require_expanding(B, n_max);
  LyapunovSpectrum S;
  S.d = B.degree();
  S.n_max = n_max;
  for (int n = 1; n <= n_max; ++n) {
    const std::vector<double> roots = circle_periodic_orbits(B, n);
    auto snap = [&](double y) {
      const std::size_t m = roots.size();
      const auto hi = static_cast<std::size_t>(std::lower_bound(roots.begin(), roots.end(), y) - roots.begin()) % m;
      const std::size_t lo = (hi + m - 1) % m;
      return detail::circle_distance(roots[hi], y) <= detail::circle_distance(roots[lo], y) ? hi : lo;
    };
    std::vector<std::size_t> next(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) next[i] = snap(B.circle_map(roots[i]));
    for (std::size_t i = 0; i < roots.size(); ++i) {
      SpectrumEntry e;
      e.period = n;
      e.angle = roots[i];
      e.primitive_period = n;
      e.cycle_key = roots[i];
      double sum = 0.0;
      std::size_t j = i;
      for (int step = 0; step < n; ++step) {
        sum += std::log(B.abs_derivative(roots[j]));
        j = next[j];
        if (j == i && e.primitive_period == n) e.primitive_period = step + 1;
        if (e.primitive_period == n) e.cycle_key = std::min(e.cycle_key, roots[j]);
      }
      e.exponent = sum / n;
      S.entries.push_back(e);
    }
  }
  return S;
}

struct IntervalReport {
  double min = 0.0;
  double max = 0.0;
  double largest_gap = 0.0;
  int empty_cells = 0;     // cells of a uniform grid on [min, max] holding no exponent
  bool degenerate = false; // fewer than two distinct exponents
};

/// Largest empty subinterval of [min, max] between cycle exponents.
inline IntervalReport spectrum_interval_check(const LyapunovSpectrum& S, int grid = 64) {
  const auto ex = S.cycle_exponents();
  if (ex.empty()) throw PreconditionError("spectrum_interval_check: empty spectrum");
  IntervalReport r;
  r.min = ex.front();
  r.max = ex.back();
  if (ex.size() < 2) {
    r.degenerate = true;
    return r;
  }
  for (std::size_t i = 1; i < ex.size(); ++i) r.largest_gap = std::max(r.largest_gap, ex[i] - ex[i - 1]);
  if (r.max > r.min && grid > 0) {
    std::vector<bool> hit(static_cast<std::size_t>(grid), false);
    for (double e : ex)
      hit[std::min<std::size_t>(static_cast<std::size_t>(grid) - 1,
                                static_cast<std::size_t>((e - r.min) / (r.max - r.min) * grid))] = true;
    r.empty_cells = static_cast<int>(std::count(hit.begin(), hit.end(), false));
  }
  return r;
}

enum class Verdict { monomial_conjugate, non_rigid, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::monomial_conjugate: return "monomial-conjugate";
    case Verdict::non_rigid: return "non-rigid";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct RigidityReport {
  Verdict verdict = Verdict::inconclusive;
  double spread = 0.0;
  double mean = 0.0;
  double e = 0.0;  // exp(mean): the single multiplier scale when the spectrum is constant
};

/// Constant spectrum equal to log d: Mobius conjugate to z^d. Constant but
/// different from log d contradicts e = d and stays inconclusive.
inline RigidityReport rigidity_verdict(const LyapunovSpectrum& S, double tol = 1e-9) {
  if (S.n_max < 6) throw PreconditionError("rigidity_verdict: spectrum must reach period 6");
  const auto ex = S.cycle_exponents();
  if (ex.empty()) throw PreconditionError("rigidity_verdict: empty spectrum");
  RigidityReport r;
  r.spread = ex.back() - ex.front();
  double s = 0.0;
  for (double e : ex) s += e;
  r.mean = s / static_cast<double>(ex.size());
  r.e = std::exp(r.mean);
  if (r.spread < tol && std::abs(r.mean - std::log(static_cast<double>(S.d))) < tol)
    r.verdict = Verdict::monomial_conjugate;
  else if (r.spread > 10.0 * tol)
    r.verdict = Verdict::non_rigid;
  return r;
}

/// Dimension of the measure of maximal entropy when all exponents equal
/// `exponent`: entropy log d over the exponent.
inline double entropy_dimension(int d, double exponent) { return std::log(static_cast<double>(d)) / exponent; }

}  // namespace holoscope
