#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "rational_map.hpp"

namespace holoscope {

/// Truncated power series psi(zeta) = sum c_n zeta^n with f(psi(zeta)) =
/// psi(lambda zeta), psi(0) = p, psi'(0) = 1. When p is infinity the series
/// lives in the reciprocal chart (the map is conjugated by z -> 1/z).
struct Linearizer {
  SpherePoint base;
  Chart chart = Chart::standard;
  Cx lambda{};
  std::vector<Cx> coeffs;
  double trust_radius = 0.0;
  double residual_at_trust = 0.0;

  int truncation() const { return static_cast<int>(coeffs.size()) - 1; }

  /// Raw series value, as a point of the sphere.
  SpherePoint series(Cx zeta) const {
    Cx acc{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * zeta + *it;
    return SpherePoint::in_chart(chart, acc);
  }
};

/// chi(zeta) = psi(beta zeta^ell), with f(chi(zeta)) = chi(kappa zeta), kappa^ell = lambda.
struct GeneralizedLinearizer {
  Linearizer inner;
  Cx beta{1.0};
  int ell = 1;
  int root_index = 0;
  Cx kappa{};
};

struct LinearizerOptions {
  int boundary_samples = 64;
  double residual_target = 1e-8;
  int sweep_min_exp = -30;  // dyadic radii 2^k
  int sweep_max_exp = 30;
};

/// Max chordal distance between f(series(zeta)) and series(lambda zeta)
/// over equispaced zeta on |zeta| = radius, using the raw truncated series.
inline double linearizer_residual(const Linearizer& L, const RationalMap& f, double radius, int samples = 64) {
  if (radius < 0.0) throw PreconditionError("linearizer_residual: negative radius");
  if (samples < 1) throw PreconditionError("linearizer_residual: need at least one sample");
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Cx zeta = std::polar(radius, 2.0 * std::numbers::pi * k / samples);
    const double r = chordal(eval(f, L.series(zeta)), L.series(L.lambda * zeta));
    if (!(r <= worst)) worst = std::isnan(r) ? 1.0 : r;
  }
  return worst;
}

/// Koenigs coefficients at a repelling fixed point, truncated at degree N.
///
/// With a_j the Taylor coefficients of f at p and h = psi - p, matching the
/// zeta^n terms of f(psi(zeta)) = psi(lambda zeta) gives
///   (lambda^n - lambda) c_n = sum_{j>=2} a_j [h^j]_n,
/// and [h^j]_n involves only c_1..c_{n-1}. The powers of h are built one
/// coefficient at a time, which keeps the recursion triangular.
inline Linearizer koenigs_series(const RationalMap& f_in, const SpherePoint& p, int N = 64,
                                 const LinearizerOptions& opt = {}) {
  if (N < 1 || N > 512) throw PreconditionError("koenigs_series: truncation must lie in [1, 512]");
  if (chordal(eval(f_in, p), p) > 1e-8) throw PreconditionError("koenigs_series: base point is not fixed by f");

  Linearizer L;
  L.base = p;
  L.chart = p.is_infinity() ? Chart::reciprocal : Chart::standard;
  const RationalMap f = L.chart == Chart::reciprocal ? conjugate_by_inversion(f_in) : f_in;
  const Cx p0 = L.chart == Chart::reciprocal ? Cx{} : p.finite();

  const Poly num = f.num().shifted(p0);
  const Poly den = f.den().shifted(p0);
  if (den[0] == Cx{}) throw PreconditionError("koenigs_series: base point is a pole");

  // Taylor coefficients a_j of num/den at p0 by series division.
  const auto n1 = static_cast<std::size_t>(N) + 1;
  std::vector<Cx> a(n1, Cx{});
  for (int j = 0; j <= N; ++j) {
    Cx s = num[j];
    for (int k = 1; k <= std::min(j, den.degree()); ++k) s -= den[k] * a[static_cast<std::size_t>(j - k)];
    a[static_cast<std::size_t>(j)] = s / den[0];
  }
  const Cx lambda = a[1];
  if (std::abs(lambda) <= 1.0) throw PreconditionError("koenigs_series: fixed point is not repelling (|lambda| <= 1)");
  L.lambda = lambda;

  // pw[j][n] = [h^j]_n; h^j starts at zeta^j.
  std::vector<std::vector<Cx>> pw(n1, std::vector<Cx>(n1, Cx{}));
  std::vector<Cx> c(n1, Cx{});
  c[0] = p0;
  c[1] = 1.0;
  pw[1][1] = 1.0;
  Cx lambda_n = lambda;
  for (std::size_t n = 2; n <= static_cast<std::size_t>(N); ++n) {
    lambda_n *= lambda;
    Cx rhs{};
    for (std::size_t j = 2; j <= n; ++j) {
      Cx s{};
      for (std::size_t k = 1; k + (j - 1) <= n; ++k) s += c[k] * pw[j - 1][n - k];
      pw[j][n] = s;
      rhs += a[j] * s;
    }
    c[n] = rhs / (lambda_n - lambda);
    pw[1][n] = c[n];
  }
  L.coeffs = std::move(c);

  // Dyadic sweep: the largest 2^k in the initial passing run.
  bool any = false;
  for (int k = opt.sweep_min_exp; k <= opt.sweep_max_exp; ++k) {
    const double rho = std::ldexp(1.0, k);
    const double r = linearizer_residual(L, f_in, rho, opt.boundary_samples);
    if (!(r < opt.residual_target)) break;
    L.trust_radius = rho;
    L.residual_at_trust = r;
    any = true;
  }
  if (!any) throw ConvergenceError("koenigs_series: functional-equation residual above target at every radius");
  return L;
}

/// psi(zeta) = f^m(series(lambda^-m zeta)) with the smallest m >= 0 that
/// brings lambda^-m zeta inside the trust radius.
inline SpherePoint eval_linearizer(const Linearizer& L, const RationalMap& f, Cx zeta, int pullback_steps) {
  if (pullback_steps < 0) throw PreconditionError("eval_linearizer: negative pullback count");
  Cx inner = zeta;
  for (int i = 0; i < pullback_steps; ++i) inner /= L.lambda;
  return iterate(f, L.series(inner), pullback_steps);
}

inline int pullback_steps_for(const Linearizer& L, Cx zeta) {
  const double r = std::abs(zeta);
  if (r <= L.trust_radius) return 0;
  return std::max(0, static_cast<int>(std::ceil(std::log(r / L.trust_radius) / std::log(std::abs(L.lambda)))));
}

inline SpherePoint eval_linearizer(const Linearizer& L, const RationalMap& f, Cx zeta) {
  return eval_linearizer(L, f, zeta, pullback_steps_for(L, zeta));
}

/// Selected ell-th root of lambda: the principal root rotated by 2 pi root_index / ell.
inline Cx select_root(Cx lambda, int ell, int root_index) {
  return std::polar(std::pow(std::abs(lambda), 1.0 / ell),
                    (std::arg(lambda) + 2.0 * std::numbers::pi * root_index) / ell);
}

inline GeneralizedLinearizer generalized_koenigs(const RationalMap& f, const SpherePoint& p, Cx beta, int ell,
                                                 int root_index, int N = 64) {
  if (beta == Cx{}) throw PreconditionError("generalized_koenigs: beta must be nonzero");
  if (ell < 1) throw PreconditionError("generalized_koenigs: ell must be at least 1");
  if (root_index < 0 || root_index >= ell) throw PreconditionError("generalized_koenigs: root_index outside [0, ell)");
  GeneralizedLinearizer g;
  g.inner = koenigs_series(f, p, N);
  g.beta = beta;
  g.ell = ell;
  g.root_index = root_index;
  g.kappa = select_root(g.inner.lambda, ell, root_index);
  return g;
}

inline Cx generalized_argument(const GeneralizedLinearizer& g, Cx zeta) {
  Cx z{1.0};
  for (int i = 0; i < g.ell; ++i) z *= zeta;
  return g.beta * z;
}

/// chi(zeta), extended beyond the trust disk by pullback.
inline SpherePoint eval_generalized(const GeneralizedLinearizer& g, const RationalMap& f, Cx zeta) {
  return eval_linearizer(g.inner, f, generalized_argument(g, zeta));
}

/// Radius on which chi needs only the raw series: (rho_0 / |beta|)^(1/ell).
inline double generalized_trust_radius(const GeneralizedLinearizer& g) {
  return std::pow(g.inner.trust_radius / std::abs(g.beta), 1.0 / g.ell);
}

/// Max chordal distance between f(chi(zeta)) and chi(kappa zeta) on
/// |zeta| = radius, raw series on both sides (so kappa^ell = lambda is tested).
inline double generalized_residual(const GeneralizedLinearizer& g, const RationalMap& f, double radius,
                                   int samples = 64) {
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Cx zeta = std::polar(radius, 2.0 * std::numbers::pi * k / samples);
    const SpherePoint lhs = eval(f, g.inner.series(generalized_argument(g, zeta)));
    const SpherePoint rhs = g.inner.series(generalized_argument(g, g.kappa * zeta));
    const double r = chordal(lhs, rhs);
    if (!(r <= worst)) worst = std::isnan(r) ? 1.0 : r;
  }
  return worst;
}

}  // namespace holoscope
