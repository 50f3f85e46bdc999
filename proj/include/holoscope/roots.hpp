#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"

namespace holoscope {

struct RootSolve {
  std::vector<Cx> roots;
  int iterations = 0;
  double max_backward_error = 0.0;  // max |p(z)| / sum |a_k||z|^k over roots
};

namespace detail {

// Newton correction p(z)/p'(z) and backward error of z. For |z| > 1 the
// reversed polynomial is used so nothing overflows on high degrees.
struct NewtonStep {
  Cx ratio;
  double backward_error;
};

inline NewtonStep newton_step(const Poly& p, const Poly& rev, Cx z) {
  const int n = p.degree();
  if (std::abs(z) <= 1.0) {
    auto [v, dv] = p.eval_with_derivative(z);
    const double s = p.abs_eval(std::abs(z));
    return {v / dv, s > 0.0 ? std::abs(v) / s : 0.0};
  }
  const Cx w = 1.0 / z;
  auto [v, dv] = rev.eval_with_derivative(w);
  const double s = rev.abs_eval(std::abs(w));
  // p'(z)/p(z) = n/z - w^2 rev'(w)/rev(w)
  const Cx log_deriv = static_cast<double>(n) * w - w * w * dv / v;
  return {1.0 / log_deriv, s > 0.0 ? std::abs(v) / s : 0.0};
}

}  // namespace detail

/// All roots of p, with multiplicity, by Aberth-Ehrlich simultaneous
/// iteration. Exact zero roots are split off first. The initial guesses sit
/// on a circle of radius |a_0/a_n|^(1/n) with a fixed angular offset, so the
/// result is deterministic. A root is frozen once its backward error drops
/// below a small multiple of machine epsilon.
inline RootSolve aberth_roots(const Poly& p_in, int max_iter = 500) {
  if (p_in.is_zero()) throw PreconditionError("aberth_roots: zero polynomial");
  RootSolve out;
  int zeros = 0;
  while (p_in[zeros] == Cx{}) ++zeros;
  out.roots.assign(static_cast<std::size_t>(zeros), Cx{});
  std::vector<Cx> rest(p_in.coeffs().begin() + zeros, p_in.coeffs().end());
  const Poly p(std::move(rest));
  const int n = p.degree();
  if (n <= 0) return out;
  if (n == 1) {
    out.roots.push_back(-p[0] / p[1]);
    return out;
  }
  const Poly rev = p.reversed(n);

  const double radius = std::pow(std::abs(p[0]) / std::abs(p[n]), 1.0 / n);
  std::vector<Cx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    z[static_cast<std::size_t>(k)] = std::polar(radius, 2.0 * std::numbers::pi * k / n + 0.4);

  constexpr double tol = 16.0 * std::numeric_limits<double>::epsilon();
  std::vector<bool> frozen(static_cast<std::size_t>(n), false);
  std::vector<double> berr(static_cast<std::size_t>(n), 1.0);
  int remaining = n;
  int it = 0;
  for (; it < max_iter && remaining > 0; ++it) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (frozen[i]) continue;
      const auto step = detail::newton_step(p, rev, z[i]);
      berr[i] = step.backward_error;
      if (step.backward_error <= tol || !std::isfinite(std::abs(step.ratio))) {
        frozen[i] = true;
        --remaining;
        continue;
      }
      Cx repulsion{};
      for (std::size_t j = 0; j < z.size(); ++j)
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      const Cx corr = step.ratio / (1.0 - step.ratio * repulsion);
      z[i] -= corr;
      if (std::abs(corr) <= std::numeric_limits<double>::epsilon() * std::abs(z[i])) {
        berr[i] = detail::newton_step(p, rev, z[i]).backward_error;
        frozen[i] = true;
        --remaining;
      }
    }
  }
  out.iterations = it;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!frozen[i]) berr[i] = detail::newton_step(p, rev, z[i]).backward_error;
    out.max_backward_error = std::max(out.max_backward_error, berr[i]);
  }
  if (remaining > 0 && out.max_backward_error > 1e-8) {
    std::ostringstream msg;
    msg << "Aberth iteration did not converge after " << max_iter << " iterations (degree " << n
        << ", " << remaining << " roots unsettled, max backward error " << out.max_backward_error << ")";
    throw ConvergenceError(msg.str());
  }
  out.roots.insert(out.roots.end(), z.begin(), z.end());
  return out;
}

/// Roots of a z^2 + b z + c by the cancellation-free quadratic formula.
inline std::pair<Cx, Cx> quadratic_roots(Cx a, Cx b, Cx c) {
  const Cx disc = std::sqrt(b * b - 4.0 * a * c);
  const Cx q = -0.5 * (std::real(std::conj(b) * disc) >= 0.0 ? b + disc : b - disc);
  if (q == Cx{}) return {Cx{}, Cx{}};
  return {q / a, c / q};
}

}  // namespace holoscope
