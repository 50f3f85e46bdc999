#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "linearization.hpp"
#include "point_map.hpp"
#include "rational_map.hpp"

namespace holoscope {

// ---------------------------------------------------------------------------
// Multiplier and degree relations

struct MultiplierRelation {
  int a = 0;
  int b = 0;
  int ell = 1;
  double defect = 0.0;
  std::int64_t branch = 0;  // k in a ell Log l1 - b Log l2 - 2 pi i k
  bool primitive = false;
};

/// Distance from a ell Log l1 - b Log l2 to the lattice 2 pi i Z, searching
/// branches |k| <= branch_bound.
inline std::pair<double, std::int64_t> relation_defect(Cx log1, Cx log2, int a, int b, int ell,
                                                        std::int64_t branch_bound) {
  const Cx x = static_cast<double>(a) * ell * log1 - static_cast<double>(b) * log2;
  const double two_pi = 2.0 * std::numbers::pi;
  auto k = static_cast<std::int64_t>(std::llround(x.imag() / two_pi));
  k = std::clamp(k, -branch_bound, branch_bound);
  return {std::abs(x - Cx{0.0, two_pi * static_cast<double>(k)}), k};
}

/// All (a, b) in [1, a_max] x [1, b_max] with l1^(a ell) = l2^b up to tol on
/// the log scale. A relation is primitive when no listed (a/t, b/t), t > 1,
/// precedes it.
inline std::vector<MultiplierRelation> multiplier_relation_search(Cx lambda1, int ell, Cx lambda2, int a_max,
                                                                  int b_max, double tol = 1e-9) {
  if (!(std::abs(lambda1) > 1.0) || !(std::abs(lambda2) > 1.0))
    throw PreconditionError("multiplier_relation_search: both multipliers must be repelling");
  if (ell < 1 || a_max < 1 || b_max < 1) throw PreconditionError("multiplier_relation_search: bounds must be positive");
  const Cx log1 = std::log(lambda1);
  const Cx log2 = std::log(lambda2);
  const std::int64_t bound = static_cast<std::int64_t>(a_max) * ell + b_max;
  std::vector<MultiplierRelation> out;
  for (int a = 1; a <= a_max; ++a) {
    for (int b = 1; b <= b_max; ++b) {
      auto [defect, k] = relation_defect(log1, log2, a, b, ell, bound);
      if (defect < tol) out.push_back({a, b, ell, defect, k, false});
    }
  }
  for (auto& r : out) {
    r.primitive = std::none_of(out.begin(), out.end(), [&](const MultiplierRelation& s) {
      return s.a < r.a && r.a % s.a == 0 && s.b * (r.a / s.a) == r.b;
    });
  }
  return out;
}

/// d1^a == d2^b exactly, compared through prime factorizations.
inline bool degree_relation_check(std::int64_t d1, std::int64_t a, std::int64_t d2, std::int64_t b) {
  if (d1 < 2 || d2 < 2 || a < 1 || b < 1) throw PreconditionError("degree_relation_check: need d >= 2 and exponents >= 1");
  auto factor = [](std::int64_t n) {
    std::map<std::int64_t, std::int64_t> f;
    for (std::int64_t p = 2; p * p <= n; ++p)
      while (n % p == 0) {
        ++f[p];
        n /= p;
      }
    if (n > 1) ++f[n];
    return f;
  };
  auto f1 = factor(d1);
  auto f2 = factor(d2);
  if (f1.size() != f2.size()) return false;
  for (const auto& [p, e] : f1) {
    auto it = f2.find(p);
    if (it == f2.end() || e * a != it->second * b) return false;
  }
  return true;
}

/// max over samples of chordal(f2^b(sigma(z)), sigma(f1^a(z))).
inline double semiconjugacy_residual(const RationalMap& f1, int a, const RationalMap& f2, int b, const PointMap& sigma,
                                     const std::vector<SpherePoint>& samples) {
  double worst = 0.0;
  std::vector<std::size_t> offending;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto s = sigma(samples[i]);
    const auto t = sigma(iterate(f1, samples[i], a));
    if (!s || !t) {
      offending.push_back(i);
      continue;
    }
    worst = std::max(worst, chordal(iterate(f2, *s, b), *t));
  }
  if (!offending.empty()) {
    std::ostringstream msg;
    msg << "semiconjugacy_residual: sigma undefined at samples";
    for (std::size_t k = 0; k < offending.size() && k < 20; ++k) msg << ' ' << offending[k];
    if (offending.size() > 20) msg << " ... (" << offending.size() << " total)";
    throw PreconditionError(msg.str());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Algebraic curves P(x, y) = sum c_ij x^i y^j

struct CurveCandidate {
  int m = 0;  // degree in x
  int n = 0;  // degree in y
  Eigen::MatrixXcd coeffs;  // (m+1) x (n+1), unit Frobenius norm
  double fit_residual = 0.0;
  std::optional<double> invariance_residual;
  std::size_t dropped = 0;
  bool possibly_reducible = true;  // irreducibility is never decided

  Cx eval(Cx x, Cx y) const {
    Cx acc{};
    for (int i = m; i >= 0; --i) {
      Cx row{};
      for (int j = n; j >= 0; --j) row = row * y + coeffs(i, j);
      acc = acc * x + row;
    }
    return acc;
  }

  /// sum |c_ij| |x|^i |y|^j
  double scale(Cx x, Cx y) const {
    const double ax = std::abs(x), ay = std::abs(y);
    double acc = 0.0;
    for (int i = m; i >= 0; --i) {
      double row = 0.0;
      for (int j = n; j >= 0; --j) row = row * ay + std::abs(coeffs(i, j));
      acc = acc * ax + row;
    }
    return acc;
  }

  double normalized_eval(Cx x, Cx y) const {
    const double s = scale(x, y);
    return s > 0.0 ? std::abs(eval(x, y)) / s : 0.0;
  }
};

namespace detail {

// Unit Frobenius norm, largest-modulus entry real positive.
inline void normalize_curve(Eigen::MatrixXcd& c) {
  const double nrm = c.norm();
  if (nrm == 0.0) throw NumericError("curve coefficients vanish identically");
  Eigen::Index bi = 0, bj = 0;
  c.cwiseAbs().maxCoeff(&bi, &bj);
  const Cx phase = std::abs(c(bi, bj)) / c(bi, bj);
  c *= phase / nrm;
}

inline bool affine(Cx z, double limit) {
  return std::isfinite(z.real()) && std::isfinite(z.imag()) && std::abs(z) <= limit;
}

}  // namespace detail

/// Least-squares curve of bidegree (m, n) through the samples: the right
/// singular vector of the smallest singular value of the column-normalized
/// monomial matrix. fit_residual = sigma_min / sqrt(sample count).
inline CurveCandidate fit_invariant_curve(const std::vector<std::pair<Cx, Cx>>& samples, int m, int n,
                                          double affine_limit = 1e8) {
  if (m < 0 || n < 0 || m + n == 0) throw PreconditionError("fit_invariant_curve: bidegree must be nonconstant");
  std::vector<std::pair<Cx, Cx>> pts;
  pts.reserve(samples.size());
  for (const auto& [x, y] : samples)
    if (detail::affine(x, affine_limit) && detail::affine(y, affine_limit)) pts.emplace_back(x, y);
  const int cols = (m + 1) * (n + 1);
  if (static_cast<int>(pts.size()) < 3 * cols)
    throw PreconditionError("fit_invariant_curve: need at least 3 (m+1)(n+1) finite samples");

  Eigen::MatrixXcd A(static_cast<Eigen::Index>(pts.size()), cols);
  for (std::size_t r = 0; r < pts.size(); ++r) {
    Cx xi{1.0};
    for (int i = 0; i <= m; ++i) {
      Cx yj{1.0};
      for (int j = 0; j <= n; ++j) {
        A(static_cast<Eigen::Index>(r), i * (n + 1) + j) = xi * yj;
        yj *= pts[r].second;
      }
      xi *= pts[r].first;
    }
  }
  Eigen::VectorXd colnorm = A.colwise().norm().transpose();
  for (int k = 0; k < cols; ++k) {
    if (colnorm(k) == 0.0) colnorm(k) = 1.0;
    A.col(k) /= colnorm(k);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (cols >= 2 && sv(cols - 1) < 1e-12 && sv(cols - 2) < 1e-12)
    throw NumericError("fit_invariant_curve: curve not unique at this bidegree");

  CurveCandidate c;
  c.m = m;
  c.n = n;
  c.dropped = samples.size() - pts.size();
  c.coeffs.resize(m + 1, n + 1);
  const Eigen::VectorXcd v = svd.matrixV().col(cols - 1);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) c.coeffs(i, j) = v(i * (n + 1) + j) / colnorm(i * (n + 1) + j);
  detail::normalize_curve(c.coeffs);
  c.fit_residual = sv(cols - 1) / std::sqrt(static_cast<double>(pts.size()));
  return c;
}

struct CurveSweep {
  std::optional<CurveCandidate> curve;
  std::vector<std::pair<int, int>> tried;
};

/// Bidegrees in order of increasing (m+1)(n+1) (then m), stopping at the
/// first fit below `target`. Bidegrees where the fit is not unique are skipped.
inline CurveSweep sweep_invariant_curve(const std::vector<std::pair<Cx, Cx>>& samples, int max_degree = 4,
                                        double target = 1e-8) {
  std::vector<std::pair<int, int>> order;
  for (int m = 1; m <= max_degree; ++m)
    for (int n = 1; n <= max_degree; ++n) order.emplace_back(m, n);
  std::stable_sort(order.begin(), order.end(), [](auto p, auto q) {
    return std::pair((p.first + 1) * (p.second + 1), p.first) < std::pair((q.first + 1) * (q.second + 1), q.first);
  });
  CurveSweep out;
  for (auto [m, n] : order) {
    if (static_cast<int>(samples.size()) < 3 * (m + 1) * (n + 1)) break;
    out.tried.emplace_back(m, n);
    try {
      auto c = fit_invariant_curve(samples, m, n);
      if (c.fit_residual < target) {
        out.curve = std::move(c);
        break;
      }
    } catch (const NumericError&) {
      continue;
    }
  }
  return out;
}

/// Max over on-curve samples of the normalized value of P at
/// (f1^a(x), f2^b(y)). Images outside the affine chart are dropped and
/// counted; the result is stored on the curve.
inline double curve_invariance_check(CurveCandidate& curve, const RationalMap& f1, int a, const RationalMap& f2, int b,
                                     const std::vector<std::pair<Cx, Cx>>& samples_on_curve,
                                     double affine_limit = 1e8) {
  double worst = 0.0;
  std::size_t dropped = 0;
  for (const auto& [x, y] : samples_on_curve) {
    if (curve.normalized_eval(x, y) >= 1e-8)
      throw PreconditionError("curve_invariance_check: a sample does not lie on the curve (|P| >= 1e-8)");
    const SpherePoint fx = iterate(f1, SpherePoint(x), a);
    const SpherePoint fy = iterate(f2, SpherePoint(y), b);
    if (fx.is_infinity() || fy.is_infinity() || !detail::affine(fx.finite(), affine_limit) ||
        !detail::affine(fy.finite(), affine_limit)) {
      ++dropped;
      continue;
    }
    worst = std::max(worst, curve.normalized_eval(fx.finite(), fy.finite()));
  }
  if (dropped == samples_on_curve.size()) throw PreconditionError("curve_invariance_check: every image left the affine chart");
  curve.dropped += dropped;
  curve.invariance_residual = worst;
  return worst;
}

/// Numerator of f^k(x) - f^l(y) = N_k(x) D_l(y) - N_l(y) D_k(x), bidegree (d^k, d^l).
inline CurveCandidate iterate_graph_curve(const RationalMap& f, int k, int l) {
  if (k < 0 || l < 0) throw PreconditionError("iterate_graph_curve: negative iterate");
  double top = 1.0;
  for (int i = 0; i < std::max(k, l); ++i) top *= f.degree();
  if (top > 1e3) throw PreconditionError("iterate_graph_curve: degree^max(k,l) above 1000");
  const RationalMap fk = compose_power(f, k);
  const RationalMap fl = compose_power(f, l);
  const int m = fk.degree();
  const int n = fl.degree();
  CurveCandidate c;
  c.m = m;
  c.n = n;
  c.coeffs = Eigen::MatrixXcd::Zero(m + 1, n + 1);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) c.coeffs(i, j) = fk.num()[i] * fl.den()[j] - fk.den()[i] * fl.num()[j];
  if (!c.coeffs.allFinite()) throw ConvergenceError("iterate_graph_curve: coefficient overflow");
  detail::normalize_curve(c.coeffs);
  c.fit_residual = 0.0;
  return c;
}

// ---------------------------------------------------------------------------
// End-to-end report for a pair of maps at repelling fixed points

struct CorrespondenceOptions {
  int a_max = 8;
  int b_max = 8;
  double tol = 1e-9;
  Cx beta{1.0};
  int ell = 1;
  int root_index = 0;
  int truncation = 64;
  int graph_samples = 200;
  int max_bidegree = 4;
};

struct DegreeCheck {
  int a = 0, b = 0;
  bool holds = false;
};

struct CorrespondenceReport {
  Cx lambda1{}, lambda2{};
  int d1 = 0, d2 = 0;
  std::vector<MultiplierRelation> relations;
  std::vector<DegreeCheck> degree_checks;
  std::optional<CurveCandidate> curve;
  std::vector<std::pair<int, int>> bidegrees_tried;
  std::optional<MultiplierRelation> invariance_relation;
};

/// Samples (psi_1(zeta), chi_2(zeta)) on a sunflower grid of the disk where
/// both raw series are trusted (radius capped at 1).
inline std::vector<std::pair<Cx, Cx>> linearizer_graph_samples(const Linearizer& psi1, const RationalMap& f1,
                                                               const GeneralizedLinearizer& chi2, const RationalMap& f2,
                                                               int count) {
  const double radius = std::min({1.0, psi1.trust_radius, generalized_trust_radius(chi2)});
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<std::pair<Cx, Cx>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const Cx zeta = std::polar(radius * std::sqrt((k + 0.5) / count), golden * k);
    const SpherePoint x = eval_linearizer(psi1, f1, zeta);
    const SpherePoint y = eval_generalized(chi2, f2, zeta);
    if (x.is_infinity() || y.is_infinity()) continue;
    out.emplace_back(x.finite(), y.finite());
  }
  return out;
}

inline CorrespondenceReport analyze_correspondence(const RationalMap& f1, const SpherePoint& p1, const RationalMap& f2,
                                                   const SpherePoint& p2, const CorrespondenceOptions& opt = {}) {
  CorrespondenceReport rep;
  rep.d1 = f1.degree();
  rep.d2 = f2.degree();
  if (chordal(eval(f1, p1), p1) > 1e-8 || chordal(eval(f2, p2), p2) > 1e-8)
    throw PreconditionError("correspondence: base points must be fixed points of their maps");
  rep.lambda1 = derivative(f1, p1);
  rep.lambda2 = derivative(f2, p2);
  rep.relations = multiplier_relation_search(rep.lambda1, opt.ell, rep.lambda2, opt.a_max, opt.b_max, opt.tol);
  for (const auto& r : rep.relations) rep.degree_checks.push_back({r.a, r.b, degree_relation_check(rep.d1, r.a, rep.d2, r.b)});

  const Linearizer psi1 = koenigs_series(f1, p1, opt.truncation);
  const GeneralizedLinearizer chi2 = generalized_koenigs(f2, p2, opt.beta, opt.ell, opt.root_index, opt.truncation);
  const auto samples = linearizer_graph_samples(psi1, f1, chi2, f2, opt.graph_samples);
  auto sweep = sweep_invariant_curve(samples, opt.max_bidegree);
  rep.bidegrees_tried = std::move(sweep.tried);
  rep.curve = std::move(sweep.curve);
  if (rep.curve) {
    for (const auto& r : rep.relations) {
      if (!r.primitive) continue;
      curve_invariance_check(*rep.curve, f1, r.a, f2, r.b, samples);
      rep.invariance_relation = r;
      break;
    }
  }
  return rep;
}

}  // namespace holoscope
