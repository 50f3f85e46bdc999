#include <catch_amalgamated.hpp>

#include <holoscope/correspondence.hpp>
#include <holoscope/point_map.hpp>
#include <holoscope/random.hpp>

#include <numeric>

#include "support/oracles.hpp"

using namespace holoscope;

namespace {

RationalMap poly(std::initializer_list<Cx> c) { return RationalMap::polynomial(Poly(c)); }

std::vector<std::pair<Cx, Cx>> disk_samples(int count, auto&& graph) {
  std::vector<std::pair<Cx, Cx>> out;
  const double golden = oracle::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const Cx zeta = std::polar(std::sqrt((k + 0.5) / count), golden * k);
    out.push_back(graph(zeta));
  }
  return out;
}

/// P up to a scalar: the coefficient matrix matches `expect` after normalization.
bool same_curve(const Eigen::MatrixXcd& got, Eigen::MatrixXcd expect, double tol) {
  if (got.rows() != expect.rows() || got.cols() != expect.cols()) return false;
  detail::normalize_curve(expect);
  return (got - expect).norm() < tol;
}

}  // namespace

TEST_CASE("multiplier relations", "[correspondence]") {
  auto rel = multiplier_relation_search(2.0, 1, 4.0, 8, 8);
  REQUIRE_FALSE(rel.empty());
  CHECK(rel[0].a == 2);
  CHECK(rel[0].b == 1);
  CHECK(rel[0].primitive);
  CHECK(rel[0].defect < 1e-15);
  for (std::size_t i = 1; i < rel.size(); ++i) {
    CHECK_FALSE(rel[i].primitive);
    CHECK(rel[i].a == 2 * rel[i].b);
  }
  CHECK(rel.size() == 4);  // (2,1), (4,2), (6,3), (8,4)

  CHECK(multiplier_relation_search(2.0, 1, 3.0, 20, 20).empty());

  const double phi = 1.0 + std::sqrt(5.0);
  const auto basilica = multiplier_relation_search(phi, 1, phi * phi, 6, 6);
  REQUIRE_FALSE(basilica.empty());
  CHECK(basilica[0].a == 2);
  CHECK(basilica[0].b == 1);
  CHECK(basilica[0].primitive);

  // complex multipliers need the branch lattice: (2i)^2 = -4
  const auto cx = multiplier_relation_search(Cx{0.0, 2.0}, 1, -4.0, 4, 4);
  REQUIRE_FALSE(cx.empty());
  CHECK(cx[0].a == 2);
  CHECK(cx[0].b == 1);

  CHECK_THROWS_AS(multiplier_relation_search(0.5, 1, 2.0, 4, 4), PreconditionError);
}

TEST_CASE("log 2 / log 3 has no small rational relation", "[correspondence]") {
  // independent check with continued fractions of log 2 / log 3
  CHECK_FALSE(oracle::has_small_rational_relation(std::log(2.0) / std::log(3.0), 20, 1e-9));
  CHECK(oracle::has_small_rational_relation(std::log(2.0) / std::log(4.0), 20, 1e-9));
}

TEST_CASE("relations are closed under multiples", "[correspondence][property]") {
  Stream rng(9, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Cx l1 = std::polar(1.2 + 2.0 * rng.uniform(), 6.283185307179586 * rng.uniform());
    const int p = 1 + rng.below(3);
    Cx l2 = 1.0;
    for (int i = 0; i < p; ++i) l2 *= l1;
    const auto rel = multiplier_relation_search(l1, 1, l2, 12, 12);
    for (const auto& r : rel)
      if (r.primitive)
        for (int t = 2; t * r.a <= 12 && t * r.b <= 12; ++t)
          CHECK(std::any_of(rel.begin(), rel.end(), [&](const auto& s) { return s.a == t * r.a && s.b == t * r.b; }));
    CHECK(std::any_of(rel.begin(), rel.end(), [&](const auto& s) { return s.a == p && s.b == 1; }));
  }
}

TEST_CASE("degree relations are exact", "[correspondence]") {
  CHECK(degree_relation_check(2, 2, 4, 1));
  CHECK_FALSE(degree_relation_check(2, 3, 4, 1));
  CHECK(degree_relation_check(8, 2, 4, 3));
  CHECK(degree_relation_check(6, 40, 36, 20));
  CHECK_FALSE(degree_relation_check(6, 40, 36, 21));
  CHECK_FALSE(degree_relation_check(6, 2, 4, 1));
  // values far beyond 64 bits
  CHECK(degree_relation_check(1000003, 60, 1000003, 60));
}

TEST_CASE("semiconjugacy residuals", "[correspondence]") {
  std::vector<SpherePoint> pts;
  Stream rng(2, 0);
  for (int i = 0; i < 64; ++i) pts.emplace_back(Cx{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0});
  const auto z2 = poly({0, 0, 1});
  const auto z4 = poly({0, 0, 0, 0, 1});
  CHECK(semiconjugacy_residual(z2, 2, z4, 1, as_point_map(z2), pts) < 1e-15);
  const auto g = RationalMap(Poly{1, 0, 1}, Poly{-1, 0, 1});
  const PointMap id = [](const SpherePoint& z) -> std::optional<SpherePoint> { return z; };
  CHECK(semiconjugacy_residual(g, 3, g, 3, id, pts) == 0.0);
  CHECK(semiconjugacy_residual(z2, 1, z2, 1, as_point_map(z2), pts) < 1e-15);
  CHECK(semiconjugacy_residual(poly({1, 0, 1}), 1, z2, 1, as_point_map(z2), pts) > 1e-2);
  const PointMap half = [](const SpherePoint& z) -> std::optional<SpherePoint> {
    if (z.finite().real() < 0.0) return std::nullopt;
    return z;
  };
  try {
    semiconjugacy_residual(z2, 1, z2, 1, half, pts);
    FAIL("domain violation not reported");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("samples") != std::string::npos);
  }
}

TEST_CASE("curve fitting", "[correspondence]") {
  Eigen::MatrixXcd parabola = Eigen::MatrixXcd::Zero(3, 2);
  parabola(0, 1) = 1.0;   // y
  parabola(2, 0) = -1.0;  // -x^2

  const auto on = disk_samples(200, [](Cx z) { return std::pair{2.0 * z, 4.0 * z * z}; });
  const auto c = fit_invariant_curve(on, 2, 1);
  CHECK(c.fit_residual < 1e-10);
  CHECK(same_curve(c.coeffs, parabola, 1e-9));
  CHECK(std::abs(c.coeffs.norm() - 1.0) < 1e-14);

  const auto expo = disk_samples(200, [](Cx z) { return std::pair{std::exp(z), std::exp(2.0 * z)}; });
  const auto e = fit_invariant_curve(expo, 2, 1);
  CHECK(e.fit_residual < 1e-8);
  CHECK(same_curve(e.coeffs, parabola, 1e-8));

  Stream rng(4, 0);
  std::vector<std::pair<Cx, Cx>> noise;
  for (int i = 0; i < 200; ++i) {
    auto disk = [&] { return std::polar(std::sqrt(rng.uniform()), 6.283185307179586 * rng.uniform()); };
    noise.emplace_back(disk(), disk());
  }
  CHECK(fit_invariant_curve(noise, 2, 2).fit_residual > 1e-3);

  // y = x^2 satisfies every multiple: at bidegree (4, 2) the null space has dimension > 1
  CHECK_THROWS_AS(fit_invariant_curve(on, 4, 2), NumericError);
  CHECK_THROWS_AS(fit_invariant_curve(std::vector(on.begin(), on.begin() + 10), 2, 1), PreconditionError);

  const auto sweep = sweep_invariant_curve(on);
  REQUIRE(sweep.curve);
  CHECK(sweep.curve->m == 2);
  CHECK(sweep.curve->n == 1);
}

TEST_CASE("curve fitting is equivariant under rescaling", "[correspondence][property]") {
  const auto base = disk_samples(200, [](Cx z) { return std::pair{z, z * z * z - z}; });
  for (double s : {1e-2, 0.5, 3.0, 40.0}) {
    std::vector<std::pair<Cx, Cx>> scaled;
    for (auto [x, y] : base) scaled.emplace_back(s * x, y / s);
    const auto c = fit_invariant_curve(scaled, 3, 1);
    CHECK(c.fit_residual < 1e-8);
    // the rescaled samples lie on the recovered variety
    for (auto [x, y] : scaled) CHECK(c.normalized_eval(x, y) < 1e-9);
  }
}

TEST_CASE("invariance of curves", "[correspondence]") {
  const auto on = disk_samples(200, [](Cx z) { return std::pair{z, z * z}; });
  auto c = fit_invariant_curve(on, 2, 1);
  const auto z2 = poly({0, 0, 1});
  CHECK(curve_invariance_check(c, z2, 1, poly({0, 0, 0, 0, 1}), 1, on) > 1e-2);  // (x^2, y^4) leaves y = x^2
  CHECK(curve_invariance_check(c, z2, 1, z2, 1, on) < 1e-8);
  REQUIRE(c.invariance_residual);
  CHECK(curve_invariance_check(c, poly({1, 0, 1}), 1, z2, 1, on) > 1e-2);

  const auto g = poly({-1, 0, 1});
  auto graph = iterate_graph_curve(g, 2, 1);
  // points on f^2(x) = f(y): pick x, solve y^2 - 1 = f^2(x) for y
  std::vector<std::pair<Cx, Cx>> pts;
  for (int k = 0; k < 50; ++k) {
    const Cx x = std::polar(0.3 + 0.01 * k, 0.5 * k);
    const Cx fx = x * x - 1.0, f2x = fx * fx - 1.0;
    pts.emplace_back(x, std::sqrt(f2x + 1.0));
  }
  CHECK(curve_invariance_check(graph, g, 1, g, 1, pts) < 1e-8);
}

TEST_CASE("graph curves of iterates", "[correspondence]") {
  const auto z2 = poly({0, 0, 1});
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3, 2);
  a(2, 0) = 1.0;
  a(0, 1) = -1.0;
  const auto c10 = iterate_graph_curve(z2, 1, 0);
  CHECK(same_curve(c10.coeffs, a, 1e-15));
  CHECK(c10.fit_residual == 0.0);
  CHECK(c10.possibly_reducible);

  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(3, 3);
  b(2, 0) = 1.0;
  b(0, 2) = -1.0;
  CHECK(same_curve(iterate_graph_curve(z2, 1, 1).coeffs, b, 1e-15));

  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(3, 2);
  c(2, 0) = 1.0;
  c(0, 0) = -1.0;
  c(0, 1) = -1.0;
  CHECK(same_curve(iterate_graph_curve(poly({-1, 0, 1}), 1, 0).coeffs, c, 1e-15));
  CHECK_THROWS_AS(iterate_graph_curve(z2, 10, 0), PreconditionError);
}

TEST_CASE("pipeline on z^2 and z^4", "[correspondence]") {
  CorrespondenceOptions opt;
  opt.beta = 2.0;
  const auto rep = analyze_correspondence(poly({0, 0, 1}), Cx{1.0}, poly({0, 0, 0, 0, 1}), Cx{1.0}, opt);
  REQUIRE_FALSE(rep.relations.empty());
  CHECK(rep.relations[0].a == 2);
  CHECK(rep.relations[0].b == 1);
  CHECK(rep.relations[0].ell == 1);
  CHECK(rep.relations[0].primitive);
  CHECK(rep.relations[0].defect < 1e-12);
  CHECK(rep.degree_checks[0].holds);
  REQUIRE(rep.curve);
  Eigen::MatrixXcd parabola = Eigen::MatrixXcd::Zero(3, 2);
  parabola(0, 1) = 1.0;
  parabola(2, 0) = -1.0;
  CHECK(same_curve(rep.curve->coeffs, parabola, 1e-8));
  CHECK(rep.curve->fit_residual < 1e-8);
  REQUIRE(rep.curve->invariance_residual);
  CHECK(*rep.curve->invariance_residual < 1e-8);

  // with beta = 1 the linearizer graph is the diagonal y = x
  const auto diag = analyze_correspondence(poly({0, 0, 1}), Cx{1.0}, poly({0, 0, 0, 0, 1}), Cx{1.0});
  REQUIRE(diag.curve);
  CHECK(diag.curve->m == 1);
  CHECK(diag.curve->n == 1);
}
