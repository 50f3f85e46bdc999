#include <catch_amalgamated.hpp>

#include <holoscope/io.hpp>
#include <holoscope/random.hpp>
#include <holoscope/rational_map.hpp>
#include <holoscope/roots.hpp>

using namespace holoscope;
using Catch::Matchers::WithinAbs;

namespace {

RationalMap poly(std::initializer_list<Cx> c) { return RationalMap::polynomial(Poly(c)); }

bool same_point(const SpherePoint& a, const SpherePoint& b, double tol) { return chordal(a, b) < tol; }

RationalMap random_map(Stream& rng, int deg_num, int deg_den) {
  auto coeffs = [&](int d) {
    std::vector<Cx> c;
    for (int k = 0; k <= d; ++k) c.emplace_back(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    return Poly(std::move(c));
  };
  return RationalMap(coeffs(deg_num), coeffs(deg_den));
}

}  // namespace

TEST_CASE("eval of z^2 at finite points, infinity and poles", "[core]") {
  const auto sq = poly({0, 0, 1});
  CHECK(same_point(eval(sq, Cx{2.0}), Cx{4.0}, 1e-15));
  CHECK(eval(sq, SpherePoint::infinity()).is_infinity());
  const RationalMap g(Poly{1, 0, 1}, Poly{-1, 0, 1});
  CHECK(eval(g, Cx{1.0}).is_infinity());
  CHECK(eval(g, Cx{-1.0}).is_infinity());
  CHECK(same_point(eval(g, SpherePoint::infinity()), Cx{1.0}, 1e-15));
}

TEST_CASE("derivatives in both charts", "[core]") {
  CHECK(std::abs(derivative(poly({0, 0, 1}), Cx{1.0}) - 2.0) < 1e-15);
  CHECK(std::abs(derivative(poly({-2, 0, 1}), Cx{2.0}) - 4.0) < 1e-15);
  CHECK(std::abs(derivative(poly({0, 0, 0, 1}), SpherePoint::infinity())) < 1e-15);
  // z -> 2z fixes infinity with multiplier 1/2 in the reciprocal chart.
  const RationalMap lin2 = RationalMap::unchecked(Poly{0, 2}, Poly{1});
  CHECK(std::abs(derivative(lin2, SpherePoint::infinity()) - 0.5) < 1e-15);
}

TEST_CASE("iterate", "[core]") {
  const auto sq = poly({0, 0, 1});
  CHECK(same_point(iterate(sq, Cx{2.0}, 3), Cx{256.0}, 1e-15));
  CHECK(chordal(iterate(sq, Cx{0.3, 0.4}, 0), Cx{0.3, 0.4}) == 0.0);
  CHECK(same_point(iterate(poly({-1, 0, 1}), Cx{0.0}, 2), Cx{0.0}, 1e-15));
  // Orbits past the double range stay representable through the reciprocal chart.
  CHECK(chordal(iterate(sq, Cx{2.0}, 40), SpherePoint::infinity()) < 1e-300);
}

TEST_CASE("compose", "[core]") {
  const auto sq = poly({0, 0, 1});
  const auto z4 = compose(sq, sq);
  CHECK(z4.degree() == 4);
  CHECK(z4.num().degree() == 4);
  CHECK(std::abs(z4.num()[4] - 1.0) < 1e-15);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(z4.num()[k]) < 1e-15);

  const auto cheb = compose(poly({-2, 0, 1}), poly({-2, 0, 1}));
  const Cx expect[] = {2, 0, -4, 0, 1};
  for (int k = 0; k <= 4; ++k) CHECK(std::abs(cheb.num()[k] - expect[k]) < 1e-14);

  const RationalMap g(Poly{1, 0, 1}, Poly{-1, 0, 1});
  const auto gi = compose(g, RationalMap::identity());
  for (double x : {0.1, 0.7, 3.0}) CHECK(same_point(eval(gi, Cx{x, 0.2}), eval(g, Cx{x, 0.2}), 1e-14));
}

TEST_CASE("compose agrees with nested evaluation and multiplies degrees", "[core][property]") {
  Stream rng(42, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int a = 1 + rng.below(2), b = 1 + rng.below(2);
    const auto f = random_map(rng, 1 + rng.below(2), a);
    const auto g = random_map(rng, 2, b);
    const auto fg = compose(f, g);
    CHECK(fg.degree() == f.degree() * g.degree());
    for (int i = 0; i < 100; ++i) {
      const Cx z{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
      CHECK(chordal(eval(fg, z), eval(f, eval(g, z))) < 1e-9);
    }
  }
}

TEST_CASE("evaluation is chart independent on the overlap", "[core][property]") {
  Stream rng(7, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_map(rng, 3, 2);
    for (int i = 0; i < 50; ++i) {
      const Cx z = std::polar(0.5 + 1.5 * rng.uniform(), 6.283185307179586 * rng.uniform());
      const SpherePoint s = SpherePoint::in_chart(Chart::standard, z);
      const SpherePoint r = SpherePoint::in_chart(Chart::reciprocal, 1.0 / z);
      CHECK(chordal(eval_in_chart(f, s, Chart::standard), eval_in_chart(f, r, Chart::reciprocal)) < 1e-12);
    }
  }
}

TEST_CASE("sphere points keep bounded representatives", "[core]") {
  const SpherePoint big(Cx{1e6, 0.0});
  CHECK(big.chart() == Chart::reciprocal);
  CHECK(std::abs(big.value()) <= 2.0);
  CHECK(SpherePoint(Cx{1.5}).chart() == Chart::standard);
  CHECK(SpherePoint(std::numeric_limits<double>::infinity()).is_infinity());
  CHECK_THROWS_AS(SpherePoint(Cx{std::nan(""), 0.0}), NumericError);
  CHECK_THAT(chordal(Cx{0.0}, Cx{1.0}), WithinAbs(std::sqrt(0.5), 1e-15));
  CHECK_THAT(chordal(SpherePoint(Cx{0.0}), SpherePoint::infinity()), WithinAbs(1.0, 1e-15));
}

TEST_CASE("construction rejects common factors and degree 0", "[core]") {
  CHECK_THROWS_AS(RationalMap(Poly{-1, 0, 1}, Poly{-1, 1}), ConfigError);  // (z-1)(z+1)/(z-1)
  CHECK_THROWS_AS(RationalMap(Poly{3}, Poly{1}), ConfigError);
  CHECK_NOTHROW(RationalMap(Poly{1, 0, 1}, Poly{-1, 0, 1}));
}

TEST_CASE("indeterminate point is reported", "[core]") {
  const RationalMap u = RationalMap::unchecked(Poly{0, 1}, Poly{0, 1, 1});
  CHECK_THROWS_AS(eval(u, Cx{0.0}), PreconditionError);
}

TEST_CASE("Aberth roots recover a known factorization", "[core][roots]") {
  std::vector<Cx> roots = {Cx{1, 0}, Cx{-2, 1}, Cx{0.5, -0.5}, Cx{3, 3}, Cx{0, 0}};
  Poly p{1};
  for (Cx r : roots) p = p * Poly{-r, 1};
  const auto sol = aberth_roots(p);
  REQUIRE(sol.roots.size() == roots.size());
  for (Cx r : roots) {
    double best = 1e9;
    for (Cx s : sol.roots) best = std::min(best, std::abs(s - r));
    CHECK(best < 1e-10);
  }
  const auto [a, b] = quadratic_roots(1.0, -1.0, -1.0);
  CHECK(std::abs(a * b + 1.0) < 1e-14);
  CHECK(std::abs(a + b - 1.0) < 1e-14);
}

TEST_CASE("map files", "[core][io]") {
  const auto f = io::parse_map("# Chebyshev\nnum = [-2, 0, [1, 0]]\n");
  CHECK(f.degree() == 2);
  CHECK(std::abs(f.num()[0] + 2.0) < 1e-15);
  const auto g = io::parse_map("num = [1, 0, 1]\nden = [-1, 0, 1]\n");
  CHECK(!g.is_polynomial());
  try {
    io::parse_map("num = [1, 0, 1]\nden = [oops]\n", "bad.map");
    FAIL("malformed map accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'den'") != std::string::npos);
  }
  try {
    io::parse_map("num = [1, [2, 3, 4]]\n", "bad.map");
    FAIL("malformed map accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'num'") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_map("den = [1]\n"), ConfigError);
  CHECK_THROWS_AS(io::parse_map("num = [0, 0, 1]\nnom = [1]\n"), ConfigError);
}
