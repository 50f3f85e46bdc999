#include <catch_amalgamated.hpp>

#include <holoscope/measures.hpp>
#include <holoscope/point_map.hpp>

#include "support/oracles.hpp"

using namespace holoscope;

namespace {

RationalMap poly(std::initializer_list<Cx> c) { return RationalMap::polynomial(Poly(c)); }

const RationalMap& z2() {
  static const RationalMap f = poly({0, 0, 1});
  return f;
}

const RationalMap& cheb() {
  static const RationalMap f = poly({-2, 0, 1});
  return f;
}

/// Angle histogram TV against a CDF in turns on [-1/2, 1/2] about arg(center).
template <class Cdf>
double angular_tv(const EmpiricalMeasure& mu, int bins, Cdf cdf) {
  std::vector<double> t;
  for (Cx z : mu.points) t.push_back(std::arg(z) / (2.0 * oracle::pi));
  return oracle::binned_tv_1d(t, -0.5, 0.5, bins, cdf);
}

std::vector<double> angles(const EmpiricalMeasure& mu) {
  std::vector<double> t;
  for (Cx z : mu.points) t.push_back(std::arg(z) / (2.0 * oracle::pi));
  return t;
}

const EmpiricalMeasure& z2_mmem() {
  static const auto mu = sample_mmem(z2(), 100000, 30, Cx{2.0}, 17);
  return mu;
}

}  // namespace

TEST_CASE("Green function values", "[measures]") {
  CHECK(std::abs(green_function(z2(), Cx{2.0}).value - std::log(2.0)) < 1e-12);
  const auto inside = green_function(z2(), Cx{0.5});
  CHECK(inside.value == 0.0);
  CHECK_FALSE(inside.escape_time.has_value());
  CHECK_FALSE(inside.converged);
  CHECK(std::abs(green_function(cheb(), Cx{3.0}).value - std::log((3.0 + std::sqrt(5.0)) / 2.0)) < 1e-12);
  CHECK(auto_escape_radius(z2()) == 2.0);
  CHECK(auto_escape_radius(cheb()) == 3.0);
  CHECK_THROWS_AS(green_function(RationalMap(Poly{0, 0, 1}, Poly{1, 1}), Cx{2.0}), PreconditionError);
}

TEST_CASE("Green function satisfies G(f(z)) = d G(z)", "[measures][property]") {
  Stream rng(3, 0);
  for (const auto& f : {z2(), cheb(), poly({Cx{-0.12, 0.75}, 0, 1}), poly({Cx{0.3}, Cx{-1.0}, 0, 1})}) {
    const int d = f.degree();
    int checked = 0;
    while (checked < 100) {
      const Cx z{6.0 * rng.uniform() - 3.0, 6.0 * rng.uniform() - 3.0};
      const auto g = green_function(f, z);
      if (!(g.value > 0.0)) continue;
      CHECK(std::abs(green_function(f, f.num()(z)).value - d * g.value) < 1e-8);
      ++checked;
    }
  }
}

TEST_CASE("orbit gradient of G matches central differences", "[measures]") {
  // z^2 - 2: G = log|w| with z = w + 1/w, |w| > 1
  for (Cx z : {Cx{3.0, 0.0}, Cx{0.0, 1.0}, Cx{-2.5, 0.7}, Cx{1.0, 0.2}}) {
    const auto gg = green_with_gradient(cheb(), z, 1000, 3.0);
    const double h = 1e-6 * (1.0 + std::abs(z));
    auto G = [&](Cx u) { return green_function(cheb(), u).value; };
    const double gx = (G(z + Cx{h, 0}) - G(z - Cx{h, 0})) / (2 * h);
    const double gy = (G(z + Cx{0, h}) - G(z - Cx{0, h})) / (2 * h);
    CHECK(std::abs(gg.value - G(z)) < 1e-14);
    CHECK(std::abs(gg.grad_norm - std::hypot(gx, gy)) < 1e-6 * std::hypot(gx, gy));
  }
}

TEST_CASE("inverse iteration on z^2 is uniform on the circle", "[measures][statistics]") {
  const auto& mu = z2_mmem();
  REQUIRE(mu.size() == 100000);
  CHECK(mu.provenance == Provenance::inverse_iteration);
  for (Cx z : mu.points) REQUIRE(std::abs(std::abs(z) - 1.0) < 1e-9);
  CHECK(oracle::ks_uniform(oracle::turns(mu.points)) < 0.01);
}

TEST_CASE("inverse iteration on z^2 - 2 has the arcsine marginal", "[measures][statistics]") {
  const auto mu = sample_mmem(cheb(), 100000, 30, Cx{0.3, 0.1}, 5);
  std::vector<double> xs;
  for (Cx z : mu.points) xs.push_back(z.real());
  CHECK(oracle::binned_tv_1d(xs, -2.0, 2.0, 64, oracle::arcsine_cdf) < 0.03);
}

TEST_CASE("inverse-iteration samples are invariant under f", "[measures][statistics]") {
  const auto mu = sample_mmem(cheb(), 100000, 30, Cx{0.3, 0.1}, 8);
  const auto image = pushforward_measure(as_point_map(cheb()), mu);
  // 64 bins along the segment [-2, 2]
  std::vector<double> a, b;
  for (Cx z : mu.points) a.push_back(z.real());
  for (Cx z : image.points) b.push_back(z.real());
  std::vector<double> ha(64), hb(64);
  for (double x : a) ha[static_cast<std::size_t>(std::clamp(static_cast<int>((x + 2.0) / 4.0 * 64), 0, 63))] += 1.0 / a.size();
  for (double x : b) hb[static_cast<std::size_t>(std::clamp(static_cast<int>((x + 2.0) / 4.0 * 64), 0, 63))] += 1.0 / b.size();
  double tv = 0.0;
  for (int k = 0; k < 64; ++k) tv += 0.5 * std::abs(ha[static_cast<std::size_t>(k)] - hb[static_cast<std::size_t>(k)]);
  CHECK(tv < 0.02);
  // and on the circle for z^2
  const auto circ = pushforward_measure(as_point_map(z2()), z2_mmem());
  CHECK(oracle::binned_tv_1d(angles(circ), -0.5, 0.5, 64, [](double t) { return t + 0.5; }) < 0.02);
}

TEST_CASE("inverse iteration is seed deterministic and rejects exceptional points", "[measures]") {
  const auto a = sample_mmem(cheb(), 2000, 25, Cx{0.3, 0.1}, 99);
  const auto b = sample_mmem(cheb(), 2000, 25, Cx{0.3, 0.1}, 99);
  const auto c = sample_mmem(cheb(), 2000, 25, Cx{0.3, 0.1}, 100);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
  CHECK(a.seed == 99);
  CHECK_THROWS_AS(sample_mmem(z2(), 10, 25, Cx{0.0}, 1), PreconditionError);
  CHECK_THROWS_AS(sample_mmem(z2(), 10, 25, SpherePoint::infinity(), 1), PreconditionError);
  CHECK_THROWS_AS(sample_mmem(z2(), 10, 19, Cx{2.0}, 1), PreconditionError);
  CHECK_FALSE(is_exceptional(cheb(), Cx{0.0}));
  CHECK(is_exceptional(cheb(), SpherePoint::infinity()));
}

TEST_CASE("walk-on-spheres from z = 2 follows the exterior Poisson kernel", "[measures][statistics]") {
  const auto mu = brownian_exit_measure(z2(), Cx{2.0}, 100000, 1e-3, 23);
  CHECK(mu.provenance == Provenance::brownian_exit);
  CHECK(mu.size() + mu.dropped == 100000);
  for (Cx z : mu.points) REQUIRE(std::abs(z) > 1.0);
  CHECK(angular_tv(mu, 64, [](double t) { return oracle::exterior_poisson_cdf(2.0, t); }) < 0.05);
}

TEST_CASE("walk-on-spheres from far away is near uniform and stable in eps", "[measures][statistics]") {
  const auto a = brownian_exit_measure(z2(), Cx{1000.0}, 100000, 1e-3, 29);
  CHECK(angular_tv(a, 64, [](double t) { return t + 0.5; }) < 0.05);
  const auto b = brownian_exit_measure(z2(), Cx{1000.0}, 100000, 0.5e-3, 31);
  std::vector<double> ta = angles(a), tb = angles(b);
  std::vector<double> ha(64), hb(64);
  for (double t : ta) ha[static_cast<std::size_t>(std::clamp(static_cast<int>((t + 0.5) * 64), 0, 63))] += 1.0 / ta.size();
  for (double t : tb) hb[static_cast<std::size_t>(std::clamp(static_cast<int>((t + 0.5) * 64), 0, 63))] += 1.0 / tb.size();
  double tv = 0.0;
  for (int k = 0; k < 64; ++k) tv += 0.5 * std::abs(ha[static_cast<std::size_t>(k)] - hb[static_cast<std::size_t>(k)]);
  CHECK(tv < 0.05);
  CHECK_THROWS_AS(brownian_exit_measure(z2(), Cx{0.5}, 10, 1e-3, 1), PreconditionError);
}

TEST_CASE("measure comparison", "[measures]") {
  const auto& mu = z2_mmem();
  const Window box{-1.2, 1.2, -1.2, 1.2};
  const auto same = measure_compare(mu, mu, box, 64);
  CHECK(same.tv_distance == 0.0);
  CHECK(same.ratio_low == 1.0);
  CHECK(same.ratio_high == 1.0);

  const auto other = sample_mmem(z2(), 100000, 30, Cx{2.0}, 18);
  const auto ab = measure_compare(mu, other, box, 64);
  const auto ba = measure_compare(other, mu, box, 64);
  CHECK(ab.tv_distance == ba.tv_distance);
  CHECK(std::abs(ab.ratio_low - 1.0 / ba.ratio_high) < 1e-12);
  CHECK(std::abs(ab.ratio_high - 1.0 / ba.ratio_low) < 1e-12);
  CHECK(ab.ratio_low <= 1.0);
  CHECK(ab.ratio_high >= 1.0);

  const auto walks = brownian_exit_measure(z2(), Cx{1000.0}, 100000, 1e-3, 37);
  CHECK(measure_compare(mu, walks, box, 64).tv_distance < 0.08);
  // Bins holding about ten samples swing by a factor 2 between independent
  // draws of one law, so the ratio bound is checked on a coarser grid.
  const auto hm = measure_compare(mu, walks, box, 16);
  CHECK(hm.ratio_high / hm.ratio_low < 2.0);

  // the arcsine law carried onto the circle by x -> exp(i pi x / 2) is not uniform
  const auto cheb_mu = sample_mmem(cheb(), 100000, 30, Cx{0.3, 0.1}, 41);
  const PointMap wrap = [](const SpherePoint& z) -> std::optional<SpherePoint> {
    return SpherePoint(std::polar(1.0, oracle::pi * z.finite().real() / 2.0));
  };
  const auto arcsine_circle = pushforward_measure(wrap, cheb_mu);
  const auto neg = measure_compare(mu, arcsine_circle, box, 16);
  CHECK(neg.ratio_high / neg.ratio_low > 3.0);

  CHECK_THROWS_AS(measure_compare(mu, mu, Window{5, 6, 5, 6}, 8), PreconditionError);
}

TEST_CASE("pushforward examples", "[measures]") {
  const auto& mu = z2_mmem();
  const PointMap id = [](const SpherePoint& z) -> std::optional<SpherePoint> { return z; };
  const auto same = pushforward_measure(id, mu);
  CHECK(same.points == mu.points);
  CHECK(same.weights == mu.weights);
  CHECK(same.provenance == Provenance::pushforward);

  const auto doubled = pushforward_measure(as_point_map(z2()), mu);
  CHECK(oracle::ks_uniform(oracle::turns(doubled.points)) < 0.01);

  const PointMap shift = [](const SpherePoint& z) -> std::optional<SpherePoint> { return SpherePoint(z.finite() + 1.0); };
  const auto moved = pushforward_measure(shift, mu);
  std::vector<Cx> centred;
  for (Cx z : moved.points) {
    REQUIRE(std::abs(std::abs(z - 1.0) - 1.0) < 1e-9);
    centred.push_back(z - 1.0);
  }
  CHECK(oracle::ks_uniform(oracle::turns(centred)) < 0.01);

  const PointMap partial = [](const SpherePoint& z) -> std::optional<SpherePoint> {
    if (z.finite().imag() > 0.9) return std::nullopt;
    return z;
  };
  CHECK_THROWS_AS(pushforward_measure(partial, mu), NumericError);
}

TEST_CASE("empirical measure validation", "[measures]") {
  auto m = EmpiricalMeasure::uniform({Cx{0.0}, Cx{1.0}}, 1, Provenance::external);
  CHECK_NOTHROW(m.validate());
  m.weights[0] = 0.7;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.normalize();
  CHECK_NOTHROW(m.validate());
}
