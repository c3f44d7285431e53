#include "doctest.h"

#include "splineglue/collar.hpp"
#include "splineglue/errors.hpp"
#include "support.hpp"

using namespace splineglue;
using testing::Rng;

TEST_CASE("profile jets agree with central differences") {
  const std::vector<Profile> profiles{
      Profile::constant(1.5),
      Profile::polynomial({1.0, -0.5, 0.25, 2.0}),
      Profile::sine(0.7, 1.3, 0.4),
      Profile::cosh(1.1, 0.8, -0.2),
      Profile::exponential(0.9, -1.7),
  };
  Rng rng(11);
  for (const Profile& p : profiles) {
    for (int i = 0; i < 50; ++i) {
      const double t = rng.uniform(-1.0, 1.0);
      const Jet1D j = p(t);
      CHECK(j.d1 == doctest::Approx(testing::central_difference([&](double s) { return p(s).value; }, t))
                        .epsilon(1e-7));
      CHECK(j.d2 == doctest::Approx(testing::central_difference([&](double s) { return p(s).d1; }, t))
                        .epsilon(1e-7));
    }
  }
}

TEST_CASE("reflected and squared profiles") {
  const Profile p = Profile::sine(1.0, 1.0, 0.3);
  const Profile r = p.reflected();
  const Profile q = p.squared();
  for (double t : {-0.4, 0.0, 0.25}) {
    CHECK(r(t).value == doctest::Approx(p(-t).value));
    CHECK(r(t).d1 == doctest::Approx(-p(-t).d1));
    CHECK(r(t).d2 == doctest::Approx(p(-t).d2));
    CHECK(q(t).value == doctest::Approx(std::pow(std::sin(t + 0.3), 2)));
    CHECK(q(t).d1 == doctest::Approx(std::sin(2.0 * (t + 0.3))));
  }
}

TEST_CASE("warped product is phi^2 times the round form in polar coordinates") {
  const CollarMetric c = make_warped_product(Profile::cosh(1.0, 1.0, 0.0), 4, {-0.5, 0.0});
  REQUIRE(c.slice_dim() == 3);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec x = rng.inside(c.cross_section());
    const double t = rng.uniform(-0.5, 0.0);
    const double phi2 = std::pow(std::cosh(t), 2);
    const double s0 = std::pow(std::sin(x(0)), 2);
    const double s1 = std::pow(std::sin(x(1)), 2);
    const Mat h = c.value(x, t);
    CHECK(h(0, 0) == doctest::Approx(phi2));
    CHECK(h(1, 1) == doctest::Approx(phi2 * s0));
    CHECK(h(2, 2) == doctest::Approx(phi2 * s0 * s1));
    CHECK(std::abs(h(0, 1)) + std::abs(h(1, 2)) + std::abs(h(0, 2)) == 0.0);
    CHECK(c.d1(x, t)(1, 1) == doctest::Approx(std::sinh(2.0 * t) * s0));
  }
}

TEST_CASE("collar x-derivatives agree with central differences") {
  const CollarMetric c = testing::round_cap();
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const Vec x = rng.inside(c.cross_section());
    const double t = rng.uniform(-0.8, 0.0);
    const CollarJet j = c.jet(x, t);
    for (int a = 0; a < c.slice_dim(); ++a) {
      Vec xp = x, xm = x;
      xp(a) += 1e-6;
      xm(a) -= 1e-6;
      const Mat fd = (c.value(xp, t) - c.value(xm, t)) / 2e-6;
      CHECK(max_abs(fd - j.dx[a]) < 1e-8);
      const Mat fdt = (c.d1(xp, t) - c.d1(xm, t)) / 2e-6;
      CHECK(max_abs(fdt - j.dxt[a]) < 1e-8);
    }
  }
}

TEST_CASE("mirror collar reflects t") {
  const CollarMetric c = testing::round_cap();
  const CollarMetric m = mirror_collar(c);
  CHECK(m.side() == Side::Upper);
  CHECK(m.interval().lo == doctest::Approx(0.0));
  CHECK(m.interval().hi == doctest::Approx(-c.interval().lo));
  const Vec x = c.cross_section().grid(2).front();
  for (double t : {0.0, 0.1, 0.7}) {
    CHECK(max_abs(m.value(x, t) - c.value(x, -t)) == 0.0);
    CHECK(max_abs(m.d1(x, t) + c.d1(x, -t)) == 0.0);
    CHECK(max_abs(m.d2(x, t) - c.d2(x, -t)) == 0.0);
  }
}

TEST_CASE("diagonal torus collar") {
  const CollarMetric c =
      make_diagonal_torus({Profile::exponential(1.0, 0.5), Profile::constant(2.0)}, {0.0, 1.0});
  const Vec x = Vec::Constant(2, 0.3);
  const Mat h = c.value(x, 0.4);
  CHECK(h(0, 0) == doctest::Approx(std::exp(0.4)));
  CHECK(h(1, 1) == doctest::Approx(4.0));
  CHECK(c.cross_section().periodic(0));
  CHECK(c.side() == Side::Upper);
}

TEST_CASE("collar constructors reject bad input") {
  CHECK_THROWS_AS(make_warped_product(Profile::constant(1.0), 2, {-1.0, 0.0}), Error);
  CHECK_THROWS_AS(make_warped_product(Profile::constant(-1.0), 4, {-1.0, 0.0}), Error);
  CHECK_THROWS_AS(make_warped_product(Profile::constant(1.0), 4, {-1.0, 1.0}), Error);
  CHECK_THROWS_AS(make_diagonal_torus({}, {0.0, 1.0}), Error);
}
