#include "doctest.h"

#include <cmath>

#include "splineglue/errors.hpp"
#include "splineglue/sampling.hpp"
#include "splineglue/smoothing.hpp"
#include "support.hpp"

using namespace splineglue;

namespace {

PiecewiseC1Scalar piecewise(Profile left, Profile right) {
  PiecewiseC1Scalar h{std::move(left), std::move(right)};
  h.junction = 0.0;
  return h;
}

struct BandStats {
  double c1 = 0.0;
  double d2_lo = INFINITY;
  double d2_hi = -INFINITY;
};

BandStats scan(const MollifiedScalar& m, double nu, int nodes = 4001) {
  BandStats s;
  for (double t : linspace(-nu, nu, nodes)) {
    const Jet1D out = m(t);
    const Jet1D in = m.original()(t);
    s.c1 = std::max({s.c1, std::abs(out.value - in.value), std::abs(out.d1 - in.d1)});
    s.d2_lo = std::min(s.d2_lo, out.d2);
    s.d2_hi = std::max(s.d2_hi, out.d2);
  }
  return s;
}

}  // namespace

TEST_CASE("bump density is normalized and the rule integrates it") {
  double sum = 0.0;
  for (const auto& [u, w] : bump_rule(2.0, 4)) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  double split_sum = 0.0;
  for (const auto& [u, w] : bump_rule(0.3, 4)) split_sum += w;
  CHECK(split_sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bump_density(1.0) == 0.0);
  CHECK(bump_density(0.0) > bump_density(0.5));
}

TEST_CASE("cutoff is 1 inside nu/2, 0 outside nu, and smooth") {
  const double nu = 0.1;
  CHECK(band_cutoff(0.0, nu).value == 1.0);
  CHECK(band_cutoff(0.05, nu).value == doctest::Approx(1.0));
  CHECK(band_cutoff(0.1, nu).value == doctest::Approx(0.0));
  CHECK(band_cutoff(-0.2, nu).value == 0.0);
  for (double s : {0.055, 0.07, 0.09}) {
    const double fd = testing::central_difference([&](double u) { return band_cutoff(u, nu).value; }, s, 1e-7);
    CHECK(band_cutoff(s, nu).d1 == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("canonical instance: f = 0, g = t^2") {
  const MollifiedScalar m = mollify_c1(piecewise(Profile::constant(0.0), Profile::polynomial({0, 0, 1})), 0.1, 0.01);
  const BandStats s = scan(m, 0.1);
  CHECK(s.c1 <= 0.01);
  CHECK(s.d2_lo >= -0.01);
  CHECK(s.d2_hi <= 2.01);
  CHECK(m.report().c1_distance <= 0.01);
  CHECK(m.report().interval_ok);
  CHECK(m.report().quadrature_change < 1e-10);
}

TEST_CASE("smooth input is left unchanged") {
  const Profile f = Profile::sine(1.0, 2.0, 0.3);
  const MollifiedScalar m = mollify_c1(piecewise(f, f), 0.1, 0.01);
  for (double t : linspace(-0.1, 0.1, 201)) {
    const Jet1D a = m(t), b = f(t);
    CHECK(std::abs(a.value - b.value) <= 1e-12);
    CHECK(std::abs(a.d1 - b.d1) <= 1e-12);
  }
}

TEST_CASE("C^2 junction keeps the second derivative inside the endpoint interval") {
  const double nu = 0.1, mu = 0.01;
  const MollifiedScalar m =
      mollify_c1(piecewise(Profile::polynomial({0, 0, 1}), Profile::polynomial({0, 0, 1, 1})), nu, mu);
  const BandStats s = scan(m, nu);
  CHECK(s.c1 <= mu);
  CHECK(s.d2_lo >= 2.0 - mu);
  CHECK(s.d2_hi <= 2.0 + 6.0 * nu + mu);
}

TEST_CASE("output second derivative is continuous across the kink and the cutoff edges") {
  const double nu = 0.1;
  const MollifiedScalar m = mollify_c1(piecewise(Profile::constant(0.0), Profile::polynomial({0, 0, 1})), nu, 0.01);
  // The input jumps by 2 at 0; a C^2 output cannot jump anywhere.
  for (double t : {0.0, -nu / 2, nu / 2, -nu, nu}) {
    CHECK(std::abs(m(t + 1e-9).d2 - m(t - 1e-9).d2) < 1e-4);
  }
  const double rho = m.report().radius;
  CHECK(rho > 0.0);
  CHECK(rho <= nu / 4);
}

TEST_CASE("mollifier contracts") {
  PiecewiseC1Scalar kinked = piecewise(Profile::constant(0.0), Profile::polynomial({0, 1}));
  CHECK_THROWS_AS(mollify_c1(kinked, 0.1, 0.01), Error);
  PiecewiseC1Scalar narrow = piecewise(Profile::constant(0.0), Profile::polynomial({0, 0, 1}));
  narrow.domain = {-0.05, 0.05};
  try {
    mollify_c1(narrow, 0.1, 0.01);
    FAIL("band outside the domain accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BandTooWide);
  }
}

TEST_CASE("smoothed glued metric of the cap double") {
  const CollarMetric cap = testing::round_cap();
  GluingParams p;
  p.eps = 0.2;
  p.iota = 0.4;
  p.nu = 0.05;
  p.mu = 0.01;
  const std::vector<Vec> xs = cap.cross_section().grid(2);
  const GluedChart c1 = assemble_glued(cap, mirror_collar(cap), p, xs);
  const SmoothedGlued s = smooth_glued(c1, p.nu, p.mu, xs);
  CHECK(s.report.c1_distance <= p.mu);
  CHECK(s.report.interval_ok);
  CHECK(s.chart.smoothed());
  CHECK(s.chart.smoothing_radius() == s.report.radius);
  CHECK(s.chart.regions().size() == 5);
  // Outside the bands the metric is untouched.
  const Vec x = xs[1];
  for (double t : {-0.5, -0.1, 0.0, 0.1, 0.5}) {
    CHECK(max_abs(s.chart.slice_jet(x, t).value - c1.slice_jet(x, t).value) == 0.0);
  }
  // Mirror symmetry survives smoothing.
  for (double t : linspace(0.0, 0.6, 61)) {
    CHECK(max_abs(s.chart.slice_jet(x, t).value - s.chart.slice_jet(x, -t).value) <= 1e-10);
  }
}
