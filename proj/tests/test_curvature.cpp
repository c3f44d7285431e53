#include "doctest.h"

#include <algorithm>

#include "splineglue/chart.hpp"
#include "splineglue/curvature.hpp"
#include "splineglue/errors.hpp"
#include "splineglue/sampling.hpp"
#include "support.hpp"

using namespace splineglue;
using testing::Rng;

namespace {

Point random_point(Rng& rng, const Chart& chart) {
  const Domain& d = chart.domain();
  Vec c(d.dim());
  for (int i = 0; i < d.dim(); ++i) {
    const double pad = 0.1 * (d.hi(i) - d.lo(i));
    c(i) = rng.uniform(d.lo(i) + pad, d.hi(i) - pad);
  }
  return Point::from_coords(c);
}

// Warped product dt^2 + phi^2 ds^2: K(dt, u) = -phi''/phi, K(u, v) = (1 - phi'^2)/phi^2.
void check_warped(const Profile& phi, Interval iv, std::uint64_t seed) {
  const CollarChart chart = collar_chart(make_warped_product(phi, 4, iv));
  Rng rng(seed);
  for (int i = 0; i < 20; ++i) {
    const Point p = random_point(rng, chart);
    const Jet1D f = phi(p.t);
    const CurvatureAtPoint c = curvature_at(chart, p);
    Vec dt = Vec::Zero(4);
    dt(3) = 1.0;
    Vec u = rng.gaussian(4), v = rng.gaussian(4);
    u(3) = 0.0;
    v(3) = 0.0;
    CHECK(sectional(c, u, dt) == doctest::Approx(-f.d2 / f.value).epsilon(1e-9));
    CHECK(sectional(c, u, v) == doctest::Approx((1.0 - f.d1 * f.d1) / (f.value * f.value)).epsilon(1e-9));
  }
}

}  // namespace

TEST_CASE("unit sphere has K = 1 and Ric = (n-1) g") {
  const CollarChart chart = round_sphere_chart(4);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Point p = random_point(rng, chart);
    const CurvatureAtPoint c = curvature_at(chart, p);
    const Vec u = rng.gaussian(4), v = rng.gaussian(4);
    CHECK(sectional(c, u, v) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(max_abs(c.ricci - 3.0 * c.g) < 1e-10);
    CHECK(riemann_residuals(c.riemann).max() < 1e-12);
  }
}

TEST_CASE("flat torus is flat") {
  const CollarChart chart = flat_torus_chart(3);
  const CurvatureAtPoint c = curvature_at(chart, Point::from_coords(Vec::Constant(3, 0.37)));
  CHECK(c.riemann.max_abs() == 0.0);
}

TEST_CASE("exponential torus collar has K = -lambda^2") {
  const double lambda = 0.5;
  const CollarChart chart = collar_chart(
      make_diagonal_torus(testing::repeated(Profile::exponential(1.0, lambda), 3), {-1.0, 0.0}));
  Rng rng(2);
  for (int i = 0; i < 30; ++i) {
    const Point p = random_point(rng, chart);
    const CurvatureAtPoint c = curvature_at(chart, p);
    CHECK(sectional(c, rng.gaussian(4), rng.gaussian(4)) == doctest::Approx(-lambda * lambda).epsilon(1e-10));
  }
}

TEST_CASE("warped product curvatures match the closed form") {
  check_warped(Profile::sine(1.0, 1.0, testing::kCapRadius), {-0.9, 0.0}, 7);
  check_warped(Profile::cosh(1.0, 1.0, 0.0), {-0.5, 0.0}, 8);
  check_warped(Profile::polynomial({1.0, 0.25}), {-1.0, 0.0}, 9);
}

TEST_CASE("cone collar Ricci: Ric(dt) = 0 and Ric_{n-1} = (n-2)(1 - phi'^2)/phi^2") {
  const Profile phi = Profile::polynomial({1.0, 0.25});
  const CollarChart chart = collar_chart(make_warped_product(phi, 4, {-1.0, 0.0}));
  Rng rng(4);
  SamplingPlan plan;
  for (int i = 0; i < 10; ++i) {
    const Point p = random_point(rng, chart);
    const CurvatureAtPoint c = curvature_at(chart, p);
    const Jet1D f = phi(p.t);
    const double tangential = 2.0 * (1.0 - f.d1 * f.d1) / (f.value * f.value);
    const Vec eig = ricci_eigenvalues(c);
    CHECK(eig(0) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    for (int j = 1; j < 4; ++j) CHECK(eig(j) == doctest::Approx(tangential).epsilon(1e-10));
    // Ric_3 in direction dt is exactly Ric(dt, dt) = 0, the minimum.
    CHECK(ric_k_at(c, 3, plan).value == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("Ric_k and Sc_k on the sphere") {
  const CollarChart chart = round_sphere_chart(4);
  const CurvatureAtPoint c = curvature_at(chart, Point::from_coords(Vec::Constant(4, 1.0)));
  SamplingPlan plan;
  for (int k = 1; k <= 3; ++k) CHECK(ric_k_at(c, k, plan).value == doctest::Approx(k).epsilon(1e-10));
  CHECK(sc_k_at(c, 2) == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("Jacobi operator is symmetric with trace Ric(v, v)") {
  const CollarChart chart = collar_chart(testing::round_cap());
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const Point p = random_point(rng, chart);
    const CurvatureAtPoint c = curvature_at(chart, p);
    Vec v = rng.gaussian(4);
    v /= std::sqrt(v.dot(c.g * v));
    const Mat j = jacobi_operator(c, v);
    CHECK(asymmetry(j) < 1e-12);
    CHECK(j.trace() == doctest::Approx(v.dot(c.ricci * v)).epsilon(1e-10));
  }
}

TEST_CASE("k-positive sum is the sum of the k smallest eigenvalues") {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const Mat a = rng.symmetric(5);
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    for (int k = 1; k <= 5; ++k) {
      CHECK(k_positive_sum(a, k) == doctest::Approx(es.eigenvalues().head(k).sum()).epsilon(1e-12));
    }
  }
  Mat bad = Mat::Identity(3, 3);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(ascending_eigenvalues(bad), Error);
}

TEST_CASE("finite-difference view reproduces analytic curvature") {
  const CollarChart chart = collar_chart(testing::round_cap());
  const MetricOnlyChart fd = finite_difference_view(chart);
  Rng rng(10);
  for (int i = 0; i < 10; ++i) {
    const Point p = random_point(rng, chart);
    const Vec u = rng.gaussian(4), v = rng.gaussian(4);
    CHECK(std::abs(sectional(fd, p, u, v) - sectional(chart, p, u, v)) < 1e-6);
  }
}

TEST_CASE("sectional curvature rejects degenerate planes") {
  const CollarChart chart = round_sphere_chart(3);
  const Point p = Point::from_coords(Vec::Constant(3, 1.0));
  const Vec u = Vec::Unit(3, 0);
  CHECK_THROWS_AS(sectional(chart, p, u, 2.0 * u), Error);
}

TEST_CASE("minimum over points") {
  const CollarChart chart = round_sphere_chart(3);
  const std::vector<Point> points{Point::from_coords(Vec::Constant(3, 1.0)),
                                  Point::from_coords(Vec::Constant(3, 1.2))};
  const CurvatureWitness w = sc_k_min(chart, 1, points);
  CHECK(w.value == doctest::Approx(2.0));
  CHECK_THROWS_AS(sc_k_min(chart, 1, std::vector<Point>{}), Error);
}
