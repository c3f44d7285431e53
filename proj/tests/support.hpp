#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <utility>

#include "splineglue/collar.hpp"
#include "splineglue/gluing.hpp"
#include "splineglue/linalg.hpp"

namespace testing {

using namespace splineglue;

inline constexpr double kCapRadius = std::numbers::pi / 3.0;

// Round cap of radius pi/3 in S^n, seen from its boundary.
inline CollarMetric round_cap(int n = 4) {
  return make_warped_product(Profile::sine(1.0, 1.0, kCapRadius), n, {-(kCapRadius - 0.1), 0.0});
}

// Cap against an exponential collar with the same boundary sphere.
inline std::pair<CollarMetric, CollarMetric> generic_pair() {
  return {make_warped_product(Profile::sine(1.0, 1.0, kCapRadius), 4, {-0.5, 0.0}),
          make_warped_product(Profile::exponential(std::sin(kCapRadius), -0.5), 4, {0.0, 0.5})};
}

inline std::vector<Profile> repeated(const Profile& p, int count) { return std::vector<Profile>(count, p); }

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }

  Vec gaussian(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }
  Vec unit(int n) {
    const Vec v = gaussian(n);
    return v / v.norm();
  }
  Mat symmetric(int n) {
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = normal();
    return 0.5 * (a + a.transpose());
  }
  // Point of the chart box of `cs`, away from the coordinate boundary.
  Vec inside(const CrossSection& cs) {
    Vec x(cs.dim);
    for (int i = 0; i < cs.dim; ++i) x(i) = uniform(cs.lower(i) + 0.05, cs.upper(i) - 0.05);
    return x;
  }
};

inline double central_difference(const std::function<double(double)>& f, double t, double h = 1e-5) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

}  // namespace testing
