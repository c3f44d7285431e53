#include "splineglue/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "splineglue/chart.hpp"
#include "splineglue/curvature.hpp"
#include "splineglue/errors.hpp"
#include "splineglue/sampling.hpp"

namespace splineglue {

std::optional<double> fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nullopt;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

std::string_view to_string(RateOrder o) { return o == RateOrder::Linear ? "O(eps)" : "O(1)"; }

Vec predicted_ricci_spectrum(const CollarMetric& h1, const CollarMetric& h2, const Vec& x) {
  const Mat h0 = h1.value(x, 0.0);
  const Mat d = h1.d1(x, 0.0) - h2.d1(x, 0.0);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(d, h0, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::NotPositiveDefinite, "h(0) is not positive definite");
  const Vec rel = es.eigenvalues();
  Vec out(rel.size() + 1);
  out(0) = rel.sum();
  out.tail(rel.size()) = rel;
  std::sort(out.data(), out.data() + out.size());
  return out;
}

namespace {

CollarChart spline_chart(const SplineFamily& f) {
  return CollarChart(f.cross_section(), Interval{-f.eps(), f.eps()},
                     [f](const Vec& x, double t) { return f.jet(x, t); }, "spline");
}

Vec with_t(const Vec& u, double t_component) {
  Vec out(u.size() + 1);
  out.head(u.size()) = u;
  out(u.size()) = t_component;
  return out;
}

double form(const Mat& a, const Vec& u, const Vec& v) { return u.dot(a * v); }

struct Deviations {
  double metric = 0, first = 0, second = 0, slice = 0, normal = 0, spectrum = 0, mixed = 0;
};

Deviations measure(const CollarMetric& h1, const CollarMetric& h2, double eps, const RateGrid& grid) {
  const SplineFamily f(h1, h2, eps);
  const CollarChart chart = spline_chart(f);
  const int m = f.slice_dim();
  const std::vector<Vec> dirs = sphere_directions(m, std::max(grid.directions, 2));
  Deviations out;
  for (const Vec& x : grid.xs) {
    const Mat h0 = h1.value(x, 0.0);
    const Mat h1d = h1.d1(x, 0.0);
    const Mat h2d = h2.d1(x, 0.0);
    const Mat d = h1d - h2d;
    const Vec predicted = predicted_ricci_spectrum(h1, h2, x);
    const CurvatureAtPoint base = curvature_from_jet(slice_metric_jet(h1.jet(x, 0.0)));
    for (double t : linspace(-eps, eps, grid.t_nodes)) {
      const CollarJet j = f.jet(x, t);
      out.metric = std::max(out.metric, max_abs(j.value - h0));
      out.first = std::max(out.first, max_abs(j.dt - f.linear_d1(x, t)));
      out.second = std::max(out.second, max_abs(j.dtt - (h2d - h1d) / (2.0 * eps)));

      if (m >= 2) {
        const CurvatureAtPoint slice = curvature_from_jet(slice_metric_jet(j));
        for (std::size_t i = 0; i + 1 < dirs.size(); i += 2) {
          const Vec& u = dirs[i];
          const Vec& v = dirs[i + 1];
          out.slice = std::max(out.slice, std::abs(sectional(slice, u, v) - sectional(base, u, v)));
        }
      }

      const CurvatureAtPoint c = curvature_at(chart, Point{x, t});
      const Vec dt = with_t(Vec::Zero(m), 1.0);
      for (const Vec& u : dirs) {
        const double k = sectional(c, with_t(u, 0.0), dt);
        const double pred = form(d, u, u) / (4.0 * eps * form(h0, u, u));
        out.normal = std::max(out.normal, std::abs(k - pred));
        const Vec unit = with_t(u / std::sqrt(form(h0, u, u)), 0.0);
        out.mixed = std::max(out.mixed, std::abs(form(c.ricci, unit, dt)));
      }
      const Vec eig = ricci_eigenvalues(c);
      for (int i = 0; i < eig.size(); ++i) {
        out.spectrum = std::max(out.spectrum, std::abs(eig(i) - predicted(i) / (4.0 * eps)));
      }
    }
  }
  return out;
}

// Deviations this small are rounding of an identically vanishing quantity.
constexpr double kRoundingFloor = 1e-10;

bool judge(RateReport& r) {
  const bool vanishing = std::all_of(r.deviation.begin(), r.deviation.end(),
                                     [](double d) { return d <= kRoundingFloor; });
  if (vanishing) return true;
  r.slope = fit_log_slope(r.eps, r.deviation);
  if (!r.slope) return false;
  return r.order == RateOrder::Linear ? (*r.slope >= 0.8 && *r.slope <= 1.2)
                                      : std::abs(*r.slope) <= 0.2;
}

}  // namespace

std::vector<RateReport> rate_suite(const CollarMetric& h1, const CollarMetric& h2,
                                   const std::vector<double>& eps_list, const RateGrid& grid) {
  if (eps_list.empty()) fail(ErrorKind::InvalidInput, "empty eps list");
  if (grid.xs.empty()) fail(ErrorKind::EmptySampling, "no cross-section nodes for the rate suite");
  if (grid.t_nodes < 2) fail(ErrorKind::InvalidInput, "rate suite needs at least two t nodes");
  std::vector<Deviations> per_eps(eps_list.size());
  parallel_for(eps_list.size(), [&](std::size_t i) { per_eps[i] = measure(h1, h2, eps_list[i], grid); });

  struct Row {
    const char* name;
    RateOrder order;
    double Deviations::*field;
  };
  const Row rows[] = {
      {"metric", RateOrder::Linear, &Deviations::metric},
      {"first_derivative", RateOrder::Linear, &Deviations::first},
      {"second_derivative", RateOrder::Bounded, &Deviations::second},
      {"slice_curvature", RateOrder::Linear, &Deviations::slice},
      {"normal_curvature", RateOrder::Bounded, &Deviations::normal},
      {"ricci_spectrum", RateOrder::Bounded, &Deviations::spectrum},
      {"ricci_mixed", RateOrder::Bounded, &Deviations::mixed},
  };
  std::vector<RateReport> out;
  for (const Row& row : rows) {
    if (row.field == &Deviations::slice && h1.slice_dim() < 2) continue;
    RateReport r;
    r.quantity = row.name;
    r.order = row.order;
    r.eps = eps_list;
    for (const Deviations& d : per_eps) r.deviation.push_back(d.*row.field);
    r.passed = judge(r);
    out.push_back(std::move(r));
  }
  return out;
}

RicciStructure ricci_structure_check(const CollarMetric& h1, const CollarMetric& h2, double eps,
                                     const std::vector<Vec>& xs, double tolerance) {
  if (xs.empty()) fail(ErrorKind::EmptySampling, "no cross-section nodes");
  const SplineFamily f(h1, h2, eps);
  const CollarChart chart = spline_chart(f);
  RicciStructure worst;
  worst.eps = eps;
  worst.max_relative_deviation = -1.0;
  for (const Vec& x : xs) {
    RicciStructure r;
    r.eps = eps;
    r.x = x;
    r.eigenvalues = 4.0 * eps * ricci_eigenvalues(curvature_at(chart, Point{x, 0.0}));
    r.predicted = predicted_ricci_spectrum(h1, h2, x);
    for (int i = 0; i < r.predicted.size(); ++i) {
      const double p = r.predicted(i);
      const double dev = p != 0.0 ? std::abs(r.eigenvalues(i) - p) / std::abs(p)
                                  : std::numeric_limits<double>::infinity();
      r.max_relative_deviation = std::max(r.max_relative_deviation, dev);
    }
    if (r.max_relative_deviation > worst.max_relative_deviation) worst = r;
  }
  worst.passed = worst.max_relative_deviation <= tolerance;
  return worst;
}

}  // namespace splineglue
