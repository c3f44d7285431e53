#include "splineglue/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "splineglue/diameter.hpp"
#include "splineglue/errors.hpp"

namespace splineglue {

namespace {

void check_mode_k(int n, CurvatureMode mode, int k) {
  const int hi = mode == CurvatureMode::RicK ? n - 1 : n;
  if (k < 1 || k > hi) {
    std::ostringstream os;
    os << to_string(mode) << " needs 1 <= k <= " << hi << " in dimension " << n << "; got k = " << k;
    fail(ErrorKind::InvalidInput, os.str());
  }
}

bool is_band(Region r) { return r == Region::BandLower || r == Region::BandUpper; }

std::vector<double> region_t_nodes(const RegionSpan& span, int t_nodes, double radius) {
  std::vector<double> ts = linspace(span.t.lo, span.t.hi, t_nodes);
  if (is_band(span.region) && radius > 0.0) {
    const double centre = 0.5 * (span.t.lo + span.t.hi);
    for (int j = -3; j <= 3; ++j) ts.push_back(centre + j * radius);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

Vec with_t(const Vec& u, double t_component) {
  Vec out(u.size() + 1);
  out.head(u.size()) = u;
  out(u.size()) = t_component;
  return out;
}

double form(const Mat& a, const Vec& u, const Vec& v) { return u.dot(a * v); }

// Columns of `a` made orthonormal for the inner product g.
Mat orthonormalize(const Mat& a, const Mat& g) {
  const Mat gram = a.transpose() * g * a;
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() != Eigen::Success) return Mat(0, 0);
  const Mat upper = llt.matrixU();
  return upper.transpose().triangularView<Eigen::Lower>().solve(a.transpose()).transpose();
}

double default_eps_max(const CollarMetric& h1, const CollarMetric& h2, double iota) {
  const double depth = std::min(h1.depth(), h2.depth());
  return std::min(0.5 * depth, depth - iota);
}

CollarChart spline_chart(const SplineFamily& f) {
  return CollarChart(f.cross_section(), Interval{-f.eps(), f.eps()},
                     [f](const Vec& x, double t) { return f.jet(x, t); }, "spline");
}

}  // namespace

CollarChart region_chart(const GluedChart& chart, std::size_t region) {
  const RegionSpan& span = chart.regions().at(region);
  return CollarChart(chart.cross_section(), span.t, span.jet,
                     chart.description() + " [" + std::string(to_string(span.region)) + "]");
}

CurvatureCertificate certify(const GluedChart& chart, CurvatureMode mode, int k, double kappa,
                             const SamplingPlan& plan) {
  check_mode_k(chart.dim(), mode, k);
  plan.validate();
  CurvatureCertificate cert;
  cert.mode = mode;
  cert.k = k;
  cert.kappa = kappa;
  cert.plan = plan;
  const std::vector<Vec> xs = chart.cross_section().grid(plan.grid_per_axis);
  const auto& regions = chart.regions();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const CollarChart rc = region_chart(chart, i);
    std::vector<Point> points;
    for (double t : region_t_nodes(regions[i], plan.t_nodes, chart.smoothing_radius()))
      for (const Vec& x : xs) points.push_back(Point{x, t});
    RegionMinimum rm;
    rm.region = regions[i].region;
    rm.t = regions[i].t;
    rm.points = points.size();
    rm.witness = mode == CurvatureMode::RicK ? ric_k_min(rc, k, plan, points)
                                             : sc_k_min(rc, k, points);
    cert.points += points.size();
    cert.regions.push_back(rm);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < cert.regions.size(); ++i) {
    if (cert.regions[i].witness.value < cert.regions[best].witness.value) best = i;
  }
  cert.min_value = cert.regions[best].witness.value;
  cert.witness = cert.regions[best].witness;
  cert.witness_region = cert.regions[best].region;
  cert.passed = cert.min_value > kappa;
  return cert;
}

double reevaluate_witness(const GluedChart& chart, const CurvatureCertificate& cert) {
  const auto& regions = chart.regions();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].region != cert.witness_region) continue;
    const CurvatureAtPoint c = curvature_at(region_chart(chart, i), cert.witness.point);
    if (cert.mode == CurvatureMode::ScK) return sc_k_at(c, cert.k);
    return k_positive_sum(jacobi_operator(c, cert.witness.direction), cert.k);
  }
  fail(ErrorKind::InvalidInput, "certificate region not present in chart");
}

std::string_view to_string(SearchStatus s) {
  return s == SearchStatus::Certified ? "certified" : "inconclusive";
}

SearchOutcome epsilon_nu_search(const CollarMetric& h1, const CollarMetric& h2, CurvatureMode mode,
                                int k, double kappa, const GluingParams& base,
                                const SearchSchedule& schedule) {
  schedule.plan.validate();
  check_mode_k(h1.dim(), mode, k);
  SearchOutcome out;
  out.params = base;
  const std::vector<Vec> xs = h1.cross_section().grid(schedule.plan.grid_per_axis);
  const std::vector<Vec> smooth_xs = h1.cross_section().grid(schedule.smoothing_grid);
  out.boundary = boundary_condition_check(h1, h2, mode, k, xs);
  if (!out.boundary.satisfied) {
    std::ostringstream os;
    os << "boundary condition not strict (margin " << out.boundary.margin << " at x = "
       << format_vector(out.boundary.witness_x) << ")";
    out.reason = os.str();
    return out;
  }
  const double iota = base.iota;
  const double eps_max = schedule.eps_max > 0.0 ? schedule.eps_max : default_eps_max(h1, h2, iota);
  if (!(eps_max >= schedule.eps_min)) {
    out.reason = "collars too shallow for eps >= " + std::to_string(schedule.eps_min);
    return out;
  }

  for (double eps = eps_max; eps >= schedule.eps_min * (1.0 - 1e-12); eps *= 0.5) {
    GluingParams params = base;
    params.eps = eps;
    params.nu = 0.5 * std::min(eps, iota);
    SearchAttempt c1{"c1", eps, 0.0, 0.0, false, 0.0, ""};
    std::optional<GluedChart> glued;
    try {
      glued.emplace(assemble_glued(h1, h2, params, xs));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotPositiveDefinite && e.kind() != ErrorKind::CollarTooShallow) throw;
      c1.note = e.what();
      out.trace.push_back(c1);
      continue;
    }
    const CurvatureCertificate cert = certify(*glued, mode, k, kappa, schedule.plan);
    c1.passed = cert.passed;
    c1.min_value = cert.min_value;
    out.trace.push_back(c1);
    if (!cert.passed) continue;
    out.c1_certificate = cert;

    const double nu0 = 0.5 * std::min(eps, iota);
    for (double nu = nu0; nu >= schedule.nu_min * (1.0 - 1e-12); nu *= 0.5) {
      SearchAttempt sm{"smooth", eps, nu, base.mu * nu / nu0, false, 0.0, ""};
      try {
        SmoothedGlued s = smooth_glued(*glued, nu, sm.mu, smooth_xs);
        const CurvatureCertificate sc = certify(s.chart, mode, k, kappa, schedule.plan);
        sm.passed = sc.passed;
        sm.min_value = sc.min_value;
        out.trace.push_back(sm);
        if (sc.passed) {
          out.status = SearchStatus::Certified;
          out.params = s.chart.params();
          out.smooth_certificate = sc;
          out.smoothing = s.report;
          out.chart.emplace(std::move(s.chart));
          return out;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BudgetInfeasible && e.kind() != ErrorKind::NotPositiveDefinite)
          throw;
        sm.note = e.what();
        out.trace.push_back(sm);
      }
    }
    std::ostringstream os;
    os << "C^1 metric certified at eps = " << eps << " but no smoothing width down to "
       << schedule.nu_min << " certified";
    out.reason = os.str();
    return out;
  }
  std::ostringstream os;
  os << "eps floor " << schedule.eps_min << " reached without a C^1 certificate";
  out.reason = os.str();
  return out;
}

GaussReport gauss_check(const SplineFamily& f, int planes, double step, double coarse_step) {
  if (planes < 1) fail(ErrorKind::InvalidInput, "gauss_check needs at least one plane");
  const int m = f.slice_dim();
  if (m < 2) fail(ErrorKind::InvalidInput, "tangential planes need a cross-section of dimension >= 2");
  const CollarChart chart = spline_chart(f);
  const MetricOnlyChart fd = finite_difference_view(chart, step, true);
  const MetricOnlyChart coarse = finite_difference_view(chart, coarse_step, false);
  const MetricOnlyChart fine = finite_difference_view(chart, 0.5 * coarse_step, false);
  const CrossSection& cs = f.cross_section();
  const std::vector<Vec> cube = unit_cube_sequence(m + 1, planes);
  const std::vector<Vec> dirs = sphere_directions(m, 2 * planes);

  struct Sample {
    bool degenerate = false;
    double r = 0, rc = 0, rf = 0;
  };
  std::vector<Sample> samples(static_cast<std::size_t>(planes));
  parallel_for(samples.size(), [&](std::size_t i) {
    Vec x(m);
    for (int a = 0; a < m; ++a) x(a) = cs.lower(a) + cube[i](a) * (cs.upper(a) - cs.lower(a));
    const double t = -f.eps() + 2.0 * f.eps() * cube[i](m);
    const Point p{x, t};
    const Vec& u = dirs[2 * i];
    const Vec& v = dirs[2 * i + 1];
    const CollarJet j = f.jet(x, t);
    try {
      const double kt = sectional(curvature_from_jet(slice_metric_jet(j)), u, v);
      const double phi = form(j.dt, u, u) * form(j.dt, v, v) - std::pow(form(j.dt, u, v), 2);
      const double psi =
          4.0 * (form(j.value, u, u) * form(j.value, v, v) - std::pow(form(j.value, u, v), 2));
      const double rhs = kt - phi / psi;
      const Vec U = with_t(u, 0.0);
      const Vec V = with_t(v, 0.0);
      samples[i].r = std::abs(sectional(curvature_at(fd, p), U, V) - rhs);
      samples[i].rc = std::abs(sectional(curvature_at(coarse, p), U, V) - rhs);
      samples[i].rf = std::abs(sectional(curvature_at(fine, p), U, V) - rhs);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegeneratePlane) throw;
      samples[i].degenerate = true;
    }
  });
  GaussReport out;
  out.step = step;
  out.coarse_step = coarse_step;
  for (const Sample& s : samples) {
    if (s.degenerate) {
      ++out.degenerate;
      continue;
    }
    ++out.planes;
    out.max_residual = std::max(out.max_residual, s.r);
    out.coarse_residual = std::max(out.coarse_residual, s.rc);
    out.fine_residual = std::max(out.fine_residual, s.rf);
  }
  // A residual already at rounding level has no truncation error left to order.
  out.order = out.coarse_residual > 1e-10 ? std::log2(out.coarse_residual / out.fine_residual)
                                          : std::numeric_limits<double>::infinity();
  return out;
}

ConvexityReport convexity_kernel_check(const CollarMetric& h1, const CollarMetric& h2, double eps,
                                       const std::vector<Vec>& xs, int pairs) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidInput, "eps must be positive");
  if (xs.empty()) fail(ErrorKind::EmptySampling, "no cross-section nodes");
  const int m = h1.slice_dim();
  if (m < 2) fail(ErrorKind::InvalidInput, "2x2 restrictions need a cross-section of dimension >= 2");
  ConvexityReport out;
  out.applicable = true;
  out.min_second_difference = std::numeric_limits<double>::infinity();
  const std::vector<Vec> dirs = sphere_directions(m, 2 * pairs);
  const std::vector<double> ts = linspace(-eps, eps, 21);
  const double s = ts[1] - ts[0];
  for (std::size_t xi = 0; xi < xs.size(); ++xi) {
    const Mat a = h1.d1(xs[xi], 0.0);
    const Mat b = h2.d1(xs[xi], 0.0);
    if (ascending_eigenvalues(a - b)(0) <= 0.0) out.applicable = false;
    for (int p = 0; p < pairs; ++p) {
      const Vec& u = dirs[2 * p];
      const Vec& v = dirs[2 * p + 1];
      auto det = [&](double t) {
        const Mat h = (eps - t) / (2.0 * eps) * a + (eps + t) / (2.0 * eps) * b;
        return form(h, u, u) * form(h, v, v) - form(h, u, v) * form(h, u, v);
      };
      for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        const double d2 = det(ts[i] - s) - 2.0 * det(ts[i]) + det(ts[i] + s);
        out.min_second_difference = std::min(out.min_second_difference, d2);
      }
      ++out.pairs;
    }
  }
  return out;
}

namespace {

// Violations at or below this are rounding of an exact inequality.
constexpr double kRoundingFloor = 1e-10;

bool decays(const std::vector<double>& eps, const std::vector<double>& values,
            std::optional<double>& slope) {
  if (std::all_of(values.begin(), values.end(), [](double v) { return v <= kRoundingFloor; })) {
    return true;
  }
  slope = fit_log_slope(eps, values);
  if (slope) return *slope >= 0.8;
  // Some entries vanish: accept only if the finest eps is one of them.
  const std::size_t finest = static_cast<std::size_t>(
      std::min_element(eps.begin(), eps.end()) - eps.begin());
  return values[finest] <= kRoundingFloor;
}

// Groups of `size` consecutive low-discrepancy directions, as matrix columns.
std::vector<Mat> direction_frames(int m, int size, int count) {
  const std::vector<Vec> dirs = sphere_directions(m, size * count);
  std::vector<Mat> out;
  for (int f = 0; f < count; ++f) {
    Mat a(m, size);
    for (int c = 0; c < size; ++c) a.col(c) = dirs[static_cast<std::size_t>(f) * size + c];
    out.push_back(a);
  }
  return out;
}

}  // namespace

InterpolationReport interpolation_bound_check(const SplineFamily& f, int k, int frames,
                                              const std::vector<double>& eps_list,
                                              const std::vector<Vec>& xs, int t_nodes) {
  const int m = f.slice_dim();
  if (k < 1 || k > m - 1) {
    fail(ErrorKind::InvalidInput, "interpolation bound needs 1 <= k <= " + std::to_string(m - 1));
  }
  if (xs.empty()) fail(ErrorKind::EmptySampling, "no cross-section nodes");
  if (eps_list.empty()) fail(ErrorKind::InvalidInput, "empty eps list");
  const CollarChart c1 = collar_chart(f.h1());
  const CollarChart c2 = collar_chart(f.h2());
  const std::vector<Mat> raw = direction_frames(m, k + 1, frames);
  InterpolationReport out;
  out.k = k;
  out.eps = eps_list;
  out.min_gap.assign(eps_list.size(), std::numeric_limits<double>::infinity());
  parallel_for(eps_list.size(), [&](std::size_t e) {
    const double eps = eps_list[e];
    const SplineFamily fe(f.h1(), f.h2(), eps);
    const CollarChart chart = spline_chart(fe);
    double gap = std::numeric_limits<double>::infinity();
    for (const Vec& x : xs) {
      const Mat h0 = f.h1().value(x, 0.0);
      const CurvatureAtPoint a1 = curvature_at(c1, Point{x, 0.0});
      const CurvatureAtPoint a2 = curvature_at(c2, Point{x, 0.0});
      std::vector<Mat> frames0;
      for (const Mat& r : raw) {
        const Mat q = orthonormalize(r, h0);
        if (q.size() > 0) frames0.push_back(q);
      }
      for (double t : linspace(-eps, eps, t_nodes)) {
        const CurvatureAtPoint c = curvature_at(chart, Point{x, t});
        for (const Mat& q : frames0) {
          const Vec v = with_t(q.col(0), 0.0);
          double lhs = 0.0, s1 = 0.0, s2 = 0.0;
          for (int i = 1; i <= k; ++i) {
            const Vec e_i = with_t(q.col(i), 0.0);
            lhs += sectional(c, v, e_i);
            s1 += sectional(a1, v, e_i);
            s2 += sectional(a2, v, e_i);
          }
          const double rhs = (eps - t) / (2.0 * eps) * s1 + (eps + t) / (2.0 * eps) * s2;
          gap = std::min(gap, lhs - rhs);
        }
      }
    }
    out.min_gap[e] = gap;
  });
  for (double g : out.min_gap) out.violation.push_back(std::max(0.0, -g));
  out.passed = decays(out.eps, out.violation, out.slope);
  return out;
}

EtaReport eta_frame_report(const SplineFamily& f, const std::vector<double>& eps_list,
                           const std::vector<Vec>& xs, int frames, int t_nodes) {
  if (xs.empty()) fail(ErrorKind::EmptySampling, "no cross-section nodes");
  if (eps_list.empty()) fail(ErrorKind::InvalidInput, "empty eps list");
  const int m = f.slice_dim();
  const std::vector<Mat> raw = direction_frames(m, m, frames);
  EtaReport out;
  out.eps = eps_list;
  out.eta.assign(eps_list.size(), 0.0);
  parallel_for(eps_list.size(), [&](std::size_t e) {
    const SplineFamily fe(f.h1(), f.h2(), eps_list[e]);
    double eta = 0.0;
    for (const Vec& x : xs) {
      const Mat h0 = f.h1().value(x, 0.0);
      for (double t : linspace(-eps_list[e], eps_list[e], t_nodes)) {
        const Mat g = fe.value(x, t);
        for (const Mat& r : raw) {
          const Mat q = orthonormalize(r, g);
          if (q.size() == 0) continue;
          const Mat gram = q.transpose() * h0 * q;
          eta = std::max(eta, max_abs(gram - Mat::Identity(m, m)));
        }
      }
    }
    out.eta[e] = eta;
  });
  out.passed = decays(out.eps, out.eta, out.slope);
  return out;
}

TotallyGeodesicReport totally_geodesic_check(const GluedChart& chart, const CollarMetric& h1,
                                             const CollarMetric& h2, const std::vector<Vec>& xs,
                                             int t_nodes) {
  if (xs.empty()) fail(ErrorKind::EmptySampling, "no cross-section nodes");
  TotallyGeodesicReport out;
  const double reach = std::min(h1.depth(), h2.depth());
  out.mirror_pair = true;
  for (const Vec& x : xs) {
    for (double t : linspace(0.0, reach, 21)) {
      const CollarJet a = h1.jet(x, -t);
      const CollarJet b = h2.jet(x, t);
      const double scale = 1.0 + max_abs(a.value) + max_abs(a.dt);
      if (max_abs(a.value - b.value) > 1e-12 * scale || max_abs(a.dt + b.dt) > 1e-12 * scale) {
        out.mirror_pair = false;
      }
    }
  }
  if (!out.mirror_pair) {
    out.note = "precondition violated: the second collar is not the mirror image of the first";
    return out;
  }
  const double hi = std::min(-chart.t_range().lo, chart.t_range().hi);
  std::vector<double> ts = linspace(0.0, hi, t_nodes);
  const GluingParams& p = chart.params();
  const double rho = chart.smoothing_radius();
  for (int j = -3; j <= 3; ++j) {
    ts.push_back(p.eps + j * rho);
    if (chart.smoothed()) ts.push_back(p.eps + 0.25 * j * p.nu);
  }
  for (const Vec& x : xs) {
    for (double t : ts) {
      if (t < 0.0 || t > hi) continue;
      const CollarJet a = chart.slice_jet(x, t);
      const CollarJet b = chart.slice_jet(x, -t);
      out.symmetry_residual = std::max(out.symmetry_residual, max_abs(a.value - b.value));
    }
    out.second_fundamental_form =
        std::max(out.second_fundamental_form, 0.5 * max_abs(chart.slice_jet(x, 0.0).dt));
  }
  out.passed = out.symmetry_residual <= 1e-10 && out.second_fundamental_form <= 1e-8;
  return out;
}

AlmostNonnegReport almost_nonneg_check(const CollarMetric& h1, const CollarMetric& h2,
                                       CurvatureMode mode, int k, double delta,
                                       const GluingParams& base, const SearchSchedule& schedule,
                                       int diameter_resolution) {
  if (!(delta > 0.0)) fail(ErrorKind::InvalidInput, "almost non-negativity needs delta > 0");
  AlmostNonnegReport out;
  out.delta = delta;
  out.diameter_resolution = diameter_resolution;
  const double eps_max =
      schedule.eps_max > 0.0 ? schedule.eps_max : default_eps_max(h1, h2, base.iota);
  GluingParams first = base;
  first.eps = eps_max;
  first.nu = 0.5 * std::min(eps_max, base.iota);
  const std::vector<Vec> xs = h1.cross_section().grid(schedule.plan.grid_per_axis);
  const GluedChart glued = assemble_glued(h1, h2, first, xs);
  out.initial_diameter = diameter_estimate(glued, diameter_resolution).value;
  out.kappa = -delta / (2.0 * out.initial_diameter * out.initial_diameter);

  SearchOutcome s = epsilon_nu_search(h1, h2, mode, k, out.kappa, base, schedule);
  out.status = s.status;
  out.reason = s.reason;
  if (s.status == SearchStatus::Certified) {
    out.min_value = s.smooth_certificate->min_value;
    out.diameter = diameter_estimate(*s.chart, diameter_resolution).value;
    out.scaled = out.min_value * out.diameter * out.diameter;
    out.passed = out.scaled >= -delta;
  }
  out.search = std::move(s);
  return out;
}

}  // namespace splineglue
