#include "splineglue/gluing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "splineglue/curvature.hpp"
#include "splineglue/errors.hpp"
#include "splineglue/sampling.hpp"

namespace splineglue {

void GluingParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(ErrorKind::InvalidInput, std::string(name) + " must be positive and finite");
    }
  };
  positive(eps, "eps");
  positive(iota, "iota");
  positive(nu, "nu");
  positive(mu, "mu");
  positive(delta, "delta");
  if (!std::isfinite(kappa)) fail(ErrorKind::InvalidInput, "kappa must be finite");
  if (nu >= eps || nu >= iota) {
    std::ostringstream os;
    os << "smoothing half-width nu=" << nu << " must be below eps=" << eps << " and iota=" << iota;
    fail(ErrorKind::BandTooWide, os.str());
  }
}

namespace {

struct EndData {
  const Mat& a;   // h1(-eps)
  const Mat& b;   // h2(eps)
  const Mat& ap;  // h1'(-eps)
  const Mat& bp;  // h2'(eps)
};

Mat spline_value(double t, double e, const EndData& d) {
  const Mat D = (d.b - d.a) / (2.0 * e);
  return (t + e) / (2.0 * e) * d.b - (t - e) / (2.0 * e) * d.a +
         (t - e) * (t - e) * (t + e) / (4.0 * e * e) * (d.ap - D) +
         (t + e) * (t + e) * (t - e) / (4.0 * e * e) * (d.bp - D);
}

Mat spline_d1(double t, double e, const EndData& d) {
  const Mat D = (d.b - d.a) / (2.0 * e);
  const double tt = 2.0 * (t * t - e * e);
  return D + (tt + (t - e) * (t - e)) / (4.0 * e * e) * (d.ap - D) +
         (tt + (t + e) * (t + e)) / (4.0 * e * e) * (d.bp - D);
}

Mat spline_d2(double t, double e, const EndData& d) {
  return 3.0 * t / (2.0 * e * e) * (d.ap + d.bp - (d.b - d.a) / e) + (d.bp - d.ap) / (2.0 * e);
}

}  // namespace

SplineFamily::SplineFamily(CollarMetric h1, CollarMetric h2, double eps)
    : h1_(std::move(h1)), h2_(std::move(h2)), eps_(eps) {
  static std::atomic<std::uint64_t> next_id{1};
  id_ = next_id.fetch_add(1);
  if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorKind::InvalidInput, "eps must be positive");
  if (!(h1_.cross_section() == h2_.cross_section())) {
    fail(ErrorKind::DimensionMismatch, "collars have different cross-sections");
  }
  if (!h1_.interval().contains(-eps)) {
    fail(ErrorKind::CollarTooShallow, "first collar does not reach t = -eps = " + std::to_string(-eps));
  }
  if (!h2_.interval().contains(eps)) {
    fail(ErrorKind::CollarTooShallow, "second collar does not reach t = eps = " + std::to_string(eps));
  }
}

std::pair<const CollarJet&, const CollarJet&> SplineFamily::end_jets(const Vec& x) const {
  // Band quadrature evaluates one x at many t; keep the last end data per thread.
  struct Cache {
    std::uint64_t id = 0;
    Vec x;
    CollarJet j1, j2;
  };
  thread_local Cache cache;
  if (cache.id != id_ || cache.x.size() != x.size() || cache.x != x) {
    cache.j1 = h1_.jet(x, -eps_);
    cache.j2 = h2_.jet(x, eps_);
    cache.x = x;
    cache.id = id_;
  }
  return {cache.j1, cache.j2};
}

CollarJet SplineFamily::jet(const Vec& x, double t) const {
  const auto [j1, j2] = end_jets(x);
  const int m = slice_dim();
  CollarJet out = CollarJet::zero(m);
  const EndData base{j1.value, j2.value, j1.dt, j2.dt};
  out.value = spline_value(t, eps_, base);
  out.dt = spline_d1(t, eps_, base);
  out.dtt = spline_d2(t, eps_, base);
  for (int i = 0; i < m; ++i) {
    const EndData d{j1.dx[i], j2.dx[i], j1.dxt[i], j2.dxt[i]};
    out.dx[i] = spline_value(t, eps_, d);
    out.dxt[i] = spline_d1(t, eps_, d);
  }
  for (std::size_t i = 0; i < out.dxx.size(); ++i) {
    const EndData d{j1.dxx[i], j2.dxx[i], j1.dxxt[i], j2.dxxt[i]};
    out.dxx[i] = spline_value(t, eps_, d);
    out.dxxt[i] = spline_d1(t, eps_, d);
  }
  return out;
}

SymForm SplineFamily::value(const Vec& x, double t) const {
  const auto [j1, j2] = end_jets(x);
  return spline_value(t, eps_, {j1.value, j2.value, j1.dt, j2.dt});
}

SymForm SplineFamily::d1(const Vec& x, double t) const {
  const auto [j1, j2] = end_jets(x);
  return spline_d1(t, eps_, {j1.value, j2.value, j1.dt, j2.dt});
}

SymForm SplineFamily::d2(const Vec& x, double t) const {
  const auto [j1, j2] = end_jets(x);
  return spline_d2(t, eps_, {j1.value, j2.value, j1.dt, j2.dt});
}

SymForm SplineFamily::linear_d1(const Vec& x, double t) const {
  return (eps_ - t) / (2.0 * eps_) * h1_.d1(x, 0.0) + (eps_ + t) / (2.0 * eps_) * h2_.d1(x, 0.0);
}

SymForm second_fundamental_form(const SplineFamily& f, const Vec& x, double t) {
  return -0.5 * f.d1(x, t);
}

SymForm second_fundamental_form(const CollarMetric& c, const Vec& x, double t) {
  return -0.5 * c.d1(x, t);
}

void check_spline_positive(const SplineFamily& f, const std::vector<Vec>& xs, int t_nodes) {
  const std::vector<double> ts = linspace(-f.eps(), f.eps(), std::max(t_nodes, 2));
  for (const Vec& x : xs) {
    for (double t : ts) {
      std::ostringstream where;
      where << "x=" << format_vector(x) << ", t=" << t << " (eps=" << f.eps()
            << " too large for a positive spline)";
      require_positive_definite(f.value(x, t), where.str());
    }
  }
}

double spline_d1_check(const SplineFamily& f, const std::vector<Vec>& xs, int t_nodes) {
  const std::vector<double> ts = linspace(-f.eps(), f.eps(), std::max(t_nodes, 2));
  double worst = 0.0;
  for (const Vec& x : xs) {
    for (double t : ts) worst = std::max(worst, max_abs(f.d1(x, t) - f.linear_d1(x, t)));
  }
  return worst;
}

std::string_view to_string(CurvatureMode mode) {
  return mode == CurvatureMode::RicK ? "RicK" : "ScK";
}

CurvatureMode curvature_mode_from_string(std::string_view s) {
  if (s == "RicK" || s == "ric_k") return CurvatureMode::RicK;
  if (s == "ScK" || s == "sc_k") return CurvatureMode::ScK;
  fail(ErrorKind::InvalidInput, "unknown curvature mode '" + std::string(s) + "' (expected RicK or ScK)");
}

BoundaryCheck boundary_condition_check(const CollarMetric& h1, const CollarMetric& h2,
                                       CurvatureMode mode, int k, const std::vector<Vec>& xs) {
  if (!(h1.cross_section() == h2.cross_section())) {
    fail(ErrorKind::DimensionMismatch, "collars have different cross-sections");
  }
  if (xs.empty()) fail(ErrorKind::EmptySampling, "no cross-section samples");
  const int n = h1.dim();
  const int m = h1.slice_dim();
  BoundaryCheck out;
  if (mode == CurvatureMode::RicK) {
    if (k < 1 || k > n - 1) fail(ErrorKind::InvalidInput, "Ric_k needs 1 <= k <= n-1");
    out.k_effective = m;
  } else {
    if (k < 1 || k > n) fail(ErrorKind::InvalidInput, "Sc_k needs 1 <= k <= n");
    out.k_effective = k <= n - 2 ? k : k - 1;
  }
  out.margin = std::numeric_limits<double>::infinity();
  out.relative_margin = std::numeric_limits<double>::infinity();
  for (const Vec& x : xs) {
    if (x.size() != m) fail(ErrorKind::DimensionMismatch, "cross-section sample has wrong length");
    const Mat delta = h1.d1(x, 0.0) - h2.d1(x, 0.0);
    // h(0)-orthonormal components: L^{-1} delta L^{-T} with h = L L^T.
    Eigen::LLT<Mat> llt(h1.value(x, 0.0));
    if (llt.info() != Eigen::Success) {
      fail(ErrorKind::NotPositiveDefinite, "boundary metric not positive definite at " + format_vector(x));
    }
    const Mat lower = llt.matrixL();
    const Mat left = lower.triangularView<Eigen::Lower>().solve(delta);
    const Mat rel = lower.triangularView<Eigen::Lower>().solve(left.transpose()).transpose();
    const Vec rel_ev = ascending_eigenvalues(0.5 * (rel + rel.transpose()));
    out.relative_margin = std::min(out.relative_margin, rel_ev(0));
    double value;
    if (mode == CurvatureMode::RicK) {
      value = ascending_eigenvalues(delta)(0);
    } else {
      value = 0.0;
      for (int i = 0; i < out.k_effective; ++i) value += rel_ev(i);
    }
    if (value < out.margin) {
      out.margin = value;
      out.witness_x = x;
    }
  }
  out.satisfied = out.margin > 0.0;
  return out;
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::H1: return "h1";
    case Region::BandLower: return "band_lower";
    case Region::Spline: return "spline";
    case Region::BandUpper: return "band_upper";
    case Region::H2: return "h2";
  }
  return "?";
}

GluedChart::GluedChart(CrossSection section, std::vector<RegionSpan> regions, GluingParams params,
                       bool smoothed, std::string description, double smoothing_radius)
    : CollarChart(section,
                  Interval{regions.empty() ? 0.0 : regions.front().t.lo,
                           regions.empty() ? 0.0 : regions.back().t.hi},
                  nullptr, std::move(description)),
      regions_(std::move(regions)),
      params_(params),
      smoothed_(smoothed),
      smoothing_radius_(smoothing_radius) {
  if (regions_.empty()) fail(ErrorKind::InvalidInput, "glued chart needs at least one region");
}

std::size_t GluedChart::region_index(double t) const {
  for (std::size_t i = 0; i + 1 < regions_.size(); ++i) {
    if (t < regions_[i].t.hi) return i;
  }
  return regions_.size() - 1;
}

CollarJet GluedChart::slice_jet(const Vec& x, double t) const {
  return regions_[region_index(t)].jet(x, t);
}

double boundary_mismatch(const CollarMetric& h1, const CollarMetric& h2,
                         const std::vector<Vec>& xs) {
  double worst = 0.0;
  for (const Vec& x : xs) {
    const Mat a = h1.value(x, 0.0);
    worst = std::max(worst, max_abs(a - h2.value(x, 0.0)) / std::max(1.0, max_abs(a)));
  }
  return worst;
}

GluedChart assemble_glued(const CollarMetric& h1, const CollarMetric& h2, const GluingParams& params,
                          const std::vector<Vec>& xs, int t_nodes) {
  if (!(params.eps > 0.0) || !(params.iota > 0.0)) {
    fail(ErrorKind::InvalidInput, "eps and iota must be positive");
  }
  if (h1.side() != Side::Lower || h2.side() != Side::Upper) {
    fail(ErrorKind::InvalidInput, "first collar must occupy t <= 0 and second t >= 0");
  }
  const double reach = params.eps + params.iota;
  if (h1.interval().lo > -reach || h2.interval().hi < reach) {
    std::ostringstream os;
    os << "eps + iota = " << reach << " exceeds collar depth (" << h1.depth() << ", "
       << h2.depth() << ")";
    fail(ErrorKind::CollarTooShallow, os.str());
  }
  SplineFamily spline(h1, h2, params.eps);
  if (boundary_mismatch(h1, h2, xs) > 1e-9) {
    fail(ErrorKind::InvalidInput, "collar boundaries h1(0) and h2(0) are not isometric");
  }
  check_spline_positive(spline, xs, t_nodes);

  std::vector<RegionSpan> regions;
  regions.push_back({Region::H1, Interval{-reach, -params.eps},
                     [h1](const Vec& x, double t) { return h1.jet(x, t); }});
  regions.push_back({Region::Spline, Interval{-params.eps, params.eps},
                     [spline](const Vec& x, double t) { return spline.jet(x, t); }});
  regions.push_back({Region::H2, Interval{params.eps, reach},
                     [h2](const Vec& x, double t) { return h2.jet(x, t); }});
  return GluedChart(h1.cross_section(), std::move(regions), params, false,
                    "glued(" + h1.description() + " | " + h2.description() + ")");
}

}  // namespace splineglue
