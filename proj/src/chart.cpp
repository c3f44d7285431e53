#include "splineglue/chart.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "splineglue/errors.hpp"

namespace splineglue {

std::string format_vector(const Vec& v) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ")";
  return os.str();
}

Vec Point::coords() const {
  Vec c(x.size() + 1);
  c.head(x.size()) = x;
  c(x.size()) = t;
  return c;
}

Point Point::from_coords(const Vec& c) {
  const int m = static_cast<int>(c.size()) - 1;
  return Point{c.head(m), c(m)};
}

MetricJet collar_metric_jet(const CollarJet& h) {
  const int m = h.slice_dim();
  const int n = m + 1;
  MetricJet j;
  j.g = Mat::Zero(n, n);
  j.g.topLeftCorner(m, m) = h.value;
  j.g(m, m) = 1.0;
  j.dg.assign(n, Mat::Zero(n, n));
  for (int i = 0; i < m; ++i) j.dg[i].topLeftCorner(m, m) = h.dx[i];
  j.dg[m].topLeftCorner(m, m) = h.dt;
  j.ddg.assign(static_cast<std::size_t>(n) * n, Mat::Zero(n, n));
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      j.ddg[static_cast<std::size_t>(a) * n + b].topLeftCorner(m, m) =
          h.dxx[static_cast<std::size_t>(a) * m + b];
    }
    j.ddg[static_cast<std::size_t>(a) * n + m].topLeftCorner(m, m) = h.dxt[a];
    j.ddg[static_cast<std::size_t>(m) * n + a].topLeftCorner(m, m) = h.dxt[a];
  }
  j.ddg[static_cast<std::size_t>(m) * n + m].topLeftCorner(m, m) = h.dtt;
  return j;
}

MetricJet slice_metric_jet(const CollarJet& h) {
  MetricJet j;
  j.g = h.value;
  j.dg = h.dx;
  j.ddg = h.dxx;
  return j;
}

bool Domain::contains(const Vec& coords, double slack) const {
  if (coords.size() != lo.size()) return false;
  for (int i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords(i))) return false;
    if (periodic[i]) continue;
    const double tol = slack * std::max(1.0, hi(i) - lo(i));
    if (coords(i) < lo(i) - tol || coords(i) > hi(i) + tol) return false;
  }
  return true;
}

namespace {

Domain collar_domain(const CrossSection& s, Interval t_range, bool t_periodic) {
  Domain d;
  const int n = s.dim + 1;
  d.lo.resize(n);
  d.hi.resize(n);
  d.periodic.assign(n, false);
  for (int i = 0; i < s.dim; ++i) {
    d.lo(i) = s.lower(i);
    d.hi(i) = s.upper(i);
    d.periodic[i] = s.periodic(i);
  }
  d.lo(s.dim) = t_range.lo;
  d.hi(s.dim) = t_range.hi;
  d.periodic[s.dim] = t_periodic;
  return d;
}

}  // namespace

CollarChart::CollarChart(CrossSection section, Interval t_range, SliceJetFn fn,
                         std::string description, bool t_periodic)
    : Chart(collar_domain(section, t_range, t_periodic), std::move(description)),
      section_(section),
      t_range_(t_range),
      fn_(std::move(fn)) {}

MetricJet CollarChart::jet(const Point& p) const { return collar_metric_jet(slice_jet(p.x, p.t)); }

Mat CollarChart::metric(const Point& p) const {
  const int m = section_.dim;
  Mat g = Mat::Zero(m + 1, m + 1);
  g.topLeftCorner(m, m) = slice_jet(p.x, p.t).value;
  g(m, m) = 1.0;
  return g;
}

namespace {

struct Differences {
  std::vector<Mat> d1;
  std::vector<Mat> d2;
};

Differences central_differences(const MetricFn& f, const Vec& c, double h) {
  const int n = static_cast<int>(c.size());
  Differences out;
  out.d1.assign(n, Mat());
  out.d2.assign(static_cast<std::size_t>(n) * n, Mat());
  const Mat f0 = f(c);
  std::vector<Mat> plus(n), minus(n);
  for (int a = 0; a < n; ++a) {
    Vec cp = c, cm = c;
    cp(a) += h;
    cm(a) -= h;
    plus[a] = f(cp);
    minus[a] = f(cm);
    out.d1[a] = (plus[a] - minus[a]) / (2.0 * h);
    out.d2[static_cast<std::size_t>(a) * n + a] = (plus[a] - 2.0 * f0 + minus[a]) / (h * h);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      Vec pp = c, pm = c, mp = c, mm = c;
      pp(a) += h, pp(b) += h;
      pm(a) += h, pm(b) -= h;
      mp(a) -= h, mp(b) += h;
      mm(a) -= h, mm(b) -= h;
      const Mat d = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
      out.d2[static_cast<std::size_t>(a) * n + b] = d;
      out.d2[static_cast<std::size_t>(b) * n + a] = d;
    }
  }
  return out;
}

}  // namespace

MetricJet finite_difference_jet(const MetricFn& metric, const Vec& coords, double step,
                                bool richardson) {
  if (!(step > 0.0)) fail(ErrorKind::InvalidInput, "finite-difference step must be positive");
  MetricJet j;
  j.g = metric(coords);
  Differences coarse = central_differences(metric, coords, step);
  if (!richardson) {
    j.dg = std::move(coarse.d1);
    j.ddg = std::move(coarse.d2);
    return j;
  }
  Differences fine = central_differences(metric, coords, step / 2.0);
  j.dg.resize(coarse.d1.size());
  for (std::size_t i = 0; i < coarse.d1.size(); ++i) {
    j.dg[i] = (4.0 * fine.d1[i] - coarse.d1[i]) / 3.0;
  }
  j.ddg.resize(coarse.d2.size());
  for (std::size_t i = 0; i < coarse.d2.size(); ++i) {
    j.ddg[i] = (4.0 * fine.d2[i] - coarse.d2[i]) / 3.0;
  }
  return j;
}

MetricOnlyChart::MetricOnlyChart(Domain domain, MetricFn fn, std::string description, double step,
                                 bool richardson)
    : Chart(std::move(domain), std::move(description)),
      fn_(std::move(fn)),
      step_(step),
      richardson_(richardson) {}

MetricJet MetricOnlyChart::jet(const Point& p) const {
  return finite_difference_jet(fn_, p.coords(), step_, richardson_);
}

Mat MetricOnlyChart::metric(const Point& p) const { return fn_(p.coords()); }

MetricOnlyChart finite_difference_view(const Chart& chart, double step, bool richardson) {
  // The view borrows `chart`; callers keep it alive.
  const Chart* source = &chart;
  return MetricOnlyChart(
      chart.domain(), [source](const Vec& c) { return source->metric(Point::from_coords(c)); },
      "fd(" + chart.description() + ")", step, richardson);
}

CollarChart collar_chart(const CollarMetric& c) {
  return CollarChart(
      c.cross_section(), c.interval(), [c](const Vec& x, double t) { return c.jet(x, t); },
      c.description());
}

CollarChart round_sphere_chart(int n, double margin) {
  const CollarMetric c = make_warped_metric(Profile::sine(1.0, 1.0, 0.0), n,
                                             Interval{margin, std::numbers::pi - margin});
  return CollarChart(
      c.cross_section(), c.interval(), [c](const Vec& x, double t) { return c.jet(x, t); },
      "round S^" + std::to_string(n));
}

CollarChart flat_torus_chart(int n) {
  if (n < 2 || n > kMaxDim) fail(ErrorKind::InvalidInput, "flat torus dimension out of range");
  CrossSection section{CrossSectionKind::Flat, n - 1, 0.0};
  const int m = n - 1;
  return CollarChart(
      section, Interval{0.0, 1.0},
      [m](const Vec&, double) {
        CollarJet j = CollarJet::zero(m);
        j.value = Mat::Identity(m, m);
        return j;
      },
      "flat T^" + std::to_string(n), true);
}

void require_positive_definite(const Mat& g, const std::string& where) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success || !g.allFinite()) {
    fail(ErrorKind::NotPositiveDefinite, "metric is not positive definite at " + where);
  }
}

Mat evaluate_metric(const Chart& chart, const Point& p) {
  if (p.dim() != chart.dim()) {
    fail(ErrorKind::DimensionMismatch, "point dimension " + std::to_string(p.dim()) +
                                           " does not match chart dimension " +
                                           std::to_string(chart.dim()));
  }
  const Vec c = p.coords();
  if (!chart.domain().contains(c)) {
    fail(ErrorKind::OutOfDomain, "point " + format_vector(c) + " outside " + chart.description());
  }
  Mat g = chart.metric(p);
  require_positive_definite(g, format_vector(c));
  return g;
}

}  // namespace splineglue
