#include "splineglue/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splineglue/errors.hpp"

namespace splineglue {

double Christoffel::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Riemann::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Riemann Riemann::transformed(const Mat& f) const {
  // Contract one slot at a time; each pass moves the slot being replaced to
  // the end so the same index routine applies.
  const int n = n_;
  Riemann cur = *this;
  for (int pass = 0; pass < 4; ++pass) {
    Riemann next(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int d = 0; d < n; ++d) s += cur(d, a, b, c) * f(d, i);
            next(a, b, c, i) = s;
          }
    cur = std::move(next);
  }
  return cur;
}

namespace {

// Gamma_{l a b} = 1/2 (d_a g_{lb} + d_b g_{la} - d_l g_{ab})
double lowered_gamma(const MetricJet& j, int l, int a, int b) {
  return 0.5 * (j.dg[a](l, b) + j.dg[b](l, a) - j.dg[l](a, b));
}

// d_m Gamma_{l a b}
double lowered_gamma_derivative(const MetricJet& j, int m, int l, int a, int b) {
  return 0.5 * (j.dd(m, a)(l, b) + j.dd(m, b)(l, a) - j.dd(m, l)(a, b));
}

}  // namespace

Christoffel christoffel(const MetricJet& j) {
  const int n = j.dim();
  Eigen::LLT<Mat> llt(j.g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::NotPositiveDefinite, "metric not positive definite");
  const Mat ginv = llt.solve(Mat::Identity(n, n));
  Christoffel gamma(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Vec low(n);
      for (int l = 0; l < n; ++l) low(l) = lowered_gamma(j, l, a, b);
      const Vec up = ginv * low;
      for (int c = 0; c < n; ++c) {
        gamma(c, a, b) = up(c);
        gamma(c, b, a) = up(c);
      }
    }
  return gamma;
}

Christoffel christoffel(const Chart& chart, const Point& p) {
  evaluate_metric(chart, p);
  return christoffel(chart.jet(p));
}

CurvatureAtPoint curvature_from_jet(const MetricJet& j, const Point& p) {
  const int n = j.dim();
  Eigen::LLT<Mat> llt(j.g);
  if (llt.info() != Eigen::Success || !j.g.allFinite()) {
    fail(ErrorKind::NotPositiveDefinite, "metric not positive definite at " + format_vector(p.coords()));
  }
  const Mat ginv = llt.solve(Mat::Identity(n, n));
  const Christoffel gamma = christoffel(j);

  // Lowered Christoffels, [l][a][b].
  std::vector<double> low(static_cast<std::size_t>(n) * n * n);
  auto L = [&](int l, int a, int b) -> double& {
    return low[(static_cast<std::size_t>(l) * n + a) * n + b];
  };
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) L(l, a, b) = lowered_gamma(j, l, a, b);

  CurvatureAtPoint out;
  out.point = p;
  out.g = j.g;
  out.riemann = Riemann(n);
  Riemann& R = out.riemann;
  // R_abcd = g_{d rho} R^rho_{cab}, with
  // R^rho_{sigma mu nu} = d_mu G^rho_{nu sigma} - d_nu G^rho_{mu sigma}
  //                       + G^rho_{mu l} G^l_{nu sigma} - G^rho_{nu l} G^l_{mu sigma}.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = lowered_gamma_derivative(j, a, d, b, c) -
                     lowered_gamma_derivative(j, b, d, a, c);
          for (int k = 0; k < n; ++k) {
            s -= j.dg[a](d, k) * gamma(k, b, c);
            s += j.dg[b](d, k) * gamma(k, a, c);
            s += L(d, a, k) * gamma(k, b, c);
            s -= L(d, b, k) * gamma(k, a, c);
          }
          R(a, b, c, d) = s;
        }
    }

  out.ricci = Mat::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int d = 0; d < n; ++d) s += ginv(a, d) * R(a, b, c, d);
      out.ricci(b, c) = s;
    }

  const Mat lower = llt.matrixL();
  out.frame = lower.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
  out.frame_riemann = R.transformed(out.frame);
  out.frame_ricci = Mat::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += out.frame_riemann(a, b, c, a);
      out.frame_ricci(b, c) = s;
    }
  out.frame_ricci = 0.5 * (out.frame_ricci + out.frame_ricci.transpose()).eval();
  return out;
}

CurvatureAtPoint curvature_at(const Chart& chart, const Point& p) {
  evaluate_metric(chart, p);
  return curvature_from_jet(chart.jet(p), p);
}

double SymmetryResiduals::max() const {
  return std::max({antisymmetry_ab, antisymmetry_cd, pair, bianchi});
}

SymmetryResiduals riemann_residuals(const Riemann& R) {
  const int n = R.dim();
  const double scale = R.max_abs();
  SymmetryResiduals r;
  if (scale == 0.0) return r;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          r.antisymmetry_ab = std::max(r.antisymmetry_ab, std::abs(R(a, b, c, d) + R(b, a, c, d)));
          r.antisymmetry_cd = std::max(r.antisymmetry_cd, std::abs(R(a, b, c, d) + R(a, b, d, c)));
          r.pair = std::max(r.pair, std::abs(R(a, b, c, d) - R(c, d, a, b)));
          r.bianchi = std::max(r.bianchi, std::abs(R(a, b, c, d) + R(b, c, a, d) + R(c, a, b, d)));
        }
  r.antisymmetry_ab /= scale;
  r.antisymmetry_cd /= scale;
  r.pair /= scale;
  r.bianchi /= scale;
  return r;
}

namespace {

double curvature_form(const Riemann& R, const Vec& u, const Vec& v, const Vec& w, const Vec& z) {
  const int n = R.dim();
  double s = 0.0;
  for (int a = 0; a < n; ++a) {
    if (u(a) == 0.0) continue;
    for (int b = 0; b < n; ++b) {
      if (v(b) == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        if (w(c) == 0.0) continue;
        for (int d = 0; d < n; ++d) s += R(a, b, c, d) * u(a) * v(b) * w(c) * z(d);
      }
    }
  }
  return s;
}

void require_size(const CurvatureAtPoint& c, const Vec& v) {
  if (v.size() != c.dim()) {
    fail(ErrorKind::DimensionMismatch, "vector length " + std::to_string(v.size()) +
                                           " does not match dimension " + std::to_string(c.dim()));
  }
}

}  // namespace

double sectional(const CurvatureAtPoint& c, const Vec& u, const Vec& v) {
  require_size(c, u);
  require_size(c, v);
  const double uu = u.dot(c.g * u);
  const double vv = v.dot(c.g * v);
  const double uv = u.dot(c.g * v);
  const double area2 = uu * vv - uv * uv;
  if (!(area2 >= 1e-14 * uu * vv) || !(uu > 0.0) || !(vv > 0.0)) {
    fail(ErrorKind::DegeneratePlane, "plane spanned by " + format_vector(u) + " and " +
                                         format_vector(v) + " is degenerate");
  }
  return curvature_form(c.riemann, u, v, v, u) / area2;
}

double sectional(const Chart& chart, const Point& p, const Vec& u, const Vec& v) {
  return sectional(curvature_at(chart, p), u, v);
}

Mat jacobi_operator(const CurvatureAtPoint& c, const Vec& v) {
  require_size(c, v);
  const int n = c.dim();
  const double vv = v.dot(c.g * v);
  if (std::abs(vv - 1.0) > 1e-8) {
    fail(ErrorKind::InvalidInput, "jacobi_operator needs a g-unit vector, |v|^2 = " + std::to_string(vv));
  }
  std::vector<Vec> basis{v};
  for (int i = 0; i < n && static_cast<int>(basis.size()) < n; ++i) {
    Vec e = Vec::Zero(n);
    e(i) = 1.0;
    for (const Vec& b : basis) e -= b.dot(c.g * e) * b;
    // Modified Gram-Schmidt, second pass for stability.
    for (const Vec& b : basis) e -= b.dot(c.g * e) * b;
    const double norm2 = e.dot(c.g * e);
    if (norm2 < 1e-16) continue;
    basis.push_back(e / std::sqrt(norm2));
  }
  Mat j(n - 1, n - 1);
  for (int i = 1; i < n; ++i)
    for (int k = 1; k < n; ++k) j(i - 1, k - 1) = curvature_form(c.riemann, basis[i], v, v, basis[k]);
  return 0.5 * (j + j.transpose());
}

Mat jacobi_operator(const Chart& chart, const Point& p, const Vec& v) {
  return jacobi_operator(curvature_at(chart, p), v);
}

Mat frame_jacobi_operator(const CurvatureAtPoint& c, const Vec& w) {
  const int n = c.dim();
  const Riemann& R = c.frame_riemann;
  Mat m = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int d = a; d < n; ++d) {
      double s = 0.0;
      for (int b = 0; b < n; ++b)
        for (int cc = 0; cc < n; ++cc) s += R(a, b, cc, d) * w(b) * w(cc);
      m(a, d) = s;
      m(d, a) = s;
    }
  Mat wm(n, 1);
  wm.col(0) = w;
  Eigen::HouseholderQR<Mat> qr(wm);
  const Mat q = qr.householderQ();
  const Mat perp = q.rightCols(n - 1);
  Mat j = perp.transpose() * m * perp;
  return 0.5 * (j + j.transpose());
}

Vec ascending_eigenvalues(const Mat& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::DimensionMismatch, "eigenvalues of a non-square matrix");
  if (a.size() == 0) return Vec(0);
  if (!a.allFinite()) fail(ErrorKind::InvalidInput, "matrix has non-finite entries");
  if (asymmetry(a) > 1e-9) {
    fail(ErrorKind::NonSymmetric, "operator is not symmetric (relative asymmetry " +
                                      std::to_string(asymmetry(a)) + ")");
  }
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double k_positive_sum(const Mat& a, int k) {
  if (k < 1 || k > a.rows()) {
    fail(ErrorKind::InvalidInput, "k = " + std::to_string(k) + " outside [1, " +
                                      std::to_string(a.rows()) + "]");
  }
  const Vec ev = ascending_eigenvalues(a);
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += ev(i);
  return s;
}

Vec ricci_eigenvalues(const CurvatureAtPoint& c) { return ascending_eigenvalues(c.frame_ricci); }

namespace {

double jacobi_eigensum(const CurvatureAtPoint& c, const Vec& w, int k) {
  const Mat j = frame_jacobi_operator(c, w);
  Eigen::SelfAdjointEigenSolver<Mat> es(j, Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues();
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += ev(i);
  return s;
}

struct DirectionSet {
  std::vector<Vec> base;
  std::vector<Vec> perturb;
};

DirectionSet direction_set(int n, const SamplingPlan& plan) {
  return {sphere_directions(n, plan.directions),
          sphere_directions(n, plan.refine_count, plan.directions)};
}

DirectionalMinimum ric_k_with(const CurvatureAtPoint& c, int k, const SamplingPlan& plan,
                              const DirectionSet& dirs) {
  DirectionalMinimum best;
  if (k == c.dim() - 1) {
    // Ric_{n-1}(v) = Ric(v, v): the minimum is the smallest Ricci eigenvalue, no sampling needed.
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (c.frame_ricci + c.frame_ricci.transpose()));
    best.value = es.eigenvalues()(0);
    best.frame_direction = es.eigenvectors().col(0);
    best.direction = c.frame * best.frame_direction;
    return best;
  }
  best.value = std::numeric_limits<double>::infinity();
  for (const Vec& w : dirs.base) {
    const double v = jacobi_eigensum(c, w, k);
    if (v < best.value) {
      best.value = v;
      best.frame_direction = w;
    }
  }
  double radius = plan.refine_radius;
  for (int round = 0; round < plan.refine_rounds; ++round) {
    const Vec center = best.frame_direction;
    for (const Vec& p : dirs.perturb) {
      Vec q = p - p.dot(center) * center;
      const double norm = q.norm();
      if (norm < 1e-9) continue;
      Vec w = std::cos(radius) * center + std::sin(radius) * (q / norm);
      w.normalize();
      const double v = jacobi_eigensum(c, w, k);
      if (v < best.value) {
        best.value = v;
        best.frame_direction = w;
      }
    }
    radius *= 0.5;
  }
  best.direction = c.frame * best.frame_direction;
  return best;
}

void check_ric_k(int n, int k) {
  if (k < 1 || k > n - 1) {
    fail(ErrorKind::InvalidInput,
         "Ric_k needs 1 <= k <= n-1; got k = " + std::to_string(k) + ", n = " + std::to_string(n));
  }
}

void check_sc_k(int n, int k) {
  if (k < 1 || k > n) {
    fail(ErrorKind::InvalidInput,
         "Sc_k needs 1 <= k <= n; got k = " + std::to_string(k) + ", n = " + std::to_string(n));
  }
}

}  // namespace

DirectionalMinimum ric_k_at(const CurvatureAtPoint& c, int k, const SamplingPlan& plan) {
  check_ric_k(c.dim(), k);
  plan.validate();
  return ric_k_with(c, k, plan, direction_set(c.dim(), plan));
}

double sc_k_at(const CurvatureAtPoint& c, int k) {
  check_sc_k(c.dim(), k);
  return k_positive_sum(c.frame_ricci, k);
}

CurvatureWitness ric_k_min(const Chart& chart, int k, const SamplingPlan& plan,
                           const std::vector<Point>& points) {
  check_ric_k(chart.dim(), k);
  plan.validate();
  if (points.empty()) fail(ErrorKind::EmptySampling, "no sample points");
  const DirectionSet dirs = direction_set(chart.dim(), plan);
  std::vector<DirectionalMinimum> results(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    results[i] = ric_k_with(curvature_at(chart, points[i]), k, plan, dirs);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].value < results[best].value) best = i;
  }
  return {results[best].value, points[best], results[best].direction};
}

CurvatureWitness ric_k_min(const Chart& chart, int k, const SamplingPlan& plan) {
  return ric_k_min(chart, k, plan, chart_grid(chart, plan.grid_per_axis, plan.t_nodes));
}

CurvatureWitness sc_k_min(const Chart& chart, int k, const std::vector<Point>& points) {
  check_sc_k(chart.dim(), k);
  if (points.empty()) fail(ErrorKind::EmptySampling, "no sample points");
  std::vector<double> values(points.size());
  parallel_for(points.size(),
               [&](std::size_t i) { values[i] = sc_k_at(curvature_at(chart, points[i]), k); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return {values[best], points[best], Vec(0)};
}

CurvatureWitness sc_k_min(const Chart& chart, int k, const SamplingPlan& plan) {
  plan.validate();
  return sc_k_min(chart, k, chart_grid(chart, plan.grid_per_axis, plan.t_nodes));
}

}  // namespace splineglue
