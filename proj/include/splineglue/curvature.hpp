#pragma once

#include <vector>

#include "splineglue/chart.hpp"
#include "splineglue/linalg.hpp"
#include "splineglue/sampling.hpp"

namespace splineglue {

/// Gamma^c_{ab}, stored at [c][a][b].
class Christoffel {
 public:
  explicit Christoffel(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}
  int dim() const { return n_; }
  double operator()(int c, int a, int b) const { return data_[index(c, a, b)]; }
  double& operator()(int c, int a, int b) { return data_[index(c, a, b)]; }
  double max_abs() const;

 private:
  std::size_t index(int c, int a, int b) const {
    return (static_cast<std::size_t>(c) * n_ + a) * n_ + b;
  }
  int n_;
  std::vector<double> data_;
};

Christoffel christoffel(const MetricJet& jet);
/// Checked: OutOfDomain if p lies outside the chart.
Christoffel christoffel(const Chart& chart, const Point& p);

/// Fully lowered 4-tensor R(a, b, c, d) with K(u, v) = R(u, v, v, u) / |u ^ v|^2.
class Riemann {
 public:
  explicit Riemann(int n = 0) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
  int dim() const { return n_; }
  double operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }
  double& operator()(int a, int b, int c, int d) { return data_[index(a, b, c, d)]; }
  double max_abs() const;
  /// Components in the basis given by the columns of `frame`.
  Riemann transformed(const Mat& frame) const;

 private:
  std::size_t index(int a, int b, int c, int d) const {
    return ((static_cast<std::size_t>(a) * n_ + b) * n_ + c) * n_ + d;
  }
  int n_;
  std::vector<double> data_;
};

struct CurvatureAtPoint {
  Point point;
  Mat g;
  Riemann riemann;     // coordinate components
  Mat ricci;           // coordinate components
  Mat frame;           // columns are a g-orthonormal basis
  Riemann frame_riemann;
  Mat frame_ricci;

  int dim() const { return static_cast<int>(g.rows()); }
};

CurvatureAtPoint curvature_from_jet(const MetricJet& jet, const Point& p = {});
CurvatureAtPoint curvature_at(const Chart& chart, const Point& p);

/// Riemann-tensor identity residuals relative to max |R| (zero for flat).
struct SymmetryResiduals {
  double antisymmetry_ab = 0.0;
  double antisymmetry_cd = 0.0;
  double pair = 0.0;
  double bianchi = 0.0;
  double max() const;
};
SymmetryResiduals riemann_residuals(const Riemann& r);

/// Sectional curvature of span{u, v} (coordinate vectors). DegeneratePlane
/// when |u ^ v|^2 < 1e-14 g(u,u) g(v,v).
double sectional(const CurvatureAtPoint& c, const Vec& u, const Vec& v);
double sectional(const Chart& chart, const Point& p, const Vec& u, const Vec& v);

/// Matrix of e -> R(e, v, v, .) on a g-orthonormal basis of v-perp, the basis
/// obtained by Gram-Schmidt of the coordinate axes after v. v must be g-unit.
Mat jacobi_operator(const CurvatureAtPoint& c, const Vec& v);
Mat jacobi_operator(const Chart& chart, const Point& p, const Vec& v);

/// Jacobi operator for a unit direction w given in the orthonormal frame.
Mat frame_jacobi_operator(const CurvatureAtPoint& c, const Vec& w);

/// Symmetric-only eigen solve, ascending. NonSymmetric beyond 1e-9 relative.
Vec ascending_eigenvalues(const Mat& a);

/// Sum of the k smallest eigenvalues; positive iff the form is k-positive.
double k_positive_sum(const Mat& a, int k);

/// Eigenvalues of the Ricci endomorphism, ascending.
Vec ricci_eigenvalues(const CurvatureAtPoint& c);

struct DirectionalMinimum {
  double value = 0.0;
  Vec frame_direction;  // unit, orthonormal-frame components
  Vec direction;        // coordinate components, g-unit
};

/// min over sampled unit v of the k-eigensum of the Jacobi operator, with the
/// local refinement rounds of the plan. For k = n-1 the sum is Ric(v, v) and
/// the exact smallest Ricci eigenvalue is returned instead.
DirectionalMinimum ric_k_at(const CurvatureAtPoint& c, int k, const SamplingPlan& plan);

/// Sum of the k smallest Ricci eigenvalues at one point.
double sc_k_at(const CurvatureAtPoint& c, int k);

struct CurvatureWitness {
  double value = 0.0;
  Point point;
  Vec direction;  // empty for Sc_k
};

/// Minimum over the given points (Ric_k: and sampled directions). Reduction
/// in index order; ties keep the first index. EmptySampling if no points.
CurvatureWitness ric_k_min(const Chart& chart, int k, const SamplingPlan& plan,
                           const std::vector<Point>& points);
CurvatureWitness ric_k_min(const Chart& chart, int k, const SamplingPlan& plan);
CurvatureWitness sc_k_min(const Chart& chart, int k, const std::vector<Point>& points);
CurvatureWitness sc_k_min(const Chart& chart, int k, const SamplingPlan& plan);

}  // namespace splineglue
