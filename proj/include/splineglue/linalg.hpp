#pragma once

#include <Eigen/Dense>

#include <string>

namespace splineglue {

// Manifold dimensions handled here are small; bounded-size Eigen types keep
// every matrix on the stack.
inline constexpr int kMaxDim = 8;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim,
                          kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Symmetric bilinear form on cross-section tangent vectors, in coordinates.
using SymForm = Mat;

/// Largest absolute entry; the norm used for all C^0/C^1 closeness reports.
inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// ||A - A^T|| relative to max(1, ||A||).
inline double asymmetry(const Mat& m) {
  const double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.transpose()) / scale;
}

std::string format_vector(const Vec& v);

}  // namespace splineglue
