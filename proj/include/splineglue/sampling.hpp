#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "splineglue/chart.hpp"
#include "splineglue/linalg.hpp"

namespace splineglue {

struct SamplingPlan {
  int grid_per_axis = 5;   // cross-section nodes per coordinate
  int t_nodes = 21;        // nodes along t per region
  int directions = 200;    // unit directions per point (Ric_k)
  int refine_rounds = 1;
  int refine_count = 50;
  double refine_radius = 0.1;

  /// Same plan with grid_per_axis and t_nodes doubled (t nodes: 2N - 1).
  SamplingPlan doubled() const;
  void validate() const;
};

/// Deterministic low-discrepancy unit vectors in R^dim: an additive
/// recurrence in [0,1)^dim pushed through the inverse normal CDF, then
/// normalized. `offset` skips the first entries of the sequence.
std::vector<Vec> sphere_directions(int dim, int count, int offset = 0);

/// Unit vectors in [0,1)^dim from the same recurrence (no normal transform).
std::vector<Vec> unit_cube_sequence(int dim, int count, int offset = 0);

/// Tensor grid over the chart box: `per_axis` nodes for every coordinate
/// except t, which gets `t_nodes`. Periodic axes exclude the right endpoint.
std::vector<Point> chart_grid(const Chart& chart, int per_axis, int t_nodes);

/// `count` nodes on [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, int count);

/// Runs body(i) for i in [0, count) on a pool of threads. Work is split into
/// contiguous blocks; callers reduce results in index order afterwards.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

unsigned worker_count();

}  // namespace splineglue
