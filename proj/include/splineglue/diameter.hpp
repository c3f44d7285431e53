#pragma once

#include <cstddef>

#include "splineglue/chart.hpp"

namespace splineglue {

// Even, so periodic axes contain their antipodal nodes.
inline constexpr int kDefaultDiameterResolution = 8;

struct DiameterEstimate {
  double value = 0.0;
  int resolution = 0;
  std::size_t nodes = 0;
  Point from;
  Point to;
};

/// Graph diameter of the chart box: `resolution` nodes per axis (periodic
/// axes wrap), every node joined to its full 3^n - 1 neighbourhood, edge
/// length sqrt(d^T g(midpoint) d). The largest eccentricity is found by
/// repeated farthest-node sweeps of Dijkstra. Overestimates geodesic distance
/// by a stencil factor that shrinks with resolution.
/// DisconnectedGraph if some node is unreachable; InvalidInput for
/// resolution < 3 or an unbounded domain.
DiameterEstimate diameter_estimate(const Chart& chart, int resolution);

}  // namespace splineglue
