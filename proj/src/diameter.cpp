#include "splineglue/diameter.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "splineglue/errors.hpp"
#include "splineglue/sampling.hpp"

namespace splineglue {

namespace {

// Node i of an axis sits at fine index 2i; a midpoint between neighbours at
// an odd fine index. Periodic axes wrap on both levels.
struct Lattice {
  int n = 0;
  int res = 0;
  std::vector<double> lo, step;
  std::vector<bool> periodic;
  std::vector<int> fine_size;

  std::size_t node_count() const {
    std::size_t c = 1;
    for (int a = 0; a < n; ++a) c *= static_cast<std::size_t>(res);
    return c;
  }
  std::size_t fine_count() const {
    std::size_t c = 1;
    for (int a = 0; a < n; ++a) c *= static_cast<std::size_t>(fine_size[a]);
    return c;
  }
  std::vector<int> unpack(std::size_t id, int base) const {
    std::vector<int> idx(n);
    for (int a = n - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(id % base);
      id /= base;
    }
    return idx;
  }
  std::vector<int> unpack_fine(std::size_t id) const {
    std::vector<int> idx(n);
    for (int a = n - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(id % fine_size[a]);
      id /= fine_size[a];
    }
    return idx;
  }
  std::size_t pack_fine(const std::vector<int>& idx) const {
    std::size_t id = 0;
    for (int a = 0; a < n; ++a) id = id * fine_size[a] + idx[a];
    return id;
  }
  Point fine_point(const std::vector<int>& idx) const {
    Vec c(n);
    for (int a = 0; a < n; ++a) c(a) = lo[a] + 0.5 * step[a] * idx[a];
    return Point::from_coords(c);
  }
};

}  // namespace

DiameterEstimate diameter_estimate(const Chart& chart, int resolution) {
  if (resolution < 3) fail(ErrorKind::InvalidInput, "diameter resolution must be at least 3");
  const Domain& dom = chart.domain();
  Lattice lat;
  lat.n = chart.dim();
  lat.res = resolution;
  for (int a = 0; a < lat.n; ++a) {
    const double lo = dom.lo(a);
    const double hi = dom.hi(a);
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
      fail(ErrorKind::InvalidInput, "diameter needs a bounded chart box");
    }
    const bool per = dom.periodic[a];
    lat.lo.push_back(lo);
    lat.periodic.push_back(per);
    lat.step.push_back(per ? (hi - lo) / resolution : (hi - lo) / (resolution - 1));
    lat.fine_size.push_back(per ? 2 * resolution : 2 * resolution - 1);
  }

  // Metric on the fine lattice (nodes and midpoints), upper triangle packed.
  const int n = lat.n;
  const std::size_t packed = static_cast<std::size_t>(n) * (n + 1) / 2;
  std::vector<double> metric(lat.fine_count() * packed);
  parallel_for(lat.fine_count(), [&](std::size_t id) {
    const Mat g = chart.metric(lat.fine_point(lat.unpack_fine(id)));
    std::size_t o = id * packed;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) metric[o++] = g(a, b);
  });

  std::vector<std::vector<int>> stencil;
  {
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) total *= 3;
    for (std::size_t s = 0; s < total; ++s) {
      std::vector<int> d = lat.unpack(s, 3);
      bool zero = true;
      for (int& v : d) {
        v -= 1;
        zero = zero && v == 0;
      }
      if (!zero) stencil.push_back(d);
    }
  }

  const std::size_t count = lat.node_count();
  auto edge = [&](const std::vector<int>& node, const std::vector<int>& d, std::size_t& target)
      -> double {
    std::vector<int> mid(n), next(n);
    for (int a = 0; a < n; ++a) {
      int j = node[a] + d[a];
      if (lat.periodic[a]) {
        j = (j + lat.res) % lat.res;
      } else if (j < 0 || j >= lat.res) {
        return -1.0;
      }
      next[a] = j;
      int f = 2 * node[a] + d[a];
      if (lat.periodic[a]) f = (f + lat.fine_size[a]) % lat.fine_size[a];
      mid[a] = f;
    }
    std::size_t id = 0;
    for (int a = 0; a < n; ++a) id = id * lat.res + next[a];
    target = id;
    const double* g = &metric[lat.pack_fine(mid) * packed];
    double q = 0.0;
    std::size_t o = 0;
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b, ++o) {
        const double term = g[o] * d[a] * lat.step[a] * d[b] * lat.step[b];
        q += a == b ? term : 2.0 * term;
      }
    }
    return std::sqrt(std::max(q, 0.0));
  };

  auto sweep = [&](std::size_t source, std::size_t& farthest) {
    std::vector<double> dist(count, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
      const auto [du, u] = queue.top();
      queue.pop();
      if (du > dist[u]) continue;
      const std::vector<int> node = lat.unpack(u, lat.res);
      for (const auto& d : stencil) {
        std::size_t v = 0;
        const double w = edge(node, d, v);
        if (w < 0.0) continue;
        if (du + w < dist[v]) {
          dist[v] = du + w;
          queue.push({dist[v], v});
        }
      }
    }
    double best = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::isfinite(dist[i])) {
        std::ostringstream os;
        os << "node " << i << " is unreachable from node " << source;
        fail(ErrorKind::DisconnectedGraph, os.str());
      }
      if (dist[i] > best) {
        best = dist[i];
        farthest = i;
      }
    }
    return best;
  };

  auto node_point = [&](std::size_t id) {
    std::vector<int> idx = lat.unpack(id, lat.res);
    for (int& v : idx) v *= 2;
    return lat.fine_point(idx);
  };

  // Start from a corner, then keep jumping to the farthest node.
  DiameterEstimate out;
  out.resolution = resolution;
  out.nodes = count;
  std::size_t source = 0;
  std::size_t far = 0;
  for (int round = 0; round < 6; ++round) {
    const double e = sweep(source, far);
    if (e <= out.value) break;
    out.value = e;
    out.from = node_point(source);
    out.to = node_point(far);
    source = far;
  }
  return out;
}

}  // namespace splineglue
