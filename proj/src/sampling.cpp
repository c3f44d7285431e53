#include "splineglue/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include <boost/math/special_functions/erf.hpp>

#include "splineglue/errors.hpp"

namespace splineglue {

SamplingPlan SamplingPlan::doubled() const {
  SamplingPlan p = *this;
  p.grid_per_axis = 2 * grid_per_axis;
  p.t_nodes = 2 * t_nodes - 1;
  return p;
}

void SamplingPlan::validate() const {
  if (grid_per_axis < 1 || t_nodes < 2 || directions < 1) {
    fail(ErrorKind::EmptySampling, "sampling plan needs grid >= 1, t_nodes >= 2, directions >= 1");
  }
  if (refine_rounds < 0 || refine_count < 0 || !(refine_radius >= 0.0)) {
    fail(ErrorKind::InvalidInput, "refinement parameters must be non-negative");
  }
}

std::vector<Vec> unit_cube_sequence(int dim, int count, int offset) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::InvalidInput, "sequence dimension out of range");
  // Generalized golden ratio: root of x^(d+1) = x + 1.
  double phi = 2.0;
  for (int i = 0; i < 60; ++i) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
  Vec alpha(dim);
  for (int j = 0; j < dim; ++j) alpha(j) = std::fmod(std::pow(1.0 / phi, j + 1), 1.0);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    Vec p(dim);
    const double k = static_cast<double>(i + offset + 1);
    for (int j = 0; j < dim; ++j) {
      const double v = 0.5 + k * alpha(j);
      p(j) = v - std::floor(v);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Vec> sphere_directions(int dim, int count, int offset) {
  std::vector<Vec> cube = unit_cube_sequence(dim, count, offset);
  std::vector<Vec> out;
  out.reserve(cube.size());
  for (Vec& p : cube) {
    Vec z(dim);
    for (int j = 0; j < dim; ++j) {
      const double u = std::clamp(p(j), 1e-12, 1.0 - 1e-12);
      z(j) = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
    }
    const double norm = z.norm();
    if (norm < 1e-12) {
      z = Vec::Zero(dim);
      z(0) = 1.0;
    } else {
      z /= norm;
    }
    out.push_back(z);
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {0.5 * (lo + hi)};
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(i + 1 == count ? hi : lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

std::vector<Point> chart_grid(const Chart& chart, int per_axis, int t_nodes) {
  if (per_axis < 1 || t_nodes < 1) fail(ErrorKind::EmptySampling, "empty chart grid");
  const Domain& d = chart.domain();
  const int n = d.dim();
  std::vector<std::vector<double>> axes(n);
  for (int i = 0; i < n; ++i) {
    const int count = i + 1 == n ? t_nodes : per_axis;
    if (d.periodic[i]) {
      for (int k = 0; k < count; ++k) axes[i].push_back(d.lo(i) + (d.hi(i) - d.lo(i)) * k / count);
    } else {
      axes[i] = linspace(d.lo(i), d.hi(i), count);
    }
  }
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  std::vector<Point> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Vec c(n);
    std::size_t rest = flat;
    for (int i = n - 1; i >= 0; --i) {
      c(i) = axes[i][rest % axes[i].size()];
      rest /= axes[i].size();
    }
    out.push_back(Point::from_coords(c));
  }
  return out;
}

unsigned worker_count() {
  if (const char* env = std::getenv("SPLINEGLUE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  constexpr std::size_t kBlock = 16;
  // Keep the lowest-index failure so the reported error does not depend on
  // scheduling.
  std::vector<std::size_t> failed_at(workers, count);
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](unsigned w) {
    for (;;) {
      const std::size_t begin = next.fetch_add(kBlock);
      if (begin >= count) return;
      const std::size_t end = std::min(count, begin + kBlock);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          body(i);
        } catch (...) {
          if (i < failed_at[w]) {
            failed_at[w] = i;
            errors[w] = std::current_exception();
          }
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& th : pool) th.join();
  std::size_t best = count;
  std::exception_ptr first;
  for (unsigned w = 0; w < workers; ++w) {
    if (errors[w] && failed_at[w] < best) {
      best = failed_at[w];
      first = errors[w];
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace splineglue
