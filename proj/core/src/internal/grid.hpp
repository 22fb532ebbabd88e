#pragma once

// Shared by the minimal-surface and trinoid mesh builders; not installed.

#include <algorithm>
#include <atomic>
#include <complex>
#include <exception>
#include <thread>
#include <vector>

#include "threelines/mesh.hpp"
#include "threelines/surface.hpp"

namespace threelines::detail {

inline double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  const double t = len2 > 0.0 ? std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0) : 0.0;
  return std::abs(a + t * d - p);
}

// Runs body(i) for i in [0, n) on a few threads; each index is visited exactly once.
template <class Body>
void parallel_for(int n, int threads, Body body) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(1, n / 64));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i; !failed && (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

// Square grid over the window with holes punched around 0, 1 and a double zero of phi, plus a
// breadth-first spanning tree of grid edges rooted at the node nearest z0. Vertices carry z and
// the boundary tag; faces are counter-clockwise in z.
struct GridTree {
  SurfaceMesh mesh;
  std::vector<int> parent;  // -1 at the root
  std::vector<int> order;   // breadth-first
  int root = -1;
};

GridTree build_grid_tree(const surface::WeierstrassEvaluator& ev, const surface::MeshOptions& opt);

}  // namespace threelines::detail
