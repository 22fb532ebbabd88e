#include "internal/grid.hpp"

#include <cmath>
#include <queue>

#include "threelines/error.hpp"

namespace threelines::detail {

GridTree build_grid_tree(const surface::WeierstrassEvaluator& ev, const surface::MeshOptions& opt) {
  const surface::Window& w = opt.window;
  if (opt.resolution < 2) throw InvalidInput("mesh resolution must be at least 2");
  if (!(w.x_max > w.x_min && w.y_max > 0.0 && w.r_excl > 0.0)) throw InvalidInput("empty mesh window");
  const cplx z0 = ev.basepoint();
  if (z0.real() < w.x_min || z0.real() > w.x_max || z0.imag() > w.y_max) {
    throw InvalidInput("mesh window does not contain the basepoint");
  }

  const int nx = opt.resolution;
  const double h = (w.x_max - w.x_min) / nx;
  const int ny = std::max(1, static_cast<int>(std::lround(w.y_max / h)));

  // a double zero of phi inside the closed window is a singular point; leave a hole there
  std::vector<cplx> holes{0.0, 1.0};
  const auto& phi = ev.prepared().phi;
  if (phi.root_class == solver::RootClass::double_real) holes.push_back(phi.a1);

  SurfaceMesh mesh;
  mesh.grid_nx = nx + 1;
  mesh.grid_ny = ny + 1;
  mesh.grid_step = h;
  mesh.grid_index.assign(static_cast<size_t>(mesh.grid_nx) * mesh.grid_ny, -1);
  if (holes.size() > 2) mesh.notes.push_back("singular point (double zero of phi) left as a hole");
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const cplx z(w.x_min + i * h, j * h);
      const bool keep = std::all_of(holes.begin(), holes.end(), [&](cplx p) { return std::abs(z - p) >= w.r_excl; });
      if (!keep) continue;
      MeshVertex v;
      v.z = z;
      if (j == 0) v.tag = z.real() < 0.0 ? 1 : (z.real() < 1.0 ? 2 : 3);
      mesh.grid_index[j * mesh.grid_nx + i] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(v);
    }
  }
  const int nv = static_cast<int>(mesh.vertices.size());
  auto id = [&](int i, int j) {
    return (i < 0 || j < 0 || i > nx || j > ny) ? -1 : mesh.grid_index[j * mesh.grid_nx + i];
  };

  // breadth-first spanning tree from the node nearest the basepoint
  int root = -1;
  double best = INFINITY;
  for (int k = 0; k < nv; ++k) {
    const double d = std::abs(mesh.vertices[k].z - z0);
    if (d < best) {
      best = d;
      root = k;
    }
  }
  GridTree out;
  std::vector<int>& parent = out.parent;
  std::vector<int>& order = out.order;
  parent.assign(nv, -2);
  parent[root] = -1;
  std::queue<int> todo;
  todo.push(root);
  while (!todo.empty()) {
    const int k = todo.front();
    todo.pop();
    order.push_back(k);
    const cplx z = mesh.vertices[k].z;
    const int i = static_cast<int>(std::lround((z.real() - w.x_min) / h));
    const int j = static_cast<int>(std::lround(z.imag() / h));
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const int n = id(i + di, j + dj);
      if (n < 0 || parent[n] != -2) continue;
      const cplx zn = mesh.vertices[n].z;
      const bool clear = std::all_of(holes.begin(), holes.end(), [&](cplx p) {
        return segment_distance(p, z, zn) >= std::max(ev.quadrature().clearance, 0.5 * w.r_excl);
      });
      if (!clear) continue;
      parent[n] = k;
      todo.push(n);
    }
  }
  if (static_cast<int>(order.size()) != nv) throw NumericalFailure("mesh grid is not connected around the punctures");

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (a < 0 || b < 0 || c < 0 || d < 0) continue;
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }

  out.root = root;
  out.mesh = std::move(mesh);
  return out;
}

}  // namespace threelines::detail
