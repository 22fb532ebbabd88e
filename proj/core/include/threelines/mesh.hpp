#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace threelines {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;

struct MeshVertex {
  cplx z;
  Vec3 x = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  int tag = 0;  // 0 interior, k for the boundary segment k
};

struct SurfaceMesh {
  std::vector<MeshVertex> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::string> notes;

  // Structured grids only: vertex id of node (i, j) at grid_index[j * grid_nx + i], -1 if absent.
  int grid_nx = 0, grid_ny = 0;
  double grid_step = 0;
  std::vector<int> grid_index;

  std::vector<int> tagged(int tag) const;
};

// Wavefront OBJ with v/vn/f records; boundary vertices are listed after "# seg k" comments.
void write_obj(std::ostream& out, const SurfaceMesh& mesh);
// Binary little-endian PLY with per-vertex position, normal and tag.
void write_ply(std::ostream& out, const SurfaceMesh& mesh);

// Throws if a face is out of range or a normal is not unit length.
void validate(const SurfaceMesh& mesh);

}  // namespace threelines
