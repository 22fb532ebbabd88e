#include "threelines/mesh.hpp"

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <bit>
#include <cstring>
#include <ostream>

#include "threelines/error.hpp"

namespace threelines {

std::vector<int> SurfaceMesh::tagged(int tag) const {
  std::vector<int> ids;
  for (int i = 0; i < static_cast<int>(vertices.size()); ++i) {
    if (vertices[i].tag == tag) ids.push_back(i);
  }
  return ids;
}

void validate(const SurfaceMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  for (const auto& f : mesh.faces) {
    for (int v : f) {
      if (v < 0 || v >= n) throw NumericalFailure("face refers to a missing vertex");
    }
  }
  for (const auto& v : mesh.vertices) {
    if (!v.x.allFinite()) throw NumericalFailure("non-finite vertex position");
    if (std::abs(v.normal.norm() - 1.0) > 1e-9) throw NumericalFailure("normal is not unit length");
  }
}

void write_obj(std::ostream& out, const SurfaceMesh& mesh) {
  out.precision(17);
  for (const auto& note : mesh.notes) out << "# " << note << '\n';
  for (const auto& v : mesh.vertices) out << "v " << v.x.x() << ' ' << v.x.y() << ' ' << v.x.z() << '\n';
  for (const auto& v : mesh.vertices) {
    out << "vn " << v.normal.x() << ' ' << v.normal.y() << ' ' << v.normal.z() << '\n';
  }
  for (int tag = 1; tag <= 3; ++tag) {
    const auto ids = mesh.tagged(tag);
    if (ids.empty()) continue;
    out << "# seg " << tag << '\n';
    // vertex ids (1-based) on that boundary segment, sixteen per comment line
    for (size_t i = 0; i < ids.size(); i += 16) {
      out << "#";
      for (size_t j = i; j < std::min(ids.size(), i + 16); ++j) out << ' ' << ids[j] + 1;
      out << '\n';
    }
  }
  for (const auto& f : mesh.faces) {
    out << "f";
    for (int v : f) out << ' ' << v + 1 << "//" << v + 1;
    out << '\n';
  }
}

namespace {

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "PLY writer assumes a little-endian host");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

}  // namespace

void write_ply(std::ostream& out, const SurfaceMesh& mesh) {
  out << "ply\nformat binary_little_endian 1.0\n";
  for (const auto& note : mesh.notes) out << "comment " << note << '\n';
  out << "element vertex " << mesh.vertices.size() << '\n'
      << "property double x\nproperty double y\nproperty double z\n"
      << "property float nx\nproperty float ny\nproperty float nz\n"
      << "property uchar tag\n"
      << "element face " << mesh.faces.size() << '\n'
      << "property list uchar int vertex_indices\nend_header\n";
  for (const auto& v : mesh.vertices) {
    for (int k = 0; k < 3; ++k) put<double>(out, v.x[k]);
    for (int k = 0; k < 3; ++k) put<float>(out, static_cast<float>(v.normal[k]));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(v.tag));
  }
  for (const auto& f : mesh.faces) {
    put<std::uint8_t>(out, 3);
    for (int v : f) put<std::int32_t>(out, v);
  }
}

}  // namespace threelines
