#pragma once

#include <array>
#include <complex>
#include <vector>

#include "threelines/geometry.hpp"
#include "threelines/mesh.hpp"
#include "threelines/solver.hpp"

namespace threelines::surface {

struct Spinors {
  cplx K1, K2, dK1, dK2;
};

struct WeierstrassData {
  cplx k1, k2, dk1, dk2;
  cplx g;         // k2 / k1, infinite where k1 vanishes
  cplx omega_dz;  // z^-2 (z-1)^-2 k1^2
  cplx Q_dz2;     // z^-2 (z-1)^-2 (k1 k2' - k1' k2)
};

struct Forms {
  double I = 0;                 // conformal factor: I = I (du^2 + dv^2)
  std::array<double, 4> II{};   // row-major 2x2 in (u, v), z = u + iv
};

struct QuadratureOptions {
  double tol = 1e-11;          // absolute, per coordinate and per segment
  double clearance = 1e-3;     // minimal distance of a path from 0 and 1
  int max_depth = 40;
};

// Immutable after construction; safe to share between threads.
class WeierstrassEvaluator {
 public:
  WeierstrassEvaluator(const solver::Prepared& prep, const solver::Abc& abc, cplx z0 = cplx(0.0, 1.0),
                       QuadratureOptions quad = {});

  const solver::Prepared& prepared() const { return prep_; }
  const solver::Abc& abc() const { return abc_; }
  cplx basepoint() const { return z0_; }
  const QuadratureOptions& quadrature() const { return quad_; }

  Spinors spinor_K(cplx z) const;
  WeierstrassData weierstrass_at(cplx z) const;
  // (1-g^2, i(1+g^2), 2g) omega / dz computed from the spinors, finite at poles of g.
  std::array<cplx, 3> integrand(cplx z) const;
  // Re of the integral along the polyline z0 -> waypoints... -> z, relative to x(z0) = 0.
  Vec3 immerse(cplx z, const std::vector<cplx>& waypoints = {}) const;
  // Re of the integral along one straight segment; err receives the quadrature estimate.
  Vec3 integrate_segment(cplx from, cplx to, double* err = nullptr) const;

  Vec3 gauss_map(cplx z) const;
  Forms first_second_forms(cplx z) const;

 private:
  solver::Prepared prep_;
  solver::Abc abc_;
  cplx z0_;
  QuadratureOptions quad_;
};

struct Window {
  double x_min = -2.0, x_max = 3.0, y_max = 2.5;
  double r_excl = 0.05;
};

struct MeshOptions {
  int resolution = 64;  // cells along the real direction; the grid is square
  Window window;
  int threads = 0;      // 0 picks the hardware concurrency
};

// Grid mesh of the window, integrated along a breadth-first spanning tree of grid edges, then
// translated so that the line fitted to segment 2 is the x1-axis.
SurfaceMesh generate_mesh(const WeierstrassEvaluator& ev, const MeshOptions& opt = {});

struct LineFit {
  geometry::OrientedLine line;
  double residual = 0;  // smallest / largest singular value of the centred point cloud
  double scale = 0;     // largest singular value over sqrt(n)
  double max_deviation = 0;
};

// Principal-axis fit, oriented along increasing Re z.
LineFit fit_line(const SurfaceMesh& mesh, int tag);

enum class End { zero, one, infinity };
const char* to_string(End e);

struct EndAsymptotics {
  End end = End::zero;
  double A = 0;           // Richardson value from radii 1e-3 and 1e-4
  double alpha = 0;       // from the input lift
  double residual = 0;    // |raw value at the smaller radius - input distance|
  double richardson_gap = 0;
};

EndAsymptotics fit_end_asymptotics(const WeierstrassEvaluator& ev, End end);

struct CurvatureStats {
  double max_abs = 0;
  double rms = 0;
  int samples = 0;
};

// Mean curvature from mesh positions alone, by central differences on the conformal grid
// (order 2: five-point stencil, order 4: nine-point cross). Only vertices whose stencil stays at
// distance >= margin from 0 and 1 are sampled: near the punctures x grows like |z|^-alpha and
// no fixed-step stencil resolves it.
CurvatureStats fd_mean_curvature(const SurfaceMesh& mesh, double margin, int order = 4);

}  // namespace threelines::surface
