#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "threelines/mesh.hpp"
#include "threelines/solver.hpp"
#include "threelines/surface.hpp"

namespace threelines::trinoid {

using Mat2c = Eigen::Matrix2cd;
using geometry::Lifted;

// End data: growths are 1 - mu.
struct TrinoidSpec {
  double mu0 = 0, mu1 = 0, mu_inf = 0;
  // Replaces the alpha = +-mu0 (beta = +-mu_inf, gamma = +-mu1) lift policy; every lift must be
  // congruent mod 2 to the reduced angle of its end.
  std::optional<Lifted> lift_override;
};

// [r] in (-1, 1] with r - [r] in 2Z.
double reduce_mod2(double r);

// Throws InvalidInput for non-positive or integer growth data.
void validate(const TrinoidSpec& spec);

// alpha = mu0 if mu0 is congruent to |[mu0]| mod 2, otherwise -mu0; likewise beta from mu_inf, gamma from mu1.
Lifted trinoid_lifts(const TrinoidSpec& spec);

// Ends with A alpha / 2 pi = (alpha^2 - 1)/4 and the analogues for (B, beta), (C, gamma).
solver::EndParameters trinoid_rhs(const TrinoidSpec& spec);

struct GrowthCheck {
  bool in_K = false;
  bool nondegenerate = false;
  double nondegeneracy = 0;  // the quartic mu0^4 + mu1^4 + ... - 3
  bool umehara = false;
  bool umehara_equivalent = false;
};

GrowthCheck growth_check(const TrinoidSpec& spec);

struct Quartics {
  double U = 0, V = 0, W = 0;
  double Pi = 0;  // product of the eight (1 +- alpha +- beta +- gamma)
};

Quartics quartics(const Lifted& l);
// Discriminant of Phi(z) = (1-beta^2)/2 z(z-1) - (1-alpha^2)/2 (z-1) + (1-gamma^2)/2 z.
double phi_discriminant(const Lifted& l);

struct TrinoidSolution {
  Lifted lifted;
  solver::PqrSolution pqr;
  bool delta_real = true;  // (U, V, W) delta with eps = +1, otherwise i (U, V, W) delta with eps = -1
  solver::HatLambda hat;
};

// The closed-form admissible (p, q, r), checked against its quadratic system and Lambda_hat.
TrinoidSolution trinoid_pqr(const TrinoidSpec& spec);

// Everything needed to build the conjugate cousin: a configuration whose eps0 realizes the sign
// of the chosen system, the prepared constants and the minimal-surface evaluator.
struct CousinData {
  TrinoidSpec spec;
  geometry::TripleConfig cfg;
  solver::Prepared prep;
  double p = 0, q = 0, r = 0;
  surface::WeierstrassEvaluator ev;
};

CousinData cousin_data(const TrinoidSpec& spec);
// The same ends with (p, q, r) in {(1/2,1/2,-1/2), (1/2,-1/2,1/2), (-1/2,1/2,1/2)}; which = 0, 1, 2.
CousinData half_integer_data(const TrinoidSpec& spec, int which);

struct BryantFrame {
  Mat2c F = Mat2c::Identity();
  cplx z;
  double det_drift = 0;  // |det F - 1|
  int steps = 0;
};

struct OdeOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
};

// Solution of dT/dz = T A(z) along the straight segment with T(from) = identity, where
// A = [[g, -g^2], [1, -g]] i omega / dz.
BryantFrame transport(const surface::WeierstrassEvaluator& ev, cplx from, cplx to, const OdeOptions& opt = {});
// F along the polyline basepoint -> waypoints -> z, with F(basepoint) = identity.
BryantFrame integrate_bryant(const surface::WeierstrassEvaluator& ev, cplx z, const std::vector<cplx>& waypoints = {},
                             const OdeOptions& opt = {});

// Upper half-space point (w = y1 + i y2, y3).
struct HyperbolicPoint {
  cplx w;
  double y3 = 1;
};

// M = F F^* read as y3 = 1 / M11, w = M21 / M11.
HyperbolicPoint cousin_point(const Mat2c& F);
HyperbolicPoint cousin_point_from_hermitian(const Mat2c& M);
Mat2c hermitian_from_point(const HyperbolicPoint& p);
// (x0, x1, x2, x3) with M = [[x0 + x3, x1 + i x2], [x1 - i x2, x0 - x3]].
Eigen::Vector4d hyperboloid(const Mat2c& M);
Vec3 ball_point(const Mat2c& M);
// Hyperbolic Gauss map in the half-space convention above: (F21 g + F22) / (F11 g + F12).
cplx frame_gauss(const surface::WeierstrassEvaluator& ev, const Mat2c& F, cplx z);

// Limits of the frame Gauss map at the ends 0, 1, inf, read off at distance r (chart radius 1/r at
// infinity). These are the asymptotic boundary points in the half-space model.
std::array<cplx, 3> asymptotic_boundary_points(const surface::WeierstrassEvaluator& ev, double r = 1e-4,
                                               const OdeOptions& opt = {});

// G(z) = z + (a1 - a2)^2 / (2 (2z - a1 - a2)); the point at infinity is returned as an infinite real part.
cplx hyperbolic_gauss(cplx z, const solver::PhiPolynomial& phi);
// (G(0), G(1), G(inf)).
std::array<cplx, 3> gauss_end_values(const solver::PhiPolynomial& phi);

struct DistinctnessReport {
  // pairs (0,1), (0,inf), (1,inf)
  std::array<double, 3> tests{};
  std::array<bool, 3> distinct{};
  std::array<bool, 3> distinct_by_gauss{};
  bool agree = true;
};

DistinctnessReport boundary_distinctness(const TrinoidSpec& spec, double tol = 1e-9);

struct EndCoefficients {
  surface::End end = surface::End::zero;
  double c_minus2 = 0, c_minus1 = 0;  // Laurent coefficients of S_z g - 2 Q° in the end chart
  bool embedded = false;
};

// Finite-difference Schwarzian on a circle around the end, Laurent coefficients by DFT.
EndCoefficients embeddedness_check(const surface::WeierstrassEvaluator& ev, surface::End end, double tol = 1e-5);

struct GeodesicPlane {
  Eigen::Vector4d normal = Eigen::Vector4d::Zero();  // Lorentz-unit spacelike
  double residual = 0;                               // max sinh-distance of the fitted points
};

// Least-squares hyperbolic plane through hyperboloid points.
GeodesicPlane fit_plane(const std::vector<Eigen::Vector4d>& points);
double plane_distance(const GeodesicPlane& a, const GeodesicPlane& b);

struct TrinoidMesh {
  SurfaceMesh halfspace;
  SurfaceMesh ball;
  std::array<GeodesicPlane, 3> planes;
  double det_drift = 0;
  double plane_spread = 0;  // largest pairwise plane distance
};

struct TrinoidMeshOptions {
  surface::MeshOptions mesh;
  OdeOptions ode;
  bool reflect = true;  // append the mirror image across the fitted symmetry plane
};

TrinoidMesh trinoid_mesh(const CousinData& data, const TrinoidMeshOptions& opt = {});

}  // namespace threelines::trinoid
