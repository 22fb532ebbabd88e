#pragma once

#include <array>
#include <Eigen/Core>

namespace threelines {

using Vec3 = Eigen::Vector3d;

namespace geometry {

constexpr double kParallelTol = 1e-10;
constexpr double kConcurrentTol = 1e-10;
constexpr double kParallelPlanesTol = 1e-10;

struct OrientedLine {
  Vec3 point = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
};

// Normalizes the direction; throws InvalidInput for a zero or non-finite direction.
OrientedLine make_line(const Vec3& point, const Vec3& direction);

// Angles in units of pi. Field order follows the invariant tuple
// (alpha0, gamma0, beta0, -A, -C, -B, eps0).
struct TripleConfig {
  double alpha0 = 0, gamma0 = 0, beta0 = 0;
  double A = 0, B = 0, C = 0;
  int eps0 = 1;
};

struct FrameAngles {
  double theta = 0, theta_hat = 0;
  double t = 0, t_hat = 0;
  double cos_theta = 0, cos_theta_hat = 0;
};

struct Lifted {
  double alpha = 0, beta = 0, gamma = 0;
};

using LineTriple = std::array<OrientedLine, 3>;

// The spherical-triangle inequalities on (alpha0, beta0, gamma0).
bool in_K(double alpha0, double beta0, double gamma0);

// v = u1 x (-u2) / |u1 x u2|
Vec3 associated_vector(const OrientedLine& l1, const OrientedLine& l2);

// <p2 - p1, v>
double signed_distance(const OrientedLine& l1, const OrientedLine& l2);

// Throws DegenerateInput naming the failed genericity test.
TripleConfig classify_triple(const LineTriple& lines);

// Representative triple: D2 is the x1-axis oriented by -e1, D1 passes through (0,0,-A).
LineTriple lines_from_config(const TripleConfig& cfg);

// Throws InvalidInput if the lifts are not congruent to the configuration angles mod 2.
FrameAngles frame_angles(const TripleConfig& cfg, const Lifted& lifted);

// True when x - ref is an even integer (within 1e-9).
bool congruent_mod2(double x, double ref);

}  // namespace geometry
}  // namespace threelines
