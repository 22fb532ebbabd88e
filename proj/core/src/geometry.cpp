#include "threelines/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "threelines/error.hpp"

namespace threelines::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

// Angle between unit vectors in units of pi.
double angle_pi(const Vec3& a, const Vec3& b) {
  const double c = std::clamp(a.dot(b), -1.0, 1.0);
  return std::atan2(a.cross(b).norm(), c) / kPi;
}

void check_pair(const OrientedLine& a, const OrientedLine& b, const char* name) {
  if (a.direction.cross(b.direction).norm() < kParallelTol) {
    throw DegenerateInput("parallel", std::string("lines ") + name + " are parallel");
  }
  if (std::abs(signed_distance(a, b)) < kConcurrentTol) {
    throw DegenerateInput("concurrent", std::string("lines ") + name + " intersect");
  }
}

}  // namespace

OrientedLine make_line(const Vec3& point, const Vec3& direction) {
  const double n = direction.norm();
  if (!(n > 0.0) || !std::isfinite(n) || !point.allFinite()) {
    throw InvalidInput("line needs a finite point and a non-zero direction");
  }
  return {point, direction / n};
}

bool in_K(double a, double b, double g) {
  return a + b + g > 1 && -a + b + g < 1 && a - b + g < 1 && a + b - g < 1;
}

Vec3 associated_vector(const OrientedLine& l1, const OrientedLine& l2) {
  const Vec3 c = l1.direction.cross(-l2.direction);
  const double n = c.norm();
  if (n < kParallelTol) throw DegenerateInput("parallel", "associated vector of parallel lines");
  return c / n;
}

double signed_distance(const OrientedLine& l1, const OrientedLine& l2) {
  return (l2.point - l1.point).dot(associated_vector(l1, l2));
}

TripleConfig classify_triple(const LineTriple& d) {
  check_pair(d[0], d[1], "1,2");
  check_pair(d[1], d[2], "2,3");
  check_pair(d[2], d[0], "3,1");
  Eigen::Matrix3d u;
  u << d[0].direction, d[1].direction, d[2].direction;
  const double det = u.determinant();
  if (std::abs(det) < kParallelPlanesTol) {
    throw DegenerateInput("parallel_planes", "line directions are coplanar");
  }

  TripleConfig cfg;
  cfg.alpha0 = angle_pi(d[0].direction, -d[1].direction);
  cfg.beta0 = angle_pi(d[2].direction, -d[0].direction);
  cfg.gamma0 = angle_pi(d[1].direction, -d[2].direction);
  cfg.A = -signed_distance(d[0], d[1]);
  cfg.B = -signed_distance(d[2], d[0]);
  cfg.C = -signed_distance(d[1], d[2]);
  cfg.eps0 = det > 0 ? 1 : -1;
  return cfg;
}

LineTriple lines_from_config(const TripleConfig& cfg) {
  const double a = cfg.alpha0, b = cfg.beta0, g = cfg.gamma0;
  for (double x : {a, b, g}) {
    if (!(x > 0.0 && x < 1.0)) throw InvalidInput("configuration angles must lie in (0, 1)");
  }
  if (!in_K(a, b, g)) throw InvalidInput("configuration angles violate the spherical-triangle inequalities");
  if (cfg.A == 0.0 || cfg.B == 0.0 || cfg.C == 0.0) throw InvalidInput("A, B, C must be non-zero");
  if (cfg.eps0 != 1 && cfg.eps0 != -1) throw InvalidInput("eps0 must be +1 or -1");

  const double x = std::cos(kPi * g);
  const double y = (std::cos(kPi * b) + std::cos(kPi * a) * std::cos(kPi * g)) / std::sin(kPi * a);
  const double z2 = 1.0 - x * x - y * y;
  if (!(z2 > 0.0)) throw InvalidInput("configuration angles do not close a spherical triangle");

  const Vec3 u1(std::cos(kPi * a), std::sin(kPi * a), 0.0);
  const Vec3 u2(-1.0, 0.0, 0.0);
  const Vec3 u3(x, -y, cfg.eps0 * std::sqrt(z2));
  const OrientedLine d1{Vec3(0.0, 0.0, -cfg.A), u1};
  const OrientedLine d2{Vec3::Zero(), u2};

  // p3 from D(D3,D1) = -B, D(D2,D3) = -C and <p3,u3> = 0
  const Vec3 v31 = u3.cross(-u1).normalized();
  const Vec3 v23 = u2.cross(-u3).normalized();
  Eigen::Matrix3d m;
  m.row(0) = v31.transpose();
  m.row(1) = v23.transpose();
  m.row(2) = u3.transpose();
  const Vec3 rhs(cfg.B + d1.point.dot(v31), -cfg.C + d2.point.dot(v23), 0.0);
  const Vec3 p3 = m.partialPivLu().solve(rhs);
  return {d1, d2, OrientedLine{p3, u3}};
}

bool congruent_mod2(double x, double ref) {
  const double k = (x - ref) / 2.0;
  return std::abs(k - std::round(k)) < 1e-9;
}

FrameAngles frame_angles(const TripleConfig& cfg, const Lifted& l) {
  if (!congruent_mod2(l.alpha, cfg.alpha0) || !congruent_mod2(l.beta, cfg.beta0) ||
      !congruent_mod2(l.gamma, cfg.gamma0)) {
    throw InvalidInput("lifted angles are not congruent to the configuration mod 2");
  }
  const double ca = std::cos(kPi * l.alpha), sa = std::sin(kPi * l.alpha);
  const double cb = std::cos(kPi * l.beta), sb = std::sin(kPi * l.beta);
  const double cg = std::cos(kPi * l.gamma), sg = std::sin(kPi * l.gamma);

  auto build = [&](double c, double& theta, double& t, double& cos_out) {
    if (std::abs(c) > 1.0 + 1e-10) throw InvalidInput("inconsistent configuration: |cos theta| > 1");
    c = std::clamp(c, -1.0, 1.0);
    const double s = cfg.eps0 * std::sqrt(std::max(0.0, 1.0 - c * c));
    theta = std::atan2(s, c);
    t = c >= 0.0 ? s / (1.0 + c) : (1.0 - c) / s;
    cos_out = c;
  };
  FrameAngles f;
  build((cb + ca * cg) / (sa * sg), f.theta, f.t, f.cos_theta);
  build((cg + ca * cb) / (sa * sb), f.theta_hat, f.t_hat, f.cos_theta_hat);
  return f;
}

}  // namespace threelines::geometry
