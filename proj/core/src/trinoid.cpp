#include "threelines/trinoid.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <tuple>

#include "internal/grid.hpp"
#include "threelines/error.hpp"
#include "threelines/specfun.hpp"

namespace threelines::trinoid {

namespace {

constexpr double kPi = std::numbers::pi;
namespace odeint = boost::numeric::odeint;
using State = std::array<cplx, 4>;  // row-major 2x2

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

// Relative gap between two points of the Riemann sphere; an infinite real part marks infinity.
double relative_gap(cplx a, cplx b) {
  const bool ia = std::isinf(a.real()), ib = std::isinf(b.real());
  if (ia && ib) return 0.0;
  if (ia || ib) return 1.0 / std::max(1.0, std::abs(ia ? b : a));
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

const cplx kInfinity(INFINITY, 0.0);

CousinData make_cousin(const TrinoidSpec& spec, const Lifted& l, const solver::EndParameters& ends, int eps,
                       double p, double q, double r) {
  geometry::TripleConfig cfg;
  cfg.alpha0 = std::abs(reduce_mod2(spec.mu0));
  cfg.gamma0 = std::abs(reduce_mod2(spec.mu1));
  cfg.beta0 = std::abs(reduce_mod2(spec.mu_inf));
  cfg.A = ends.A;
  cfg.B = ends.B;
  cfg.C = ends.C;
  // epsilon_sign is linear in eps0, so one evaluation picks the eps0 that realizes eps
  const auto cm = specfun::connection_matrices(specfun::make_exponents(l.alpha, l.beta, l.gamma));
  cfg.eps0 = eps * solver::epsilon_sign(1, l.alpha, cm);
  solver::Prepared prep = solver::prepare(cfg, l);
  if (prep.eps != eps) throw NumericalFailure("could not realize the sign of the trinoid system");
  surface::WeierstrassEvaluator ev(prep, solver::pqr_to_abc(p, q, r, l));
  return CousinData{spec, cfg, prep, p, q, r, std::move(ev)};
}

Mat2c to_matrix(const State& s) {
  Mat2c m;
  m << s[0], s[1], s[2], s[3];
  return m;
}

// Euclidean vertex normals, area weighted.
void mesh_normals(SurfaceMesh& mesh) {
  std::vector<Vec3> n(mesh.vertices.size(), Vec3::Zero());
  for (const auto& f : mesh.faces) {
    const Vec3 a = mesh.vertices[f[0]].x, b = mesh.vertices[f[1]].x, c = mesh.vertices[f[2]].x;
    const Vec3 fn = (b - a).cross(c - a);
    for (int k : f) n[k] += fn;
  }
  for (size_t k = 0; k < n.size(); ++k) {
    const double len = n[k].norm();
    mesh.vertices[k].normal = len > 0.0 ? Vec3(n[k] / len) : Vec3::UnitZ();
  }
}

Mat2c from_hyperboloid(const Eigen::Vector4d& x) {
  Mat2c M;
  M << cplx(x[0] + x[3], 0.0), cplx(x[1], x[2]), cplx(x[1], -x[2]), cplx(x[0] - x[3], 0.0);
  return M;
}

double lorentz(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

}  // namespace

double reduce_mod2(double r) {
  double x = r - 2.0 * std::floor((r + 1.0) / 2.0);  // [-1, 1)
  if (x <= -1.0) x += 2.0;
  return x;
}

void validate(const TrinoidSpec& spec) {
  for (double m : {spec.mu0, spec.mu1, spec.mu_inf}) {
    if (!std::isfinite(m) || m <= 0.0) throw InvalidInput("growth data mu must be positive");
    if (is_integer(m)) throw InvalidInput("growth data mu must not be an integer");
  }
}

Lifted trinoid_lifts(const TrinoidSpec& spec) {
  validate(spec);
  const double a0 = std::abs(reduce_mod2(spec.mu0));
  const double g0 = std::abs(reduce_mod2(spec.mu1));
  const double b0 = std::abs(reduce_mod2(spec.mu_inf));
  if (spec.lift_override) {
    const Lifted& l = *spec.lift_override;
    if (!geometry::congruent_mod2(l.alpha, a0) || !geometry::congruent_mod2(l.beta, b0) ||
        !geometry::congruent_mod2(l.gamma, g0)) {
      throw InvalidInput("lift override is not congruent to the reduced angles mod 2");
    }
    return l;
  }
  auto lift = [](double mu, double ref) { return geometry::congruent_mod2(mu, ref) ? mu : -mu; };
  return {lift(spec.mu0, a0), lift(spec.mu_inf, b0), lift(spec.mu1, g0)};
}

solver::EndParameters trinoid_rhs(const TrinoidSpec& spec) {
  const Lifted l = trinoid_lifts(spec);
  auto dist = [](double a) { return 2.0 * kPi * (a * a - 1.0) / (4.0 * a); };
  return {dist(l.alpha), l.alpha, dist(l.beta), l.beta, dist(l.gamma), l.gamma};
}

GrowthCheck growth_check(const TrinoidSpec& spec) {
  GrowthCheck g;
  const double m0 = spec.mu0, m1 = spec.mu1, mi = spec.mu_inf;
  g.in_K = geometry::in_K(std::abs(reduce_mod2(m0)), std::abs(reduce_mod2(mi)), std::abs(reduce_mod2(m1)));
  const double a = m0 * m0, b = m1 * m1, c = mi * mi;
  g.nondegeneracy = a * a + b * b + c * c - 2 * (a * b + a * c + b * c) + 2 * (a + b + c) - 3;
  g.nondegenerate = std::abs(g.nondegeneracy) > 1e-12;
  const double c0 = std::cos(kPi * m0), c1 = std::cos(kPi * m1), ci = std::cos(kPi * mi);
  g.umehara = c0 * c0 + c1 * c1 + ci * ci + 2 * c0 * c1 * ci < 1.0;
  g.umehara_equivalent = g.umehara == g.in_K;
  return g;
}

Quartics quartics(const Lifted& l) {
  const double a = l.alpha * l.alpha, b = l.beta * l.beta, c = l.gamma * l.gamma;
  auto quartic = [](double x, double y, double z) {
    return -3 * x * x + 2 * (1 + y + z) * x + y * y + z * z - 2 * (y + z + y * z) + 1;
  };
  Quartics out{quartic(a, b, c), quartic(b, a, c), quartic(c, a, b), 1.0};
  for (int sa : {1, -1})
    for (int sb : {1, -1})
      for (int sg : {1, -1}) out.Pi *= 1.0 + sa * l.alpha + sb * l.beta + sg * l.gamma;
  return out;
}

double phi_discriminant(const Lifted& l) {
  const double ka = (1 - l.alpha * l.alpha) / 2, kb = (1 - l.beta * l.beta) / 2, kg = (1 - l.gamma * l.gamma) / 2;
  const double c2 = kb, c1 = -kb - ka + kg, c0 = ka;
  return c1 * c1 - 4 * c2 * c0;
}

TrinoidSolution trinoid_pqr(const TrinoidSpec& spec) {
  const GrowthCheck gc = growth_check(spec);
  if (!gc.in_K) throw InvalidInput("reduced growth data is not in K");
  const Lifted l = trinoid_lifts(spec);
  const solver::EndParameters ends = trinoid_rhs(spec);
  const Quartics Q = quartics(l);
  for (int sb : {1, -1})
    for (int sg : {1, -1})
      for (double f : {1 + l.alpha + sb * l.beta + sg * l.gamma, 1 - l.alpha + sb * l.beta + sg * l.gamma}) {
        if (std::abs(f) < 1e-12) throw InvalidInput("Pi vanishes: 1 +- alpha +- beta +- gamma = 0");
      }

  TrinoidSolution out;
  out.lifted = l;
  // delta^2 = -1/(4 Pi): delta real for Pi < 0; otherwise i delta = -sqrt(1/(4 Pi)) is real
  out.delta_real = Q.Pi < 0.0;
  const double scale = out.delta_real ? std::sqrt(-1.0 / (4.0 * Q.Pi)) : -std::sqrt(1.0 / (4.0 * Q.Pi));
  auto& s = out.pqr;
  s.eps = out.delta_real ? 1 : -1;
  s.p = Q.U * scale;
  s.q = Q.V * scale;
  s.r = Q.W * scale;
  // canonical sign modulo the global symmetry, as in solve_pqr
  if (std::make_tuple(-s.p, -s.q, -s.r) > std::make_tuple(s.p, s.q, s.r)) s.p = -s.p, s.q = -s.q, s.r = -s.r;
  s.y = s.p + s.q + s.r;
  const auto res = solver::pqr_residuals(s.p, s.q, s.r, ends, s.eps);
  for (double x : res) s.residual = std::max(s.residual, std::abs(x));
  s.branch = {s.p >= 0.0 ? 1 : -1, s.q >= 0.0 ? 1 : -1, s.r >= 0.0 ? 1 : -1};
  out.hat = solver::hat_lambda_values(s.p, s.q, s.r, s.eps, l);

  const double mag = 1.0 + s.y * s.y + s.p * s.p + s.q * s.q + s.r * s.r;
  if (s.residual > 1e-10 * mag) throw NumericalFailure("closed-form trinoid solution misses its system");
  if (std::max(std::abs(out.hat.at0), std::abs(out.hat.at1)) > 1e-10 * mag) {
    throw NumericalFailure("closed-form trinoid solution does not annihilate Lambda_hat");
  }
  if (!gc.nondegenerate) s.flags.push_back("singular_point");
  return out;
}

CousinData cousin_data(const TrinoidSpec& spec) {
  const TrinoidSolution sol = trinoid_pqr(spec);
  return make_cousin(spec, sol.lifted, trinoid_rhs(spec), sol.pqr.eps, sol.pqr.p, sol.pqr.q, sol.pqr.r);
}

CousinData half_integer_data(const TrinoidSpec& spec, int which) {
  if (which < 0 || which > 2) throw InvalidInput("half-integer solution index must be 0, 1 or 2");
  validate(spec);
  static constexpr double kHalf[3][3] = {{0.5, 0.5, -0.5}, {0.5, -0.5, 0.5}, {-0.5, 0.5, 0.5}};
  const double* x = kHalf[which];
  return make_cousin(spec, trinoid_lifts(spec), trinoid_rhs(spec), -1, x[0], x[1], x[2]);
}

BryantFrame transport(const surface::WeierstrassEvaluator& ev, cplx from, cplx to, const OdeOptions& opt) {
  if (from.imag() < 0.0 || to.imag() < 0.0) throw DomainError("frame path leaves the closed upper half-plane");
  const double clearance = ev.quadrature().clearance;
  if (detail::segment_distance(0.0, from, to) < clearance || detail::segment_distance(1.0, from, to) < clearance) {
    throw DomainError("frame path passes too close to an end");
  }
  BryantFrame out;
  out.z = to;
  if (from == to) return out;
  const cplx d = to - from;
  auto rhs = [&](const State& T, State& dT, double t) {
    const cplx z = from + t * d;
    const auto w = ev.weierstrass_at(z);
    const cplx f = 1.0 / (z * z * (z - 1.0) * (z - 1.0));
    // A = i omega [[g, -g^2], [1, -g]] in spinor form, scaled by dz/dt
    const cplx s = cplx(0.0, 1.0) * f * d;
    const cplx a11 = s * w.k1 * w.k2, a12 = -s * w.k2 * w.k2, a21 = s * w.k1 * w.k1, a22 = -a11;
    dT[0] = T[0] * a11 + T[1] * a21;
    dT[1] = T[0] * a12 + T[1] * a22;
    dT[2] = T[2] * a11 + T[3] * a21;
    dT[3] = T[2] * a12 + T[3] * a22;
  };
  State T{1.0, 0.0, 0.0, 1.0};
  auto stepper = odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<State>());
  try {
    out.steps = static_cast<int>(odeint::integrate_adaptive(stepper, rhs, T, 0.0, 1.0, 0.05));
  } catch (const odeint::step_adjustment_error&) {
    throw NumericalFailure("frame integration step size underflow");
  } catch (const odeint::no_progress_error&) {
    throw NumericalFailure("frame integration makes no progress");
  }
  out.F = to_matrix(T);
  for (const cplx& c : T) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NumericalFailure("frame integration diverged");
  }
  out.det_drift = std::abs(out.F.determinant() - 1.0);
  return out;
}

BryantFrame integrate_bryant(const surface::WeierstrassEvaluator& ev, cplx z, const std::vector<cplx>& waypoints,
                             const OdeOptions& opt) {
  BryantFrame out;
  cplx at = ev.basepoint();
  out.z = at;
  auto leg = [&](cplx next) {
    const BryantFrame t = transport(ev, at, next, opt);
    out.F = out.F * t.F;
    out.steps += t.steps;
    at = next;
  };
  for (cplx w : waypoints) leg(w);
  leg(z);
  out.z = z;
  out.det_drift = std::abs(out.F.determinant() - 1.0);
  return out;
}

HyperbolicPoint cousin_point(const Mat2c& F) { return cousin_point_from_hermitian(F * F.adjoint()); }

HyperbolicPoint cousin_point_from_hermitian(const Mat2c& M) {
  const double m11 = M(0, 0).real();
  if (!(m11 > 0.0) || !std::isfinite(m11)) throw NumericalFailure("F F^* is not positive definite");
  return {M(1, 0) / m11, 1.0 / m11};
}

Mat2c hermitian_from_point(const HyperbolicPoint& p) {
  if (!(p.y3 > 0.0)) throw InvalidInput("half-space point needs y3 > 0");
  Mat2c M;
  M << cplx(1.0 / p.y3, 0.0), std::conj(p.w) / p.y3, p.w / p.y3, cplx(p.y3 + std::norm(p.w) / p.y3, 0.0);
  return M;
}

Eigen::Vector4d hyperboloid(const Mat2c& M) {
  const double m11 = M(0, 0).real(), m22 = M(1, 1).real();
  return {(m11 + m22) / 2.0, M(0, 1).real(), M(0, 1).imag(), (m11 - m22) / 2.0};
}

Vec3 ball_point(const Mat2c& M) {
  const Eigen::Vector4d x = hyperboloid(M);
  return Vec3(x[1], x[2], x[3]) / (1.0 + x[0]);
}

cplx frame_gauss(const surface::WeierstrassEvaluator& ev, const Mat2c& F, cplx z) {
  const auto w = ev.weierstrass_at(z);
  // g = k2 / k1 with the spinors kept homogeneous, finite where k1 vanishes
  const cplx num = F(1, 0) * w.k2 + F(1, 1) * w.k1, den = F(0, 0) * w.k2 + F(0, 1) * w.k1;
  return den == 0.0 ? kInfinity : num / den;
}

std::array<cplx, 3> asymptotic_boundary_points(const surface::WeierstrassEvaluator& ev, double r,
                                               const OdeOptions& opt) {
  if (!(r > 0.0 && r < 0.5)) throw InvalidInput("end radius must lie in (0, 0.5)");
  auto quad = ev.quadrature();
  quad.clearance = std::min(quad.clearance, 0.1 * r);
  const surface::WeierstrassEvaluator near(ev.prepared(), ev.abc(), ev.basepoint(), quad);
  std::array<cplx, 3> out;
  const std::array<cplx, 3> at{cplx(0.0, r), cplx(1.0, r), cplx(0.0, 1.0 / r)};
  for (int k = 0; k < 3; ++k) out[k] = frame_gauss(near, integrate_bryant(near, at[k], {}, opt).F, at[k]);
  return out;
}

cplx hyperbolic_gauss(cplx z, const solver::PhiPolynomial& phi) {
  const cplx d = 2.0 * z - phi.a1 - phi.a2;
  if (std::abs(d) == 0.0) throw DomainError("hyperbolic Gauss map has its pole at (a1 + a2) / 2");
  return z + (phi.a1 - phi.a2) * (phi.a1 - phi.a2) / (2.0 * d);
}

std::array<cplx, 3> gauss_end_values(const solver::PhiPolynomial& phi) {
  const cplx s = phi.a1 + phi.a2, d2 = (phi.a1 - phi.a2) * (phi.a1 - phi.a2);
  const cplx g0 = s == 0.0 ? kInfinity : -d2 / (2.0 * s);
  const cplx g1 = s == 2.0 ? kInfinity : 1.0 + d2 / (2.0 * (2.0 - s));
  return {g0, g1, kInfinity};
}

DistinctnessReport boundary_distinctness(const TrinoidSpec& spec, double tol) {
  validate(spec);
  const double a = spec.mu0 * spec.mu0, b = spec.mu1 * spec.mu1, c = spec.mu_inf * spec.mu_inf;
  DistinctnessReport out;
  out.tests = {1 - a - b + c, 1 - a + b - c, 1 + a - b - c};
  for (int k = 0; k < 3; ++k) out.distinct[k] = std::abs(out.tests[k]) > tol;
  if (!out.distinct[0] && !out.distinct[1] && !out.distinct[2]) {
    throw NumericalFailure("all three asymptotic boundary points coincide, which the growth data excludes");
  }
  const auto G = gauss_end_values(solver::build_phi(trinoid_rhs(spec)));
  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (int k = 0; k < 3; ++k) {
    out.distinct_by_gauss[k] = relative_gap(G[pairs[k].first], G[pairs[k].second]) > tol;
    out.agree = out.agree && out.distinct_by_gauss[k] == out.distinct[k];
  }
  return out;
}

EndCoefficients embeddedness_check(const surface::WeierstrassEvaluator& ev, surface::End end, double tol) {
  using surface::End;
  const auto& phi = ev.prepared().phi;
  // chart z(zeta) with the end at zeta = 0, and the distance to the nearest other singular point
  auto chart = [&](cplx zeta) {
    switch (end) {
      case End::zero:
        return zeta;
      case End::one:
        return 1.0 + zeta;
      case End::infinity:
        break;
    }
    return -1.0 / zeta;
  };
  auto chart_derivative = [&](cplx zeta) { return end == End::infinity ? 1.0 / (zeta * zeta) : cplx(1.0); };
  double reach = 1.0;
  for (cplx a : {phi.a1, phi.a2}) {
    const double d = end == End::zero ? std::abs(a) : end == End::one ? std::abs(a - 1.0) : 1.0 / std::abs(a);
    reach = std::min(reach, d);
  }
  if (!(reach > 1e-6)) throw NumericalFailure("a zero of phi sits at the end");
  const double rho = 0.3 * reach, h = rho / 200.0;

  // G'(zeta) = g'(z) z'(zeta) with g' = (k1 k2' - k1' k2) / k1^2
  auto dG = [&](cplx zeta) {
    const auto w = ev.weierstrass_at(chart(zeta));
    return (w.k1 * w.dk2 - w.dk1 * w.k2) / (w.k1 * w.k1) * chart_derivative(zeta);
  };
  // S_zeta G - 2 Q°_zeta with Q° = i Q
  auto f = [&](cplx zeta) {
    const cplx m2 = dG(zeta - 2.0 * h), m1 = dG(zeta - h), c = dG(zeta), p1 = dG(zeta + h), p2 = dG(zeta + 2.0 * h);
    const cplx d2 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    const cplx d3 = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
    const cplx S = d3 / c - 1.5 * (d2 / c) * (d2 / c);
    const cplx zp = chart_derivative(zeta);
    const cplx Qo = cplx(0.0, 1.0) * ev.weierstrass_at(chart(zeta)).Q_dz2 * zp * zp;
    return S - 2.0 * Qo;
  };

  // real coefficients (f(conj zeta) = conj f(zeta)), so the upper semicircle suffices
  constexpr int N = 64;
  double cm2 = 0.0, cm1 = 0.0;
  for (int k = 0; k < N; ++k) {
    const double th = kPi * (k + 0.5) / N;
    const cplx v = f(std::polar(rho, th));
    cm2 += (v * std::polar(1.0, 2.0 * th)).real();
    cm1 += (v * std::polar(1.0, th)).real();
  }
  EndCoefficients out;
  out.end = end;
  out.c_minus2 = cm2 / N * rho * rho;
  out.c_minus1 = cm1 / N * rho;
  if (!std::isfinite(out.c_minus2) || !std::isfinite(out.c_minus1)) {
    throw NumericalFailure("Laurent extraction at the end did not converge");
  }
  out.embedded = std::abs(out.c_minus2) < tol && std::abs(out.c_minus1) < tol;
  return out;
}

GeodesicPlane fit_plane(const std::vector<Eigen::Vector4d>& points) {
  if (points.size() < 3) throw InvalidInput("a plane fit needs at least three points");
  Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
  for (const auto& x : points) S += x * x.transpose();
  const Eigen::Vector4d Jd(-1.0, 1.0, 1.0, 1.0);
  // minimize m^T S m subject to m^T J m = 1, i.e. J S m = lambda m; the normal is n = J m
  const Eigen::Matrix4d JS = Jd.asDiagonal() * S;
  Eigen::EigenSolver<Eigen::Matrix4d> es(JS);
  GeodesicPlane best;
  double best_lambda = INFINITY;
  for (int k = 0; k < 4; ++k) {
    if (std::abs(es.eigenvalues()[k].imag()) > 1e-9 * (1.0 + std::abs(es.eigenvalues()[k]))) continue;
    Eigen::Vector4d m = es.eigenvectors().col(k).real();
    const double q = m.dot(Jd.asDiagonal() * m);
    if (!(q > 0.0)) continue;
    m /= std::sqrt(q);
    const double lambda = m.dot(S * m);
    if (lambda < best_lambda) {
      best_lambda = lambda;
      best.normal = Jd.asDiagonal() * m;
    }
  }
  if (!std::isfinite(best_lambda)) throw NumericalFailure("no spacelike normal for the plane fit");
  for (const auto& x : points) best.residual = std::max(best.residual, std::abs(lorentz(x, best.normal)));
  return best;
}

double plane_distance(const GeodesicPlane& a, const GeodesicPlane& b) {
  return std::min((a.normal - b.normal).norm(), (a.normal + b.normal).norm());
}

TrinoidMesh trinoid_mesh(const CousinData& data, const TrinoidMeshOptions& opt) {
  const auto& ev = data.ev;
  auto grid = detail::build_grid_tree(ev, opt.mesh);
  SurfaceMesh& mesh = grid.mesh;
  const int nv = static_cast<int>(mesh.vertices.size());

  // edge transports in parallel, products serially down the tree
  std::vector<Mat2c> step(nv), frame(nv);
  detail::parallel_for(nv, opt.mesh.threads, [&](int k) {
    const int p = grid.parent[k];
    step[k] = transport(ev, p < 0 ? ev.basepoint() : mesh.vertices[p].z, mesh.vertices[k].z, opt.ode).F;
  });
  TrinoidMesh out;
  for (int k : grid.order) {
    const int p = grid.parent[k];
    frame[k] = p < 0 ? step[k] : Mat2c(frame[p] * step[k]);
    out.det_drift = std::max(out.det_drift, std::abs(frame[k].determinant() - 1.0));
  }

  std::vector<Eigen::Vector4d> x(nv);
  for (int k = 0; k < nv; ++k) x[k] = hyperboloid(frame[k] * frame[k].adjoint());

  std::vector<Eigen::Vector4d> all_boundary;
  for (int tag = 1; tag <= 3; ++tag) {
    std::vector<Eigen::Vector4d> pts;
    for (int k : mesh.tagged(tag)) pts.push_back(x[k]);
    if (pts.size() < 3) throw NumericalFailure("boundary segment " + std::to_string(tag) + " is under-sampled");
    out.planes[tag - 1] = fit_plane(pts);
    all_boundary.insert(all_boundary.end(), pts.begin(), pts.end());
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) out.plane_spread = std::max(out.plane_spread, plane_distance(out.planes[i], out.planes[j]));

  if (opt.reflect) {
    const GeodesicPlane sym = fit_plane(all_boundary);
    const int nf = static_cast<int>(mesh.faces.size());
    for (int k = 0; k < nv; ++k) {
      x.push_back(x[k] - 2.0 * lorentz(x[k], sym.normal) * sym.normal);
      MeshVertex v = mesh.vertices[k];
      v.z = std::conj(v.z);
      mesh.vertices.push_back(v);
    }
    for (int f = 0; f < nf; ++f) {
      const auto& t = mesh.faces[f];
      mesh.faces.push_back({t[0] + nv, t[2] + nv, t[1] + nv});
    }
    mesh.notes.push_back("mirror image across the fitted symmetry plane appended (lower half-plane copy)");
  }

  out.halfspace = mesh;
  out.ball = mesh;
  for (size_t k = 0; k < x.size(); ++k) {
    const Mat2c M = from_hyperboloid(x[k]);
    const HyperbolicPoint hp = cousin_point_from_hermitian(M);
    out.halfspace.vertices[k].x = Vec3(hp.w.real(), hp.w.imag(), hp.y3);
    out.ball.vertices[k].x = Vec3(x[k][1], x[k][2], x[k][3]) / (1.0 + x[k][0]);
  }
  // the grid bookkeeping only describes the fundamental piece
  for (SurfaceMesh* m : {&out.halfspace, &out.ball}) {
    mesh_normals(*m);
    if (opt.reflect) {
      m->grid_index.clear();
      m->grid_nx = m->grid_ny = 0;
    }
  }
  return out;
}

}  // namespace threelines::trinoid
