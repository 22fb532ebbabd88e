#include "threelines/surface.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <queue>
#include <thread>

#include "threelines/error.hpp"
#include "threelines/specfun.hpp"
#include "internal/grid.hpp"

namespace threelines::surface {

using detail::parallel_for;
using detail::segment_distance;

namespace {

constexpr double kPi = std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
using Cvec3 = std::array<cplx, 3>;

}  // namespace

WeierstrassEvaluator::WeierstrassEvaluator(const solver::Prepared& prep, const solver::Abc& abc, cplx z0,
                                           QuadratureOptions quad)
    : prep_(prep), abc_(abc), z0_(z0), quad_(quad) {
  if (!(z0.imag() > 0.0)) throw InvalidInput("basepoint must lie in the open upper half-plane");
}

Spinors WeierstrassEvaluator::spinor_K(cplx z) const {
  if (std::min(std::abs(z), std::abs(z - 1.0)) <= 1e-8) throw DomainError("spinors evaluated at a puncture");
  const auto& e = prep_.exps;
  const double al = e.alpha, ga = e.gamma;
  const specfun::Pair s = specfun::sigma_global(e, prep_.cm, z);
  const cplx pre = specfun::branch_pow(z, (1.0 - al) / 2.0, specfun::Branch::log_at_0) *
                   specfun::branch_pow(z, (1.0 - ga) / 2.0, specfun::Branch::pow_1_minus_z);
  const cplx log_d = (1.0 - al) / (2.0 * z) - (1.0 - ga) / (2.0 * (1.0 - z));
  const double a = abc_.a, b = abc_.b, c = abc_.c, sab = e.s_mmm * e.s_mpm;
  const cplx lin = a + b * z, quad = z * (1.0 - z);
  // z(1-z) sigma'' from the hypergeometric equation, with no division
  const cplx p1 = (1.0 - ga) * z - (1.0 - al) * (1.0 - z);

  auto one = [&](cplx w, cplx dw, cplx& K, cplx& dK) {
    const cplx h = lin * w + c * quad * dw;
    const cplx dh = b * w + lin * dw + c * (1.0 - 2.0 * z) * dw + c * (p1 * dw + sab * w);
    K = pre * h;
    dK = pre * (dh + h * log_d);
  };
  Spinors out;
  one(s.w1, s.dw1, out.K1, out.dK1);
  one(s.w2, s.dw2, out.K2, out.dK2);
  return out;
}

WeierstrassData WeierstrassEvaluator::weierstrass_at(cplx z) const {
  const Spinors K = spinor_K(z);
  WeierstrassData w;
  w.k1 = K.K1 / prep_.lm.lambda;
  w.dk1 = K.dK1 / prep_.lm.lambda;
  w.k2 = prep_.lm.mu * K.K2;
  w.dk2 = prep_.lm.mu * K.dK2;
  const cplx f = 1.0 / (z * z * (z - 1.0) * (z - 1.0));
  w.g = w.k1 == 0.0 ? cplx(INFINITY, 0.0) : w.k2 / w.k1;
  w.omega_dz = f * w.k1 * w.k1;
  w.Q_dz2 = f * (w.k1 * w.dk2 - w.dk1 * w.k2);
  return w;
}

Cvec3 WeierstrassEvaluator::integrand(cplx z) const {
  const Spinors K = spinor_K(z);
  const cplx k1 = K.K1 / prep_.lm.lambda, k2 = prep_.lm.mu * K.K2;
  const cplx f = 1.0 / (z * z * (z - 1.0) * (z - 1.0));
  const cplx s1 = k1 * k1, s2 = k2 * k2;
  return {(s1 - s2) * f, cplx(0.0, 1.0) * (s1 + s2) * f, 2.0 * k1 * k2 * f};
}

Vec3 WeierstrassEvaluator::integrate_segment(cplx from, cplx to, double* err) const {
  const double clear = std::min(segment_distance(0.0, from, to), segment_distance(1.0, from, to));
  if (clear < quad_.clearance) throw InvalidInput("integration path enters an exclusion disk around 0 or 1");
  if (std::min(from.imag(), to.imag()) < -1e-12) throw InvalidInput("integration path leaves the upper half-plane");
  if (from == to) {
    if (err) *err = 0.0;
    return Vec3::Zero();
  }
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = boost::math::quadrature::gauss<double, 7>::weights();  // Gauss nodes sit at even indices
  const double total = std::abs(to - from);

  // Gauss-Kronrod on [a, b] of the path parameter, recursive bisection against a length-scaled budget
  struct Piece {
    Vec3 value;
    double err;
  };
  auto rule = [&](cplx a, cplx b) {
    const cplx mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Eigen::Vector3cd k = Eigen::Vector3cd::Zero(), g = Eigen::Vector3cd::Zero();
    for (size_t i = 0; i < x.size(); ++i) {
      for (int sgn : {1, -1}) {
        if (i == 0 && sgn < 0) continue;
        const Cvec3 f = integrand(mid + double(sgn) * x[i] * half);
        const Eigen::Vector3cd fv(f[0], f[1], f[2]);
        k += wk[i] * fv;
        if (i % 2 == 0) g += wg[i / 2] * fv;
      }
    }
    k *= half;
    g *= half;
    return Piece{k.real(), (k - g).real().cwiseAbs().maxCoeff()};
  };
  double err_sum = 0.0;
  auto recurse = [&](auto&& self, cplx a, cplx b, const Piece& whole, int depth) -> Vec3 {
    const double budget = quad_.tol * std::abs(b - a) / total;
    if (whole.err <= budget || depth >= quad_.max_depth) {
      if (depth >= quad_.max_depth && whole.err > budget) {
        throw NumericalFailure("quadrature did not converge along a path segment");
      }
      err_sum += whole.err;
      return whole.value;
    }
    const cplx m = 0.5 * (a + b);
    const Piece left = rule(a, m), right = rule(m, b);
    return self(self, a, m, left, depth + 1) + self(self, m, b, right, depth + 1);
  };
  const Vec3 v = recurse(recurse, from, to, rule(from, to), 0);
  if (err) *err = err_sum;
  return v;
}

Vec3 WeierstrassEvaluator::immerse(cplx z, const std::vector<cplx>& waypoints) const {
  Vec3 x = Vec3::Zero();
  cplx at = z0_;
  for (cplx w : waypoints) {
    x += integrate_segment(at, w);
    at = w;
  }
  return x + integrate_segment(at, z);
}

Vec3 WeierstrassEvaluator::gauss_map(cplx z) const {
  const WeierstrassData w = weierstrass_at(z);
  const double n1 = std::norm(w.k1), n2 = std::norm(w.k2);
  if (!(n1 + n2 > 0.0)) throw NumericalFailure("common zero of the spinors");
  const cplx m = w.k2 * std::conj(w.k1);
  return Vec3(2.0 * m.real(), 2.0 * m.imag(), n2 - n1) / (n1 + n2);
}

Forms WeierstrassEvaluator::first_second_forms(cplx z) const {
  const WeierstrassData w = weierstrass_at(z);
  const double f = 1.0 / std::norm(z * (z - 1.0));
  Forms out;
  out.I = std::pow((std::norm(w.k1) + std::norm(w.k2)) * f, 2);
  if (!(out.I > 0.0)) throw NumericalFailure("singular point: the metric vanishes");
  // II = -2 Re(Q dz^2)
  const double re = w.Q_dz2.real(), im = w.Q_dz2.imag();
  out.II = {-2.0 * re, 2.0 * im, 2.0 * im, 2.0 * re};
  return out;
}

LineFit fit_line(const SurfaceMesh& mesh, int tag) {
  const auto ids = mesh.tagged(tag);
  if (ids.size() < 3) throw InvalidInput("too few vertices on the boundary segment to fit a line");
  Eigen::MatrixXd pts(ids.size(), 3);
  for (size_t i = 0; i < ids.size(); ++i) pts.row(i) = mesh.vertices[ids[i]].x.transpose();
  const Eigen::RowVector3d c = pts.colwise().mean();
  const Eigen::MatrixXd centred = pts.rowwise() - c;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
  Vec3 d = svd.matrixV().col(0);

  auto by_re = [&](int a, int b) { return mesh.vertices[a].z.real() < mesh.vertices[b].z.real(); };
  const int first = *std::min_element(ids.begin(), ids.end(), by_re);
  const int last = *std::max_element(ids.begin(), ids.end(), by_re);
  if ((mesh.vertices[last].x - mesh.vertices[first].x).dot(d) < 0.0) d = -d;

  LineFit fit;
  fit.line = {c.transpose(), d};
  const auto sv = svd.singularValues();
  fit.residual = sv(1) / sv(0);
  double lo = INFINITY, hi = -INFINITY;
  for (Eigen::Index i = 0; i < centred.rows(); ++i) {
    const Vec3 r = centred.row(i).transpose();
    const double along = r.dot(d);
    lo = std::min(lo, along);
    hi = std::max(hi, along);
    fit.max_deviation = std::max(fit.max_deviation, (r - along * d).norm());
  }
  fit.scale = hi - lo;
  return fit;
}

SurfaceMesh generate_mesh(const WeierstrassEvaluator& ev, const MeshOptions& opt) {
  auto grid = detail::build_grid_tree(ev, opt);
  SurfaceMesh& mesh = grid.mesh;
  const auto& parent = grid.parent;
  const int nv = static_cast<int>(mesh.vertices.size());
  const cplx z0 = ev.basepoint();

  // edge integrals in parallel, cumulative sums serially in tree order
  std::vector<Vec3> step(nv, Vec3::Zero());
  parallel_for(nv, opt.threads, [&](int k) {
    const cplx to = mesh.vertices[k].z;
    step[k] = parent[k] < 0 ? ev.integrate_segment(z0, to) : ev.integrate_segment(mesh.vertices[parent[k]].z, to);
  });
  for (int k : grid.order) {
    mesh.vertices[k].x = parent[k] < 0 ? step[k] : mesh.vertices[parent[k]].x + step[k];
  }
  parallel_for(nv, opt.threads, [&](int k) { mesh.vertices[k].normal = ev.gauss_map(mesh.vertices[k].z); });

  // translation: the fitted image of (0, 1) becomes the x1-axis
  if (mesh.tagged(2).size() >= 3) {
    const LineFit d2 = fit_line(mesh, 2);
    const Vec3 p = d2.line.point;
    const Vec3 u = d2.line.direction;
    Vec3 shift = p - p.dot(u) * u;
    if (mesh.tagged(1).size() >= 3) {
      // slide along the axis so the common perpendicular with D1 sits at the origin
      const LineFit d1 = fit_line(mesh, 1);
      const Vec3 w = d1.line.direction, r = d1.line.point - p;
      const double b = u.dot(w), den = 1.0 - b * b;
      if (den > 1e-12) shift += ((r.dot(u) - b * r.dot(w)) / den + p.dot(u)) * u;
    }
    for (auto& v : mesh.vertices) v.x -= shift;
  } else {
    mesh.notes.push_back("segment (0,1) not sampled; translation left at x(z0) = 0");
  }
  return mesh;
}

const char* to_string(End e) {
  switch (e) {
    case End::zero:
      return "0";
    case End::one:
      return "1";
    case End::infinity:
      return "inf";
  }
  return "?";
}

EndAsymptotics fit_end_asymptotics(const WeierstrassEvaluator& ev, End end) {
  const auto& l = ev.prepared().lifted;
  const auto& ends = ev.prepared().ends;
  EndAsymptotics out;
  out.end = end;
  double input = 0;
  auto value = [&](double r) {
    const cplx i(0.0, 1.0);
    switch (end) {
      case End::zero: {
        const cplx z = i * r;
        return (ev.weierstrass_at(z).Q_dz2 * z * z * (2.0 * kPi) / (i * l.alpha)).real();
      }
      case End::one: {
        const cplx z = 1.0 + i * r;
        return (ev.weierstrass_at(z).Q_dz2 * (z - 1.0) * (z - 1.0) * (2.0 * kPi) / (i * l.gamma)).real();
      }
      case End::infinity: {
        // zeta = -1/z = i r; Q dz^2 = Q z^4 dzeta^2 and zeta^2 = -z^-2
        const cplx z = -1.0 / (i * r);
        return (ev.weierstrass_at(z).Q_dz2 * z * z * (2.0 * kPi) / (i * l.beta)).real();
      }
    }
    return 0.0;
  };
  switch (end) {
    case End::zero:
      out.alpha = l.alpha, input = ends.A;
      break;
    case End::one:
      out.alpha = l.gamma, input = ends.C;
      break;
    case End::infinity:
      out.alpha = l.beta, input = ends.B;
      break;
  }
  const double f1 = value(1e-3), f2 = value(1e-4);
  // the coefficients of phi are real, so the O(r) term of the expansion along the imaginary
  // direction is purely imaginary and the real part converges like r^2
  out.A = (100.0 * f2 - f1) / 99.0;
  out.richardson_gap = std::abs(f2 - f1);
  out.residual = std::abs(f2 - input);
  if (!std::isfinite(out.A) || out.richardson_gap > 1e-2 * std::max(1.0, std::abs(out.A))) {
    throw NumericalFailure("end asymptotics do not settle between radii 1e-3 and 1e-4");
  }
  return out;
}

CurvatureStats fd_mean_curvature(const SurfaceMesh& mesh, double margin, int order) {
  if (mesh.grid_index.empty()) throw InvalidInput("mean curvature stencil needs a structured grid mesh");
  if (order != 2 && order != 4) throw InvalidInput("finite-difference order must be 2 or 4");
  const double h = mesh.grid_step;
  const int reach = order / 2;
  auto at = [&](int i, int j) -> const MeshVertex* {
    if (i < 0 || j < 0 || i >= mesh.grid_nx || j >= mesh.grid_ny) return nullptr;
    const int k = mesh.grid_index[j * mesh.grid_nx + i];
    return k < 0 ? nullptr : &mesh.vertices[k];
  };
  // first and second derivative along one grid direction
  auto diff = [&](int i, int j, int di, int dj, Vec3& d1, Vec3& d2) {
    std::array<Vec3, 5> p;
    for (int s = -reach; s <= reach; ++s) {
      const MeshVertex* v = at(i + s * di, j + s * dj);
      if (!v) return false;
      p[s + 2] = v->x;
    }
    if (order == 2) {
      d1 = (p[3] - p[1]) / (2 * h);
      d2 = (p[3] - 2 * p[2] + p[1]) / (h * h);
    } else {
      d1 = (-p[4] + 8 * p[3] - 8 * p[1] + p[0]) / (12 * h);
      d2 = (-p[4] + 16 * p[3] - 30 * p[2] + 16 * p[1] - p[0]) / (12 * h * h);
    }
    return true;
  };

  CurvatureStats st;
  double sum2 = 0;
  for (int j = 0; j < mesh.grid_ny; ++j) {
    for (int i = 0; i < mesh.grid_nx; ++i) {
      const MeshVertex* c = at(i, j);
      if (!c || std::min(std::abs(c->z), std::abs(c->z - 1.0)) - reach * h < margin) continue;
      Vec3 xu, xuu, xv, xvv;
      if (!diff(i, j, 1, 0, xu, xuu) || !diff(i, j, 0, 1, xv, xvv)) continue;
      const Vec3 n = xu.cross(xv).normalized();
      const double E = 0.5 * (xu.squaredNorm() + xv.squaredNorm());
      const double H = (xuu + xvv).dot(n) / (2 * E);
      st.max_abs = std::max(st.max_abs, std::abs(H));
      sum2 += H * H;
      ++st.samples;
    }
  }
  st.rms = st.samples ? std::sqrt(sum2 / st.samples) : 0.0;
  return st;
}

}  // namespace threelines::surface
