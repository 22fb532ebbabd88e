#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "doctest.h"
#include "support.hpp"
#include "threelines/error.hpp"
#include "threelines/surface.hpp"

using namespace threelines;
using namespace threelines::surface;
using testing_support::rel_err;

namespace {

const cplx I(0.0, 1.0);

struct Built {
  solver::Prepared prep;
  solver::PqrSolution sol;
  WeierstrassEvaluator ev;
};

Built build(const geometry::TripleConfig& cfg) {
  const solver::Prepared P = solver::prepare(cfg, {cfg.alpha0, cfg.beta0, cfg.gamma0});
  const auto sols = solver::solve_pqr(P.ends, P.eps);
  REQUIRE_FALSE(sols.empty());
  const auto& s = sols.front();
  return {P, s, WeierstrassEvaluator(P, solver::pqr_to_abc(s.p, s.q, s.r, P.lifted))};
}

const Built& symmetric() {
  static const Built b = build({0.6, 0.6, 0.6, 1.0, 1.0, 1.0, 1});
  return b;
}

cplx random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(-3.0, 4.0), y(0.05, 3.0);
  for (;;) {
    const cplx z(x(rng), y(rng));
    if (std::abs(z) > 0.05 && std::abs(z - 1.0) > 0.05) return z;
  }
}

// Riemann's quadratic F for the spinors built from (a, b, c).
cplx riemann_F(const solver::Abc& x, const specfun::ExponentSet& e, cplx z) {
  const double al = e.alpha, ga = e.gamma;
  return x.a * (x.a + x.c * al) * (1.0 - z) + (x.a + x.b) * (x.a + x.b - x.c * ga) * z -
         (x.b + e.s_mmm * x.c) * (x.b + e.s_mpm * x.c) * z * (1.0 - z);
}

}  // namespace

TEST_CASE("spinor Wronskians") {
  const Built& B = symmetric();
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const cplx z = random_point(rng);
    const Spinors K = B.ev.spinor_K(z);
    CHECK(rel_err(K.K1 * K.dK2 - K.dK1 * K.K2, B.prep.lifted.alpha * riemann_F(B.ev.abc(), B.prep.exps, z)) < 1e-9);
    const WeierstrassData w = B.ev.weierstrass_at(z);
    CHECK(rel_err(w.k1 * w.dk2 - w.dk1 * w.k2, I * B.prep.phi(z)) < 1e-9);
  }
}

TEST_CASE("spinor derivatives agree with finite differences") {
  const Built& B = symmetric();
  for (cplx z : {cplx(0.3, 0.4), cplx(-1.2, 0.7), cplx(2.5, 0.2), cplx(0.5, 2.0)}) {
    const double h = 1e-5;
    const Spinors K = B.ev.spinor_K(z), Kp = B.ev.spinor_K(z + h), Km = B.ev.spinor_K(z - h);
    CHECK(rel_err((Kp.K1 - Km.K1) / (2 * h), K.dK1) < 1e-8);
    CHECK(rel_err((Kp.K2 - Km.K2) / (2 * h), K.dK2) < 1e-8);
  }
}

TEST_CASE("spinors near z = 0") {
  const Built& B = symmetric();
  const double al = B.prep.lifted.alpha;
  const auto& x = B.ev.abc();
  const cplx z = cplx(1e-7, 1e-7);
  const Spinors K = B.ev.spinor_K(z);
  CHECK(rel_err(K.K1, x.a * std::pow(z, (1 - al) / 2)) < 1e-5);
  CHECK(rel_err(K.K2, (x.a + al * x.c) * std::pow(z, (1 + al) / 2)) < 1e-5);

  // g ~ lambda mu (a + alpha c)/a z^alpha
  const WeierstrassData w = B.ev.weierstrass_at(z);
  CHECK(rel_err(w.g, B.prep.lm.lambda * B.prep.lm.mu * (x.a + al * x.c) / x.a * std::pow(z, al)) < 1e-5);
}

TEST_CASE("with b = c = 0 the spinors are a z^(1-alpha)/2 (1-z)^(1-gamma)/2 sigma") {
  const Built& B = symmetric();
  const WeierstrassEvaluator ev(B.prep, {0.7, 0.0, 0.0});
  const auto& e = B.prep.exps;
  for (cplx z : {cplx(0.2, 0.1), cplx(-2.0, 1.0), cplx(3.0, 0.5)}) {
    const auto s = specfun::sigma_global(e, B.prep.cm, z);
    const cplx pre = 0.7 * specfun::branch_pow(z, (1 - e.alpha) / 2, specfun::Branch::log_at_0) *
                     specfun::branch_pow(z, (1 - e.gamma) / 2, specfun::Branch::pow_1_minus_z);
    const Spinors K = ev.spinor_K(z);
    CHECK(rel_err(K.K1, pre * s.w1) < 1e-14);
    CHECK(rel_err(K.K2, pre * s.w2) < 1e-14);
  }
}

TEST_CASE("Hopf differential and Gauss map") {
  const Built& B = symmetric();
  std::mt19937_64 rng(43);
  for (int i = 0; i < 50; ++i) {
    const cplx z = random_point(rng);
    const WeierstrassData w = B.ev.weierstrass_at(z);
    CHECK(rel_err(w.Q_dz2 * z * z * (z - 1.0) * (z - 1.0) / I, B.prep.phi(z)) < 1e-9);
    // Q = omega dg
    const double h = 1e-5;
    const cplx dg = (B.ev.weierstrass_at(z + h).g - B.ev.weierstrass_at(z - h).g) / (2 * h);
    CHECK(rel_err(w.omega_dz * dg, w.Q_dz2) < 1e-7);
    CHECK(std::abs(B.ev.gauss_map(z).norm() - 1.0) < 1e-14);
  }
  // the x1-axis corresponds to imaginary g
  for (double x : {0.1, 0.35, 0.5, 0.77, 0.93}) {
    const cplx g = B.ev.weierstrass_at(cplx(x, 0.0)).g;
    CHECK(std::abs(g.real()) < 1e-12 * std::abs(g));
  }
}

TEST_CASE("first and second fundamental forms match the immersion") {
  const Built& B = symmetric();
  for (cplx z : {cplx(0.4, 0.6), cplx(-0.8, 1.3), cplx(2.2, 0.4)}) {
    const double h = 1e-3;
    auto x = [&](double du, double dv) { return B.ev.immerse(z + cplx(du, dv)); };
    const Vec3 c = x(0, 0);
    const Vec3 xu = (x(h, 0) - x(-h, 0)) / (2 * h), xv = (x(0, h) - x(0, -h)) / (2 * h);
    const Vec3 xuu = (x(h, 0) - 2 * c + x(-h, 0)) / (h * h), xvv = (x(0, h) - 2 * c + x(0, -h)) / (h * h);
    const Vec3 xuv = (x(h, h) - x(h, -h) - x(-h, h) + x(-h, -h)) / (4 * h * h);
    const Forms f = B.ev.first_second_forms(z);
    const Vec3 n = B.ev.gauss_map(z);
    CHECK(rel_err(xu.squaredNorm(), f.I) < 1e-5);
    CHECK(rel_err(xv.squaredNorm(), f.I) < 1e-5);
    CHECK(std::abs(xu.dot(xv)) < 1e-5 * f.I);
    // orientation: N follows x_u x x_v
    CHECK((xu.cross(xv).normalized() - n).norm() < 1e-5);
    const double scale = std::abs(f.II[0]) + std::abs(f.II[1]);
    CHECK(std::abs(xuu.dot(n) - f.II[0]) < 1e-4 * scale);
    CHECK(std::abs(xuv.dot(n) - f.II[1]) < 1e-4 * scale);
    CHECK(std::abs(xvv.dot(n) - f.II[3]) < 1e-4 * scale);
    CHECK(std::abs(f.II[0] + f.II[3]) < 1e-12 * scale);
  }
}

TEST_CASE("immersion is path independent") {
  const Built& B = symmetric();
  CHECK(B.ev.immerse(B.ev.basepoint()).norm() == 0.0);
  std::mt19937_64 rng(47);
  for (int i = 0; i < 50; ++i) {
    const cplx z = random_point(rng), w = random_point(rng);
    const Vec3 direct = B.ev.immerse(z);
    // detours that wind around neither puncture
    std::vector<cplx> via{w};
    try {
      const Vec3 detour = B.ev.immerse(z, via);
      CHECK((direct - detour).lpNorm<Eigen::Infinity>() < 2e-8);
    } catch (const InvalidInput&) {
      // the detour crossed an exclusion disk
    }
  }
}

TEST_CASE("image of (0, 1) is a straight line") {
  const Built& B = symmetric();
  std::vector<Vec3> pts;
  for (double x = 0.05; x < 0.96; x += 0.05) pts.push_back(B.ev.immerse(cplx(x, 0.0)));
  const Vec3 d = (pts.back() - pts.front()).normalized();
  double scale = (pts.back() - pts.front()).norm(), worst = 0;
  for (const auto& p : pts) {
    const Vec3 r = p - pts.front();
    worst = std::max(worst, (r - r.dot(d) * d).norm());
  }
  CHECK(worst < 1e-6 * scale);
}

TEST_CASE("zero of Q is a simple branch point of g") {
  const Built& B = symmetric();
  const cplx a1 = B.prep.phi.a1;
  REQUIRE(a1.imag() > 0);
  auto dg = [&](double h) {
    const cplx z = a1 + h * cplx(0.6, 0.8);
    const WeierstrassData w = B.ev.weierstrass_at(z);
    return std::abs(w.Q_dz2 / w.omega_dz);
  };
  const double order = std::log(dg(1e-3) / dg(1e-4)) / std::log(10.0);
  CHECK(std::abs(order - 1.0) < 0.1);
}

TEST_CASE("mesh of the symmetric configuration") {
  const Built& B = symmetric();
  MeshOptions opt;
  opt.resolution = 48;
  const SurfaceMesh m = generate_mesh(B.ev, opt);
  CHECK_NOTHROW(validate(m));
  for (const auto& f : m.faces) {
    const cplx a = m.vertices[f[0]].z, b = m.vertices[f[1]].z, c = m.vertices[f[2]].z;
    CHECK((std::conj(b - a) * (c - a)).imag() > 0.0);  // counter-clockwise in the z-chart
  }
  for (int tag = 1; tag <= 3; ++tag) {
    for (int id : m.tagged(tag)) CHECK(m.vertices[id].z.imag() == 0.0);
  }

  const geometry::TripleConfig cfg{0.6, 0.6, 0.6, 1.0, 1.0, 1.0, 1};
  geometry::LineTriple fitted;
  for (int k = 1; k <= 3; ++k) {
    const LineFit f = fit_line(m, k);
    CHECK(f.max_deviation < 1e-5 * f.scale);
    CHECK(f.residual < 1e-5);
    fitted[k - 1] = f.line;
  }
  CHECK(rel_err(geometry::signed_distance(fitted[0], fitted[1]), -1.0) < 1e-4);
  CHECK(rel_err(geometry::signed_distance(fitted[2], fitted[0]), -1.0) < 1e-4);
  CHECK(rel_err(geometry::signed_distance(fitted[1], fitted[2]), -1.0) < 1e-4);
  const geometry::TripleConfig back = geometry::classify_triple(fitted);
  CHECK(back.alpha0 == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(back.eps0 == 1);

  // the translation puts the fitted D2 on the x1-axis and matches the reference lines
  const auto ref = geometry::lines_from_config(cfg);
  for (int k = 0; k < 3; ++k) {
    CHECK((fitted[k].direction - ref[k].direction).norm() < 1e-9);
    const Vec3 off = fitted[k].point - ref[k].point;
    CHECK((off - off.dot(ref[k].direction) * ref[k].direction).norm() < 1e-8);
  }
}

TEST_CASE("meshes of other configurations classify back") {
  const geometry::TripleConfig cases[] = {{0.45, 0.7, 0.55, 1.3, -0.7, 2.0, 1}, {0.45, 0.7, 0.55, 1.3, -0.7, 2.0, -1},
                                          {0.6, 0.6, 0.6, 1.0, 1.0, 1.0, -1}};
  for (const auto& cfg : cases) {
    const Built b = build(cfg);
    MeshOptions opt;
    opt.resolution = 24;
    const SurfaceMesh m = generate_mesh(b.ev, opt);
    geometry::LineTriple t;
    for (int k = 1; k <= 3; ++k) t[k - 1] = fit_line(m, k).line;
    const auto c = geometry::classify_triple(t);
    CHECK(c.alpha0 == doctest::Approx(cfg.alpha0).epsilon(1e-9));
    CHECK(c.beta0 == doctest::Approx(cfg.beta0).epsilon(1e-9));
    CHECK(c.gamma0 == doctest::Approx(cfg.gamma0).epsilon(1e-9));
    CHECK(rel_err(c.A, cfg.A) < 1e-6);
    CHECK(rel_err(c.B, cfg.B) < 1e-6);
    CHECK(rel_err(c.C, cfg.C) < 1e-6);
    CHECK(c.eps0 == cfg.eps0);
  }
}

TEST_CASE("end asymptotics") {
  const Built& B = symmetric();
  for (End e : {End::zero, End::one, End::infinity}) {
    const EndAsymptotics a = fit_end_asymptotics(B.ev, e);
    CHECK(rel_err(a.A, 1.0) < 1e-6);
    CHECK(a.alpha == 0.6);
  }
  const Built b = build({0.45, 0.7, 0.55, 1.3, -0.7, 2.0, -1});
  CHECK(b.prep.eps == -1);
  CHECK(rel_err(fit_end_asymptotics(b.ev, End::zero).A, 1.3) < 1e-6);
  CHECK(rel_err(fit_end_asymptotics(b.ev, End::infinity).A, -0.7) < 1e-6);
  CHECK(rel_err(fit_end_asymptotics(b.ev, End::one).A, 2.0) < 1e-6);
}

TEST_CASE("finite-difference mean curvature converges to zero") {
  const Built& B = symmetric();
  MeshOptions coarse, fine;
  coarse.resolution = 32;
  fine.resolution = 64;
  const SurfaceMesh mc = generate_mesh(B.ev, coarse), mf = generate_mesh(B.ev, fine);
  for (int order : {2, 4}) {
    const CurvatureStats c = fd_mean_curvature(mc, 0.5, order), f = fd_mean_curvature(mf, 0.5, order);
    CHECK(f.samples > c.samples);
    CHECK(f.max_abs < 0.5 * c.max_abs);
    CHECK(f.rms < 0.5 * c.rms);
  }
}

TEST_CASE("mesh export") {
  const Built& B = symmetric();
  MeshOptions opt;
  opt.resolution = 10;
  const SurfaceMesh m = generate_mesh(B.ev, opt);
  std::ostringstream obj;
  write_obj(obj, m);
  const std::string s = obj.str();
  for (const char* seg : {"# seg 1\n", "# seg 2\n", "# seg 3\n"}) CHECK(s.find(seg) != std::string::npos);
  std::istringstream in(s);
  std::string line;
  size_t v = 0, vn = 0, f = 0;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("vn ", 0) == 0) ++vn;
    if (line.rfind("f ", 0) == 0) ++f;
  }
  CHECK(v == m.vertices.size());
  CHECK(vn == m.vertices.size());
  CHECK(f == m.faces.size());

  std::ostringstream ply;
  write_ply(ply, m);
  const std::string p = ply.str();
  const auto end = p.find("end_header\n");
  REQUIRE(end != std::string::npos);
  CHECK(p.size() - end - 11 == m.vertices.size() * (3 * 8 + 3 * 4 + 1) + m.faces.size() * (1 + 3 * 4));
}

TEST_CASE("surface errors") {
  const Built& B = symmetric();
  CHECK_THROWS_AS(B.ev.spinor_K(0.0), DomainError);
  CHECK_THROWS_AS(B.ev.spinor_K(cplx(1.0, 1e-9)), DomainError);
  CHECK_THROWS_AS(B.ev.integrate_segment(cplx(-0.5, 1e-4), cplx(0.5, 1e-4)), InvalidInput);
  CHECK_THROWS_AS(B.ev.immerse(cplx(2.0, -0.5)), InvalidInput);
  MeshOptions opt;
  opt.resolution = 1;
  CHECK_THROWS_AS(generate_mesh(B.ev, opt), InvalidInput);
  opt.resolution = 8;
  opt.window.y_max = 0.5;
  CHECK_THROWS_AS(generate_mesh(B.ev, opt), InvalidInput);
  CHECK_THROWS_AS(WeierstrassEvaluator(B.prep, B.ev.abc(), cplx(0.5, 0.0)), InvalidInput);
}
