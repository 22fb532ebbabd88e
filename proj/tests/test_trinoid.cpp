#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "support.hpp"
#include "threelines/error.hpp"
#include "threelines/trinoid.hpp"

using namespace threelines;
using namespace threelines::trinoid;
using surface::End;
using testing_support::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

const CousinData& symmetric() {
  static const CousinData d = cousin_data({0.6, 0.6, 0.6, {}});
  return d;
}

// Moebius map through three point pairs, normalized with d = 1.
struct Moebius {
  cplx a, b, c;
  cplx operator()(cplx x) const { return (a * x + b) / (c * x + 1.0); }
};

Moebius fit_moebius(const std::array<cplx, 3>& x, const std::array<cplx, 3>& y) {
  Eigen::Matrix3cd M;
  Eigen::Vector3cd rhs;
  for (int i = 0; i < 3; ++i) {
    M.row(i) << x[i], 1.0, -x[i] * y[i];
    rhs[i] = y[i];
  }
  const Eigen::Vector3cd s = M.partialPivLu().solve(rhs);
  return {s[0], s[1], s[2]};
}

Mat2c random_sl2(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat2c F;
  F << cplx(n(rng), n(rng)), cplx(n(rng), n(rng)), cplx(n(rng), n(rng)), cplx(n(rng), n(rng));
  return F / std::sqrt(F.determinant());
}

}  // namespace

TEST_CASE("reduced angles and lifts") {
  CHECK(reduce_mod2(0.6) == doctest::Approx(0.6));
  CHECK(reduce_mod2(1.4) == doctest::Approx(-0.6));
  CHECK(reduce_mod2(2.6) == doctest::Approx(0.6));
  CHECK(reduce_mod2(-1.0) == 1.0);
  CHECK(reduce_mod2(1.0) == 1.0);

  // |[1.4]| = 0.6 and -1.4 = 0.6 - 2; |[2.3]| = 0.3 and 2.3 = 0.3 + 2
  const Lifted l = trinoid_lifts({1.4, 0.6, 2.3, {}});
  CHECK(l.alpha == doctest::Approx(-1.4));
  CHECK(l.gamma == doctest::Approx(0.6));
  CHECK(l.beta == doctest::Approx(2.3));

  const Lifted o = trinoid_lifts({0.6, 0.6, 0.6, Lifted{-1.4, 2.6, 0.6}});
  CHECK(o.alpha == -1.4);
  CHECK(o.beta == 2.6);
  CHECK_THROWS_AS(trinoid_lifts({0.6, 0.6, 0.6, Lifted{1.4, 0.6, 0.6}}), InvalidInput);
}

TEST_CASE("trinoid right-hand side") {
  const auto e = trinoid_rhs({0.6, 0.6, 0.6, {}});
  for (auto [A, a] : {std::pair{e.A, e.alpha}, {e.B, e.beta}, {e.C, e.gamma}}) {
    CHECK(A * a / (2 * kPi) == doctest::Approx(-0.16).epsilon(1e-14));
  }
  CHECK_THROWS_AS(trinoid_rhs({1.0, 0.6, 0.6, {}}), InvalidInput);
  CHECK_THROWS_AS(trinoid_rhs({0.6, 0.6, -0.6, {}}), InvalidInput);
  const auto f = trinoid_rhs({1.4, 0.6, 0.6, {}});
  CHECK(f.alpha == doctest::Approx(-1.4));
  CHECK(f.A * f.alpha / (2 * kPi) == doctest::Approx((1.96 - 1.0) / 4.0));
}

TEST_CASE("growth conditions") {
  const GrowthCheck a = growth_check({0.6, 0.6, 0.6, {}});
  CHECK(a.in_K);
  CHECK(a.umehara);
  CHECK(a.umehara_equivalent);
  CHECK(a.nondegenerate);

  const GrowthCheck b = growth_check({0.2, 0.2, 0.2, {}});
  CHECK_FALSE(b.in_K);
  CHECK_FALSE(b.umehara);
  CHECK(b.umehara_equivalent);

  // 3 m^2 - 6 m^2 + 6 m - 3 at m = 1/4
  const GrowthCheck c = growth_check({0.5, 0.5, 0.5, {}});
  CHECK(c.nondegeneracy == doctest::Approx(3.0 / 16 - 6.0 / 16 + 1.5 - 3.0));
  CHECK(c.nondegenerate);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 3.99);
  for (int k = 0; k < 2000; ++k) {
    TrinoidSpec s{u(rng), u(rng), u(rng), {}};
    CHECK(growth_check(s).umehara_equivalent);
  }
}

TEST_CASE("U + V + W is -4 times the discriminant of Phi") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  for (int k = 0; k < 300; ++k) {
    const Lifted l{u(rng), u(rng), u(rng)};
    const Quartics q = quartics(l);
    const double disc = phi_discriminant(l);
    CHECK(std::abs(q.U + q.V + q.W + 4 * disc) <= 1e-9 * std::max(1.0, std::abs(disc)));
    // Phi = -2 phi for the trinoid right-hand side, so disc Phi = 4 disc phi
    const double A = 2 * kPi * (l.alpha * l.alpha - 1) / (4 * l.alpha);
    const double B = 2 * kPi * (l.beta * l.beta - 1) / (4 * l.beta);
    const double C = 2 * kPi * (l.gamma * l.gamma - 1) / (4 * l.gamma);
    const auto phi = solver::build_phi({A, l.alpha, B, l.beta, C, l.gamma});
    CHECK(std::abs(4 * phi.discriminant - disc) <= 1e-9 * std::max(1.0, std::abs(disc)));
  }
}

TEST_CASE("closed-form trinoid solution") {
  // symmetric case: p = q = r and p^2 (1 - 9 a^2) = (a^2 - 1)/4
  const TrinoidSolution s = trinoid_pqr({0.6, 0.6, 0.6, {}});
  CHECK(s.delta_real);
  CHECK(s.pqr.eps == 1);
  for (double x : {s.pqr.p, s.pqr.q, s.pqr.r}) CHECK(x == doctest::Approx(1 / std::sqrt(14.0)).epsilon(1e-14));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 3.95);
  int built = 0, negative = 0;
  while (built < 200) {
    const TrinoidSpec spec{u(rng), u(rng), u(rng), {}};
    if (!growth_check(spec).in_K) continue;
    const TrinoidSolution t = trinoid_pqr(spec);
    ++built;
    negative += t.pqr.eps < 0;
    const auto rhs = trinoid_rhs(spec);
    const auto r = solver::pqr_residuals(t.pqr.p, t.pqr.q, t.pqr.r, rhs, t.pqr.eps);
    const double mag = 1 + t.pqr.y * t.pqr.y;
    for (double x : r) CHECK(std::abs(x) < 1e-10 * mag);
    CHECK(std::abs(t.hat.at0) < 1e-10 * mag);
    CHECK(std::abs(t.hat.at1) < 1e-10 * mag);
    // the sign of the system follows the sign of Pi
    CHECK((quartics(t.lifted).Pi < 0) == (t.pqr.eps == 1));
  }
  CHECK(negative > 0);

  CHECK_THROWS_AS(trinoid_pqr({0.2, 0.2, 0.2, {}}), InvalidInput);
  // 1 + 3.9 - 3.7 - 1.2 = 0 while the reduced angles (0.1, 0.8, 0.3) lie in K
  REQUIRE(growth_check({3.9, 1.2, 3.7, {}}).in_K);
  CHECK_THROWS_AS(trinoid_pqr({3.9, 1.2, 3.7, {}}), InvalidInput);
}

TEST_CASE("cousin data realizes the sign of the system") {
  const CousinData& d = symmetric();
  CHECK(d.prep.eps == 1);
  CHECK(d.cfg.alpha0 == doctest::Approx(0.6));
  const CousinData h = half_integer_data({0.6, 0.6, 0.6, {}}, 0);
  CHECK(h.prep.eps == -1);
  CHECK(h.p == 0.5);
  CHECK(h.r == -0.5);
  const auto r = solver::pqr_residuals(h.p, h.q, h.r, h.prep.ends, -1);
  for (double x : r) CHECK(std::abs(x) < 1e-14);
  CHECK_THROWS_AS(half_integer_data({0.6, 0.6, 0.6, {}}, 3), InvalidInput);

  const CousinData e = cousin_data({1.4, 0.7, 0.5, {}});
  CHECK(e.prep.lifted.alpha == doctest::Approx(-1.4));
  CHECK(e.prep.eps == trinoid_pqr(e.spec).pqr.eps);
}

TEST_CASE("half-space conversion") {
  const HyperbolicPoint o = cousin_point(Mat2c::Identity());
  CHECK(std::abs(o.w) < 1e-15);
  CHECK(o.y3 == doctest::Approx(1.0));

  Mat2c D = Mat2c::Zero();
  D(0, 0) = 2.5;
  D(1, 1) = 0.4;
  const HyperbolicPoint d = cousin_point(D);
  CHECK(std::abs(d.w) < 1e-15);
  CHECK(d.y3 == doctest::Approx(1.0 / 6.25));

  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    const Mat2c F = random_sl2(rng);
    const Mat2c M = F * F.adjoint();
    const Mat2c back = hermitian_from_point(cousin_point(F));
    CHECK((back - M).cwiseAbs().maxCoeff() < 1e-10 * M.cwiseAbs().maxCoeff());
    const Eigen::Vector4d x = hyperboloid(M);
    CHECK(-x[0] * x[0] + x.tail<3>().squaredNorm() == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(x[0] > 0);
    CHECK(ball_point(M).norm() < 1.0);
  }
  CHECK_THROWS_AS(hermitian_from_point({0.0, -1.0}), InvalidInput);
}

TEST_CASE("Bryant frame") {
  const auto& ev = symmetric().ev;
  const BryantFrame id = integrate_bryant(ev, ev.basepoint());
  CHECK((id.F - Mat2c::Identity()).norm() == 0.0);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> x(-3.0, 4.0), y(0.05, 3.0);
  auto point = [&] {
    for (;;) {
      const cplx z(x(rng), y(rng));
      if (std::abs(z) > 0.1 && std::abs(z - 1.0) > 0.1) return z;
    }
  };
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const cplx z = point();
    worst = std::max(worst, integrate_bryant(ev, z, {point()}).det_drift);
  }
  CHECK(worst < 1e-8);

  // a path followed by its reverse
  const cplx a(0.3, 0.4), b(-1.2, 1.7);
  const Mat2c loop = transport(ev, a, b).F * transport(ev, b, a).F;
  CHECK((loop - Mat2c::Identity()).cwiseAbs().maxCoeff() < 1e-8);

  // homotopic paths in the upper half-plane give the same frame
  const Mat2c p1 = integrate_bryant(ev, cplx(2.5, 0.2), {cplx(-1.0, 2.0)}).F;
  const Mat2c p2 = integrate_bryant(ev, cplx(2.5, 0.2), {cplx(0.5, 0.05)}).F;
  CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-8 * p1.cwiseAbs().maxCoeff());

  CHECK_THROWS_AS(transport(ev, cplx(0.5, 0.5), cplx(0.5, -0.5)), DomainError);
  CHECK_THROWS_AS(transport(ev, cplx(-0.5, 0.0), cplx(0.5, 0.0)), DomainError);
}

TEST_CASE("hyperbolic Gauss map in closed form") {
  solver::PhiPolynomial phi;
  phi.a1 = cplx(0.3, 0.8);
  phi.a2 = -phi.a1;
  CHECK(std::isinf(gauss_end_values(phi)[0].real()));

  // a1 + a2 = 2 a1 a2 with a1 = 2 gives a2 = 2/3
  phi.a1 = 2.0;
  phi.a2 = 2.0 / 3.0;
  auto G = gauss_end_values(phi);
  CHECK(std::abs(G[0] - G[1]) < 1e-14);
  CHECK(std::isinf(G[2].real()));

  phi.a1 = phi.a2 = 0.37;
  for (cplx z : {cplx(0.2, 0.1), cplx(-3.0, 2.0)}) CHECK(hyperbolic_gauss(z, phi) == z);

  phi.a1 = cplx(0.5, 1.0);
  phi.a2 = cplx(0.5, -1.0);
  CHECK_THROWS_AS(hyperbolic_gauss(0.5, phi), DomainError);
  G = gauss_end_values(phi);
  CHECK(std::abs(G[0] - hyperbolic_gauss(0.0, phi)) < 1e-15);
  CHECK(std::abs(G[1] - hyperbolic_gauss(1.0, phi)) < 1e-15);
}

TEST_CASE("frame Gauss map is a Moebius image of the closed form") {
  const CousinData& base = symmetric();
  // frames closer to the ends than the default clearance
  struct {
    solver::Prepared prep;
    surface::WeierstrassEvaluator ev;
  } const d{base.prep, surface::WeierstrassEvaluator(base.prep, base.ev.abc(), base.ev.basepoint(), {1e-11, 1e-6, 40})};
  const auto& phi = d.prep.phi;
  auto frame_g = [&](cplx z) { return frame_gauss(d.ev, integrate_bryant(d.ev, z).F, z); };
  const std::array<cplx, 3> fit{cplx(0.3, 0.7), cplx(-1.5, 1.2), cplx(2.0, 0.5)};
  std::array<cplx, 3> gx, gy;
  for (int i = 0; i < 3; ++i) gx[i] = hyperbolic_gauss(fit[i], phi), gy[i] = frame_g(fit[i]);
  const Moebius T = fit_moebius(gx, gy);
  for (cplx z : {cplx(0.8, 0.3), cplx(-0.4, 2.2), cplx(3.0, 1.0), cplx(0.5, 0.05)}) {
    CHECK(rel_err(frame_g(z), T(hyperbolic_gauss(z, phi))) < 1e-8);
  }

  // the ends: the Gauss map has a limit, and the surface point tends to it on the boundary sphere
  const auto G = gauss_end_values(phi);
  const cplx at_inf = T.a / T.c;
  const std::array<cplx, 3> limits{T(G[0]), T(G[1]), at_inf};
  const auto boundary = asymptotic_boundary_points(base.ev, 1e-4);
  auto end_point = [](int e, double r) { return e == 0 ? cplx(0, r) : e == 1 ? cplx(1, r) : cplx(0, 1 / r); };
  for (int e = 0; e < 3; ++e) {
    // G is holomorphic at the end, so it settles linearly in r
    CHECK(std::abs(boundary[e] - limits[e]) < 1e-3);
    const HyperbolicPoint near = cousin_point(integrate_bryant(d.ev, end_point(e, 1e-3)).F);
    const HyperbolicPoint far = cousin_point(integrate_bryant(d.ev, end_point(e, 1e-2)).F);
    CHECK(near.y3 < far.y3);
    CHECK(std::abs(near.w - limits[e]) < std::abs(far.w - limits[e]));
  }
  CHECK(std::abs(limits[0] - limits[1]) > 0.1);
}

TEST_CASE("boundary distinctness") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.05, 3.95);
  for (int k = 0; k < 1000; ++k) {
    const DistinctnessReport r = boundary_distinctness({u(rng), u(rng), u(rng), {}});
    CHECK(r.agree);
  }
  // growths in (0, 1) inside K: all distinct
  const DistinctnessReport s = boundary_distinctness({0.6, 0.7, 0.5, {}});
  for (int k = 0; k < 3; ++k) CHECK(s.distinct[k]);

  // 1 - mu0^2 - mu1^2 + mu_inf^2 = 0: ends 0 and 1 collide
  const double mi = std::sqrt(0.9 * 0.9 + 1.2 * 1.2 - 1.0);
  const DistinctnessReport c = boundary_distinctness({0.9, 1.2, mi, {}});
  CHECK_FALSE(c.distinct[0]);
  CHECK_FALSE(c.distinct_by_gauss[0]);
  CHECK(c.distinct[1]);
  CHECK(c.distinct[2]);
  CHECK(c.agree);

  // 1 - mu0^2 + mu1^2 - mu_inf^2 = 0: ends 0 and inf
  const DistinctnessReport c2 = boundary_distinctness({0.6, 1.3, std::sqrt(1 - 0.36 + 1.69), {}});
  CHECK_FALSE(c2.distinct[1]);
  CHECK_FALSE(c2.distinct_by_gauss[1]);
  CHECK(c2.agree);
}

TEST_CASE("embeddedness at the ends") {
  const CousinData& d = symmetric();
  for (End e : {End::zero, End::one, End::infinity}) {
    const EndCoefficients c = embeddedness_check(d.ev, e);
    CHECK(c.embedded);
  }
  for (const TrinoidSpec& spec : {TrinoidSpec{1.4, 0.7, 0.5, {}}, TrinoidSpec{0.3, 0.45, 0.6, {}}}) {
    const CousinData t = cousin_data(spec);
    for (End e : {End::zero, End::one, End::infinity}) CHECK(embeddedness_check(t.ev, e).embedded);
  }
  // (1/2,1/2,-1/2): end 1; (1/2,-1/2,1/2): end inf; (-1/2,1/2,1/2): end 0
  const End predicted[3] = {End::one, End::infinity, End::zero};
  for (int w = 0; w < 3; ++w) {
    const CousinData h = half_integer_data({0.6, 0.6, 0.6, {}}, w);
    for (End e : {End::zero, End::one, End::infinity}) {
      CAPTURE(w);
      CHECK(embeddedness_check(h.ev, e).embedded == (e == predicted[w]));
    }
  }
}

TEST_CASE("order -2 coefficient without the trinoid condition") {
  // a minimal disk with A = B = C = 1: the coefficient is (1 - alpha^2)/2 + 2 A alpha / 2 pi
  const geometry::TripleConfig cfg{0.6, 0.6, 0.6, 1.0, 1.0, 1.0, 1};
  const auto P = solver::prepare(cfg, {0.6, 0.6, 0.6});
  const auto s = solver::solve_pqr(P.ends, P.eps).front();
  const surface::WeierstrassEvaluator ev(P, solver::pqr_to_abc(s.p, s.q, s.r, P.lifted));
  const double want = (1 - 0.36) / 2 + 2 * 0.6 / (2 * kPi);
  for (End e : {End::zero, End::one, End::infinity}) {
    const EndCoefficients c = embeddedness_check(ev, e);
    CHECK(c.c_minus2 == doctest::Approx(want).epsilon(1e-6));
    CHECK_FALSE(c.embedded);
  }
}

TEST_CASE("growth read-off from the Hopf differential") {
  const CousinData d = cousin_data({1.4, 0.7, 0.5, {}});
  const std::array<std::pair<End, double>, 3> ends{{{End::zero, 1.4}, {End::one, 0.7}, {End::infinity, 0.5}}};
  for (auto [e, mu] : ends) {
    const auto fit = surface::fit_end_asymptotics(d.ev, e);
    // A alpha / 2 pi = (alpha^2 - 1)/4
    const double mu2 = 1 + 4 * fit.A * fit.alpha / (2 * kPi);
    CHECK(std::abs(std::sqrt(mu2) - mu) < 1e-8);
  }
}

TEST_CASE("trinoid mesh") {
  TrinoidMeshOptions opt;
  opt.mesh.resolution = 32;
  const TrinoidMesh m = trinoid_mesh(symmetric(), opt);
  CHECK(m.det_drift < 1e-8);
  for (const auto& p : m.planes) CHECK(p.residual < 1e-5);
  CHECK(m.plane_spread < 1e-4);
  CHECK(m.halfspace.vertices.size() == m.ball.vertices.size());
  for (const auto& v : m.ball.vertices) CHECK(v.x.norm() < 1.0);
  for (const auto& v : m.halfspace.vertices) CHECK(v.x.z() > 0.0);
  validate(m.halfspace);
  validate(m.ball);

  // the mirror copy lies on the surface too: boundary vertices are fixed by the reflection
  const size_t n = m.halfspace.vertices.size() / 2;
  double gap = 0;
  for (size_t k = 0; k < n; ++k) {
    if (m.halfspace.vertices[k].tag != 0) gap = std::max(gap, (m.ball.vertices[k].x - m.ball.vertices[k + n].x).norm());
  }
  CHECK(gap < 1e-6);

  opt.reflect = false;
  const TrinoidMesh half = trinoid_mesh(symmetric(), opt);
  CHECK(half.halfspace.vertices.size() == n);
  CHECK(half.halfspace.grid_nx > 0);
}

TEST_CASE("geodesic plane fit") {
  // points on the plane x1 = 0, which has normal e1
  std::vector<Eigen::Vector4d> pts;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (int k = 0; k < 20; ++k) {
    const double a = n(rng), b = n(rng);
    pts.emplace_back(std::sqrt(1 + a * a + b * b), 0.0, a, b);
  }
  const GeodesicPlane p = fit_plane(pts);
  CHECK(p.residual < 1e-12);
  CHECK(std::abs(std::abs(p.normal[1]) - 1.0) < 1e-12);
  GeodesicPlane q = p;
  q.normal = -q.normal;
  CHECK(plane_distance(p, q) == 0.0);
  CHECK_THROWS_AS(fit_plane({pts[0], pts[1]}), InvalidInput);
}
