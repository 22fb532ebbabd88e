#include "threelines/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "threelines/error.hpp"

namespace threelines::solver {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

struct Branchwise {
  std::array<double, 3> rho;    // eps * (A alpha, B beta, C gamma) / 2 pi
  std::array<double, 3> kappa;  // (alpha, beta, gamma)
};

Branchwise coefficients(const EndParameters& e, int eps) {
  return {{eps * e.A * e.alpha / kTwoPi, eps * e.B * e.beta / kTwoPi, eps * e.C * e.gamma / kTwoPi},
          {e.alpha, e.beta, e.gamma}};
}

// F(y) = sum s_i sqrt(rho_i + kappa_i^2 y^2) - y
double f_branch(const Branchwise& bw, const std::array<int, 3>& s, double y) {
  double sum = -y;
  for (int i = 0; i < 3; ++i) sum += s[i] * std::sqrt(std::max(0.0, bw.rho[i] + bw.kappa[i] * bw.kappa[i] * y * y));
  return sum;
}

// u F(1/u) = sign(u) sum s_i sqrt(rho_i u^2 + kappa_i^2) - 1, smooth through u = 0
double g_branch(const Branchwise& bw, const std::array<int, 3>& s, double u) {
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += s[i] * std::sqrt(std::max(0.0, bw.rho[i] * u * u + bw.kappa[i] * bw.kappa[i]));
  return (u < 0 ? -sum : sum) - 1.0;
}

template <class Fn>
void scan(Fn f, double lo, double hi, int n, double tol, std::vector<double>& roots) {
  double x0 = lo, f0 = f(lo);
  if (f0 == 0.0) roots.push_back(lo);
  for (int k = 1; k <= n; ++k) {
    const double x1 = lo + (hi - lo) * k / n;
    const double f1 = f(x1);
    if (f1 == 0.0) {
      roots.push_back(x1);
    } else if (f0 != 0.0 && (f0 < 0) != (f1 < 0)) {
      double a = x0, b = x1, fa = f0;
      while (b - a > tol * std::max(1.0, std::abs(a))) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    f0 = f1;
  }
}

void polish(double& p, double& q, double& r, const EndParameters& ends, int eps) {
  const Branchwise bw = coefficients(ends, eps);
  Eigen::Vector3d x(p, q, r);
  auto resid = [&](const Eigen::Vector3d& v) {
    const double s = v.sum();
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) out[i] = v[i] * v[i] - bw.kappa[i] * bw.kappa[i] * s * s - bw.rho[i];
    return out;
  };
  Eigen::Vector3d res = resid(x);
  for (int it = 0; it < 8 && res.cwiseAbs().maxCoeff() > 1e-16; ++it) {
    const double s = x.sum();
    Eigen::Matrix3d j;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) j(i, k) = (i == k ? 2.0 * x[i] : 0.0) - 2.0 * bw.kappa[i] * bw.kappa[i] * s;
    const Eigen::Vector3d trial = x - j.fullPivLu().solve(res);
    const Eigen::Vector3d tres = resid(trial);
    if (!trial.allFinite() || tres.cwiseAbs().maxCoeff() >= res.cwiseAbs().maxCoeff()) break;
    x = trial;
    res = tres;
  }
  p = x[0];
  q = x[1];
  r = x[2];
}

}  // namespace

EndParameters make_ends(const TripleConfig& cfg, const Lifted& l) {
  if (cfg.A == 0.0 || cfg.B == 0.0 || cfg.C == 0.0) throw InvalidInput("A, B, C must be non-zero");
  for (double x : {l.alpha, l.beta, l.gamma}) {
    if (is_integer(x)) throw InvalidInput("end angles must be non-integer");
  }
  if (!geometry::congruent_mod2(l.alpha, cfg.alpha0) || !geometry::congruent_mod2(l.beta, cfg.beta0) ||
      !geometry::congruent_mod2(l.gamma, cfg.gamma0)) {
    throw InvalidInput("lifted angles are not congruent to the configuration mod 2");
  }
  return {cfg.A, l.alpha, cfg.B, l.beta, cfg.C, l.gamma};
}

const char* to_string(RootClass c) {
  switch (c) {
    case RootClass::conjugate_pair: return "conjugate_pair";
    case RootClass::double_real: return "double_real";
    case RootClass::distinct_real: return "distinct_real";
  }
  return "?";
}

PhiPolynomial build_phi(const EndParameters& e) {
  PhiPolynomial ph;
  const double a = e.A * e.alpha / kTwoPi, b = e.B * e.beta / kTwoPi, c = e.C * e.gamma / kTwoPi;
  ph.c2 = b;
  ph.c1 = -b - a + c;
  ph.c0 = a;
  // (c - a - b)^2 - 4ab = a^2 + b^2 + c^2 - 2ab - 2ac - 2bc
  ph.discriminant = a * a + b * b + c * c - 2 * a * b - 2 * a * c - 2 * b * c;
  const double scale = a * a + b * b + c * c;
  if (std::abs(ph.discriminant) <= 1e-12 * scale) {
    ph.root_class = RootClass::double_real;
    ph.a1 = ph.a2 = -ph.c1 / (2 * ph.c2);
  } else if (ph.discriminant < 0) {
    ph.root_class = RootClass::conjugate_pair;
    const double im = std::sqrt(-ph.discriminant) / (2 * std::abs(ph.c2));
    ph.a1 = cplx(-ph.c1 / (2 * ph.c2), im);
    ph.a2 = std::conj(ph.a1);
  } else {
    ph.root_class = RootClass::distinct_real;
    // stable quadratic formula
    const double sq = std::sqrt(ph.discriminant);
    const double qq = -0.5 * (ph.c1 + (ph.c1 >= 0 ? sq : -sq));
    double r1 = qq / ph.c2, r2 = ph.c0 / qq;
    if (r1 > r2) std::swap(r1, r2);
    ph.a1 = r1;
    ph.a2 = r2;
  }
  return ph;
}

int epsilon_sign(int eps0, double alpha, const ConnectionMatrices& cm) {
  const double n21 = cm.nu(1, 0).real();
  if (std::abs(n21) < 1e-14) throw NumericalFailure("nu21 vanishes; the exponents sit at a Gamma pole");
  return eps0 * cm.nu(0, 0).real() / (alpha * n21) > 0 ? 1 : -1;
}

std::array<double, 3> pqr_residuals(double p, double q, double r, const EndParameters& ends, int eps) {
  const Branchwise bw = coefficients(ends, eps);
  const double s = p + q + r;
  const std::array<double, 3> x{p, q, r};
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = x[i] * x[i] - bw.kappa[i] * bw.kappa[i] * s * s - bw.rho[i];
  return out;
}

std::vector<PqrSolution> solve_pqr(const EndParameters& ends, int eps, const ScanOptions& opt) {
  const Branchwise bw = coefficients(ends, eps);
  double ymin = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (bw.rho[i] < 0) ymin = std::max(ymin, std::sqrt(-bw.rho[i]) / std::abs(bw.kappa[i]));
  }
  const double Y = 10.0 * (1.0 + ymin);
  const PhiPolynomial phi = build_phi(ends);

  std::vector<PqrSolution> found;
  for (int code = 0; code < 8; ++code) {
    const std::array<int, 3> s{code & 4 ? -1 : 1, code & 2 ? -1 : 1, code & 1 ? -1 : 1};
    auto f = [&](double y) { return f_branch(bw, s, y); };
    auto g = [&](double u) { return g_branch(bw, s, u); };
    std::vector<double> ys;
    if (ymin == 0.0) {
      scan(f, -Y, Y, 2 * opt.grid, opt.bisect_tol, ys);
    } else {
      scan(f, -Y, -ymin, opt.grid, opt.bisect_tol, ys);
      scan(f, ymin, Y, opt.grid, opt.bisect_tol, ys);
    }
    // tails |y| > Y in the inverted variable u = 1/y
    std::vector<double> us;
    scan(g, 1e-300, 1.0 / Y, opt.grid, opt.bisect_tol, us);
    scan(g, -1.0 / Y, -1e-300, opt.grid, opt.bisect_tol, us);
    for (double u : us) ys.push_back(1.0 / u);

    for (double y : ys) {
      PqrSolution sol;
      sol.eps = eps;
      sol.branch = s;
      double v[3];
      for (int i = 0; i < 3; ++i) v[i] = s[i] * std::sqrt(std::max(0.0, bw.rho[i] + bw.kappa[i] * bw.kappa[i] * y * y));
      polish(v[0], v[1], v[2], ends, eps);
      const auto res = pqr_residuals(v[0], v[1], v[2], ends, eps);
      sol.residual = std::max({std::abs(res[0]), std::abs(res[1]), std::abs(res[2])});
      if (!(sol.residual < opt.accept_tol)) continue;
      sol.p = v[0];
      sol.q = v[1];
      sol.r = v[2];
      sol.y = sol.p + sol.q + sol.r;
      // representative of {x, -x}: the lexicographically larger one
      if (std::make_tuple(-sol.p, -sol.q, -sol.r) > std::make_tuple(sol.p, sol.q, sol.r)) {
        sol.p = -sol.p;
        sol.q = -sol.q;
        sol.r = -sol.r;
        sol.y = -sol.y;
        for (int& b : sol.branch) b = -b;
      }
      const bool dup = std::any_of(found.begin(), found.end(), [&](const PqrSolution& o) {
        return std::abs(o.p - sol.p) < 1e-9 && std::abs(o.q - sol.q) < 1e-9 && std::abs(o.r - sol.r) < 1e-9;
      });
      if (dup) continue;
      if (phi.root_class == RootClass::double_real) {
        std::ostringstream os;
        os.precision(17);
        os << "singular_point_at(" << phi.a1.real() << ")";
        sol.flags.push_back(os.str());
      }
      found.push_back(sol);
    }
  }
  std::sort(found.begin(), found.end(), [](const PqrSolution& a, const PqrSolution& b) {
    return std::make_tuple(a.p, a.q, a.r) > std::make_tuple(b.p, b.q, b.r);
  });
  return found;
}

Abc pqr_to_abc(double p, double q, double r, const Lifted& l) {
  const double s = p + q + r;
  return {p - l.alpha * s, q - (1.0 - l.alpha - l.gamma) * s, 2.0 * s};
}

std::array<double, 3> abc_to_pqr(const Abc& x, const Lifted& l) {
  return {x.a + l.alpha * x.c / 2.0, x.b + (1.0 - l.alpha - l.gamma) * x.c / 2.0,
          -x.a - x.b + l.gamma * x.c / 2.0};
}

std::array<double, 3> abc_residuals(const Abc& x, const EndParameters& e, int eps) {
  const double smmm = (1.0 - e.alpha - e.beta - e.gamma) / 2.0;
  const double smpm = (1.0 - e.alpha + e.beta - e.gamma) / 2.0;
  return {x.a * (x.a + e.alpha * x.c) - eps * e.A * e.alpha / kTwoPi,
          (x.b + smmm * x.c) * (x.b + smpm * x.c) - eps * e.B * e.beta / kTwoPi,
          (x.a + x.b) * (x.a + x.b - e.gamma * x.c) - eps * e.C * e.gamma / kTwoPi};
}

LambdaMu normalize_lambda_mu(int eps, const Lifted& l, const FrameAngles& frame,
                             const ConnectionMatrices& cm, bool reflect) {
  const double v = frame.t * cm.nu(0, 0).real() / (eps * l.alpha * cm.nu(1, 0).real());
  if (!(v > 0.0)) throw InvalidInput("t nu11 / nu21 and eps alpha differ in sign; no real mu");
  LambdaMu out;
  out.mu = std::sqrt(v);
  out.lambda = cplx(0.0, -eps * l.alpha) * out.mu;
  if (reflect) {
    out.lambda *= cplx(0.0, -1.0);
    out.mu *= cplx(0.0, 1.0);
  }
  return out;
}

HatLambda hat_lambda_values(double p, double q, double r, int eps, const Lifted& l) {
  const double a2 = l.alpha * l.alpha, b2 = l.beta * l.beta, g2 = l.gamma * l.gamma;
  const double s = eps * (p + q + r);
  return {s * ((g2 - b2) * (2 * p + q + r) + (1 - a2) * (q - r)),
          s * ((a2 - b2) * (p + q + 2 * r) + (1 - g2) * (q - p))};
}

double hat_lambda_difference(double p, double q, double r, int eps, const Lifted& l) {
  const double a2 = l.alpha * l.alpha, b2 = l.beta * l.beta, g2 = l.gamma * l.gamma;
  return eps * (p + q + r) * ((a2 - g2) * (p + 2 * q + r) + (1 - b2) * (r - p));
}

Prepared prepare(const TripleConfig& cfg, const Lifted& lifted, bool reflect) {
  Prepared P;
  P.cfg = cfg;
  P.lifted = lifted;
  P.ends = make_ends(cfg, lifted);
  P.exps = specfun::make_exponents(lifted.alpha, lifted.beta, lifted.gamma);
  P.cm = specfun::connection_matrices(P.exps);
  P.frame = geometry::frame_angles(cfg, lifted);
  P.phi = build_phi(P.ends);
  P.eps = epsilon_sign(cfg.eps0, lifted.alpha, P.cm);
  P.lm = normalize_lambda_mu(P.eps, lifted, P.frame, P.cm, reflect);
  return P;
}

}  // namespace threelines::solver
