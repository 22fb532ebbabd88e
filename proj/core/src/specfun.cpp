#include "threelines/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "threelines/error.hpp"

namespace threelines::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos coefficients for g = 671/128 (Numerical Recipes, 3rd ed.).
constexpr double kLanczosG = 5.24218750000000000;
constexpr double kLanczosC0 = 0.999999999999997092;
constexpr std::array<double, 14> kLanczos = {
    57.1562356658629235,     -59.5979603554754912,     14.1360979747417471,
    -0.491913816097620199,   .339946499848118887e-4,   .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3,   -.210264441724104883e-3,
    .217439618115212643e-3,  -.164318106536763890e-3,  .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};

bool is_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

cplx log_gamma_right(cplx z) {
  cplx tmp = z + kLanczosG;
  tmp = (z + 0.5) * std::log(tmp) - tmp;
  cplx ser = kLanczosC0;
  cplx y = z;
  for (double c : kLanczos) {
    y += 1.0;
    ser += c / y;
  }
  return tmp + std::log(2.5066282746310005 * ser / z);
}

// Angle in [0, pi] for a point of the closed upper half-plane. Tiny negative imaginary
// parts left by rounding are folded onto the real axis; -0.0 counts as +0.0.
double upper_arg(cplx w) {
  double im = w.imag();
  if (im < 0.0) {
    if (im < -1e-12 * (1.0 + std::abs(w))) throw DomainError("point below the real axis");
    im = 0.0;
  }
  if (im == 0.0) return w.real() < 0.0 ? kPi : 0.0;
  return std::atan2(im, w.real());
}

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

constexpr double kDirectRadius = 0.7;

}  // namespace

cplx gamma_fn(cplx z) {
  if (is_pole(z)) throw GammaPole(z.real());
  if (z.real() < 0.5) {
    return kPi / (std::sin(kPi * z) * std::exp(log_gamma_right(1.0 - z)));
  }
  return std::exp(log_gamma_right(z));
}

cplx rgamma(cplx z) {
  if (is_pole(z)) return 0.0;
  return 1.0 / gamma_fn(z);
}

cplx branch_pow(cplx z, double kappa, Branch convention) {
  cplx base = convention == Branch::log_at_0 ? z : z - 1.0;
  if (base == 0.0) throw DomainError("branch point of a non-integer power");
  const double theta = upper_arg(base);
  cplx v = std::polar(std::pow(std::abs(base), kappa), kappa * theta);
  if (convention == Branch::pow_1_minus_z) v *= std::polar(1.0, -kPi * kappa);
  return v;
}

SeriesValue hyp2f1_series(double a, double b, double c, cplx z) {
  if (c <= 0.0 && c == std::floor(c)) throw InvalidInput("2F1 lower parameter is a non-positive integer");
  if (std::abs(z) >= 1.0) throw DomainError("2F1 series diverges for |z| >= 1");

  SeriesValue out;
  cplx term = 1.0;
  cplx sum = 1.0;
  cplx dsum = 0.0;
  int quiet = 0;
  int n = 0;
  for (; n < kMaxSeriesTerms - 1; ++n) {
    // dterm is the n-th term of the differentiated series, (n+1) t_{n+1} / z
    const cplx dterm = term * ((a + n) * (b + n) / (c + n));
    dsum += dterm;
    term = dterm * z / double(n + 1);
    sum += term;
    const double rel = std::max(std::abs(term) / std::max(std::abs(sum), 1e-300),
                                std::abs(dterm) / std::max(std::abs(dsum), 1e-300));
    out.tail = rel;
    if (rel < 1e-16 || (term == 0.0 && dterm == 0.0)) {
      if (++quiet == 2) break;
    } else {
      quiet = 0;
    }
  }
  out.value = sum;
  out.derivative = dsum;
  out.converged = n < kMaxSeriesTerms - 1;
  out.terms = out.converged ? n + 2 : kMaxSeriesTerms;
  return out;
}

cplx hyp2f1(double a, double b, double c, cplx z) { return hyp2f1_series(a, b, c, z).value; }

ExponentSet exponents_unchecked(double alpha, double beta, double gamma) {
  ExponentSet e;
  e.alpha = alpha;
  e.beta = beta;
  e.gamma = gamma;
  auto s = [&](int sa, int sb, int sg) { return (1.0 + sa * alpha + sb * beta + sg * gamma) / 2.0; };
  e.s_ppp = s(1, 1, 1);
  e.s_ppm = s(1, 1, -1);
  e.s_pmp = s(1, -1, 1);
  e.s_pmm = s(1, -1, -1);
  e.s_mpp = s(-1, 1, 1);
  e.s_mpm = s(-1, 1, -1);
  e.s_mmp = s(-1, -1, 1);
  e.s_mmm = s(-1, -1, -1);
  e.Pi_product = 1.0;
  for (double v : {e.s_ppp, e.s_ppm, e.s_pmp, e.s_pmm, e.s_mpp, e.s_mpm, e.s_mmp, e.s_mmm}) {
    e.Pi_product *= 2.0 * v;
  }
  return e;
}

ExponentSet make_exponents(double alpha, double beta, double gamma) {
  for (double x : {alpha, beta, gamma}) {
    if (!std::isfinite(x) || is_integer(x)) throw InvalidInput("end angle must be a non-integer real");
  }
  ExponentSet e = exponents_unchecked(alpha, beta, gamma);
  for (double v : {e.s_ppp, e.s_ppm, e.s_pmp, e.s_pmm, e.s_mpp, e.s_mpm, e.s_mmp, e.s_mmm}) {
    if (is_integer(v)) throw InvalidInput("exponent (1+-a+-b+-c)/2 is an integer: " + std::to_string(v));
  }
  return e;
}

const char* to_string(Region r) {
  switch (r) {
    case Region::near0: return "near0";
    case Region::near1: return "near1";
    case Region::nearInf: return "nearInf";
  }
  return "?";
}

bool region_contains(Region r, cplx z) {
  switch (r) {
    case Region::near0: return std::abs(z) < 1.0;
    case Region::near1: return std::abs(z - 1.0) < 1.0;
    case Region::nearInf: return std::abs(z) > 1.0;
  }
  return false;
}

Pair basis_at(Region region, const ExponentSet& e, cplx z) {
  if (!region_contains(region, z)) {
    throw DomainError(std::string("point outside region ") + to_string(region));
  }
  if (z == 0.0 || z == 1.0) throw DomainError("basis evaluated at a puncture");
  upper_arg(z);  // rejects the open lower half-plane

  Pair p;
  switch (region) {
    case Region::near0: {
      const SeriesValue f1 = hyp2f1_series(e.s_mmm, e.s_mpm, 1.0 - e.alpha, z);
      const SeriesValue f2 = hyp2f1_series(e.s_pmm, e.s_ppm, 1.0 + e.alpha, z);
      const cplx za = branch_pow(z, e.alpha, Branch::log_at_0);
      p.w1 = f1.value;
      p.dw1 = f1.derivative;
      p.w2 = za * f2.value;
      p.dw2 = e.alpha * za / z * f2.value + za * f2.derivative;
      p.accurate = f1.converged && f2.converged;
      break;
    }
    case Region::near1: {
      const cplx x = 1.0 - z;
      const SeriesValue f1 = hyp2f1_series(e.s_mmm, e.s_mpm, 1.0 - e.gamma, x);
      const SeriesValue f2 = hyp2f1_series(e.s_mmp, e.s_mpp, 1.0 + e.gamma, x);
      const cplx pg = branch_pow(z, e.gamma, Branch::pow_1_minus_z);
      p.w1 = f1.value;
      p.dw1 = -f1.derivative;
      p.w2 = pg * f2.value;
      p.dw2 = -e.gamma * pg / x * f2.value - pg * f2.derivative;
      p.accurate = f1.converged && f2.converged;
      break;
    }
    case Region::nearInf: {
      const cplx u = 1.0 / z;
      const SeriesValue f1 = hyp2f1_series(e.s_mmm, e.s_pmm, 1.0 - e.beta, u);
      const SeriesValue f2 = hyp2f1_series(e.s_mpm, e.s_ppm, 1.0 + e.beta, u);
      const cplx pa = branch_pow(z, -e.s_mmm, Branch::log_at_0);
      const cplx pb = branch_pow(z, -e.s_mpm, Branch::log_at_0);
      p.w1 = pa * f1.value;
      p.dw1 = -e.s_mmm * pa * u * f1.value - pa * u * u * f1.derivative;
      p.w2 = pb * f2.value;
      p.dw2 = -e.s_mpm * pb * u * f2.value - pb * u * u * f2.derivative;
      p.accurate = f1.converged && f2.converged;
      break;
    }
  }
  return p;
}

ConnectionMatrices connection_matrices(const ExponentSet& e) {
  const double a = e.alpha, b = e.beta, g = e.gamma;
  const cplx ga_m = gamma_fn(1.0 - a), ga_p = gamma_fn(1.0 + a);
  const cplx gg_p = gamma_fn(g), gg_m = gamma_fn(-g);
  const cplx gb_p = gamma_fn(b), gb_m = gamma_fn(-b);
  auto phase = [](double s) { return std::polar(1.0, kPi * s); };

  ConnectionMatrices cm;
  cm.nu(0, 0) = ga_m * gg_p * rgamma(e.s_mmp) * rgamma(e.s_mpp);
  cm.nu(0, 1) = ga_m * gg_m * rgamma(e.s_mmm) * rgamma(e.s_mpm);
  cm.nu(1, 0) = ga_p * gg_p * rgamma(e.s_pmp) * rgamma(e.s_ppp);
  cm.nu(1, 1) = ga_p * gg_m * rgamma(e.s_pmm) * rgamma(e.s_ppm);

  cm.nu_hat(0, 0) = phase(e.s_mmm) * ga_m * gb_p * rgamma(e.s_mpm) * rgamma(e.s_mpp);
  cm.nu_hat(0, 1) = phase(e.s_mpm) * ga_m * gb_m * rgamma(e.s_mmm) * rgamma(e.s_mmp);
  cm.nu_hat(1, 0) = phase(e.s_pmm) * ga_p * gb_p * rgamma(e.s_ppm) * rgamma(e.s_ppp);
  cm.nu_hat(1, 1) = phase(e.s_ppm) * ga_p * gb_m * rgamma(e.s_pmm) * rgamma(e.s_pmp);
  return cm;
}

Pair sigma_via(Region region, const ExponentSet& e, const ConnectionMatrices& cm, cplx z) {
  const Pair w = basis_at(region, e, z);
  if (region == Region::near0) return w;
  const Mat2& m = region == Region::near1 ? cm.nu : cm.nu_hat;
  Pair s;
  s.w1 = m(0, 0) * w.w1 + m(0, 1) * w.w2;
  s.w2 = m(1, 0) * w.w1 + m(1, 1) * w.w2;
  s.dw1 = m(0, 0) * w.dw1 + m(0, 1) * w.dw2;
  s.dw2 = m(1, 0) * w.dw1 + m(1, 1) * w.dw2;
  s.accurate = w.accurate;
  return s;
}

namespace {

// Advances (w, w') of both solutions from zc to zc + h by the Taylor series of the
// hypergeometric equation at zc. |h| must stay below the distance to {0, 1}.
void taylor_step(const ExponentSet& e, cplx zc, cplx h, Pair& s) {
  const double sab = e.s_mmm * e.s_mpm;
  const double k = 2.0 - e.alpha - e.gamma;
  const cplx p1 = k * zc - (1.0 - e.alpha);
  const cplx lead = zc * (zc - 1.0);
  const cplx mid = 2.0 * zc - 1.0;

  std::array<cplx, 2> c0{s.w1, s.w2}, c1{s.dw1, s.dw2};
  std::array<cplx, 2> val{c0[0] + c1[0] * h, c0[1] + c1[1] * h};
  std::array<cplx, 2> der{c1[0], c1[1]};
  cplx hp = h;  // h^(n+1)
  int quiet = 0;
  for (int n = 0; n < 2000; ++n) {
    const double nd = n;
    double worst = 0.0;
    for (int j = 0; j < 2; ++j) {
      const cplx c2 = -((mid * nd * (nd + 1) + p1 * (nd + 1)) * c1[j] +
                        (nd * (nd - 1) + k * nd + sab) * c0[j]) /
                      (lead * (nd + 2) * (nd + 1));
      der[j] += (nd + 2) * c2 * hp;
      const cplx t = c2 * hp * h;
      val[j] += t;
      worst = std::max({worst, std::abs(t) / std::max(std::abs(val[j]), 1e-300),
                        std::abs((nd + 2) * c2 * hp) / std::max(std::abs(der[j]), 1e-300)});
      c0[j] = c1[j];
      c1[j] = c2;
    }
    hp *= h;
    if (worst < 1e-17) {
      if (++quiet == 3) break;
    } else {
      quiet = 0;
    }
  }
  s.w1 = val[0];
  s.w2 = val[1];
  s.dw1 = der[0];
  s.dw2 = der[1];
}

}  // namespace

Pair sigma_global(const ExponentSet& e, const ConnectionMatrices& cm, cplx z) {
  if (std::abs(z) < 1e-8 || std::abs(z - 1.0) < 1e-8) {
    throw DomainError("sigma evaluated within 1e-8 of a puncture");
  }
  upper_arg(z);
  if (z.imag() < 0.0) z = {z.real(), 0.0};

  const double m0 = std::abs(z), m1 = std::abs(z - 1.0), mi = 1.0 / std::abs(z);
  Region r = Region::nearInf;
  double m = mi;
  if (m1 <= std::min(m0, mi)) {
    r = Region::near1;
    m = m1;
  } else if (m0 <= mi) {
    r = Region::near0;
    m = m0;
  }
  if (m <= kDirectRadius) return sigma_via(r, e, cm, z);

  // Band around |z| ~ 1 and the lens near e^{i pi/3}: start from the point of the same
  // ray at which the chosen local series converges fast, then walk in by Taylor steps.
  cplx zc;
  switch (r) {
    case Region::near0: zc = z * (kDirectRadius / m0); break;
    case Region::near1: zc = 1.0 + (z - 1.0) * (kDirectRadius / m1); break;
    case Region::nearInf: zc = z * (1.0 / (kDirectRadius * m0)); break;
  }
  Pair s = sigma_via(r, e, cm, zc);
  for (int step = 0; step < 1000 && zc != z; ++step) {
    const double reach = 0.5 * std::min(std::abs(zc), std::abs(zc - 1.0));
    cplx h = z - zc;
    const bool last = std::abs(h) <= reach;
    if (!last) h *= reach / std::abs(h);
    taylor_step(e, zc, h, s);
    zc = last ? z : zc + h;
  }
  return s;
}

Pair sigma_global(const ExponentSet& e, cplx z) {
  return sigma_global(e, connection_matrices(e), z);
}

}  // namespace threelines::specfun
