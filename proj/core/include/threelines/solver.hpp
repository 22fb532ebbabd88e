#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "threelines/geometry.hpp"
#include "threelines/specfun.hpp"

namespace threelines::solver {

using geometry::FrameAngles;
using geometry::Lifted;
using geometry::TripleConfig;
using specfun::ConnectionMatrices;
using specfun::ExponentSet;

// Helicoidal ends (A, alpha) at 0, (B, beta) at infinity, (C, gamma) at 1.
struct EndParameters {
  double A = 0, alpha = 0;
  double B = 0, beta = 0;
  double C = 0, gamma = 0;
};

// Checks A, B, C != 0, non-integer angles and the congruence of the lifts mod 2.
EndParameters make_ends(const TripleConfig& cfg, const Lifted& lifted);

enum class RootClass { conjugate_pair, double_real, distinct_real };
const char* to_string(RootClass c);

// phi(z) = c2 z^2 + c1 z + c0
struct PhiPolynomial {
  double c0 = 0, c1 = 0, c2 = 0;
  double discriminant = 0;  // c1^2 - 4 c2 c0
  cplx a1, a2;              // Im a1 > 0 for a conjugate pair; a1 <= a2 when real
  RootClass root_class = RootClass::distinct_real;

  cplx operator()(cplx z) const { return (c2 * z + c1) * z + c0; }
  cplx derivative(cplx z) const { return 2.0 * c2 * z + c1; }
};

PhiPolynomial build_phi(const EndParameters& ends);

// sign of eps0 * nu11 / (alpha * nu21)
int epsilon_sign(int eps0, double alpha, const ConnectionMatrices& cm);

struct PqrSolution {
  double p = 0, q = 0, r = 0;
  int eps = 1;
  std::array<int, 3> branch{1, 1, 1};  // the signs in F_{+-+}(y) = +p -q +r - y
  double y = 0;                        // p + q + r
  double residual = 0;                 // max of the three system residuals
  std::vector<std::string> flags;
};

struct ScanOptions {
  int grid = 4096;
  double bisect_tol = 1e-14;
  double accept_tol = 1e-10;
};

// p^2 - alpha^2 (p+q+r)^2 - eps A alpha / 2 pi, and the two analogous residuals.
std::array<double, 3> pqr_residuals(double p, double q, double r, const EndParameters& ends, int eps);

// All real solutions over the eight branches, modulo the global sign, sorted.
std::vector<PqrSolution> solve_pqr(const EndParameters& ends, int eps, const ScanOptions& opt = {});

struct Abc {
  double a = 0, b = 0, c = 0;
};

Abc pqr_to_abc(double p, double q, double r, const Lifted& lifted);
std::array<double, 3> abc_to_pqr(const Abc& abc, const Lifted& lifted);
std::array<double, 3> abc_residuals(const Abc& abc, const EndParameters& ends, int eps);

struct LambdaMu {
  cplx lambda;
  cplx mu;  // real unless the x3-axis reflection is applied
};

// mu = +sqrt(t nu11 / (eps alpha nu21)), lambda = -eps i alpha mu. With reflect set the pair
// becomes (-i lambda, i mu). Throws InvalidInput when no real mu exists.
LambdaMu normalize_lambda_mu(int eps, const Lifted& lifted, const FrameAngles& frame,
                             const ConnectionMatrices& cm, bool reflect = false);

struct HatLambda {
  double at0 = 0, at1 = 0;
};

HatLambda hat_lambda_values(double p, double q, double r, int eps, const Lifted& lifted);
// Lambda_hat(1) - Lambda_hat(0) by its own closed form.
double hat_lambda_difference(double p, double q, double r, int eps, const Lifted& lifted);

// Everything about a configuration that does not depend on the chosen (p,q,r).
struct Prepared {
  TripleConfig cfg;
  Lifted lifted;
  ExponentSet exps;
  ConnectionMatrices cm;
  FrameAngles frame;
  EndParameters ends;
  PhiPolynomial phi;
  int eps = 1;
  LambdaMu lm;
};

Prepared prepare(const TripleConfig& cfg, const Lifted& lifted, bool reflect = false);

}  // namespace threelines::solver
