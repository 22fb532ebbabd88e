#pragma once

#include <array>
#include <complex>

namespace threelines {

using cplx = std::complex<double>;

namespace specfun {

// Complex Gamma (Lanczos, reflected for Re z < 1/2). Throws GammaPole at 0, -1, -2, ...
cplx gamma_fn(cplx z);

// 1/Gamma, which is entire: returns 0 at the poles of Gamma instead of throwing.
cplx rgamma(cplx z);

// Branch conventions on the closed upper half-plane minus {0, 1}.
//   log_at_0      z^k with arg z in [0, pi]
//   pow_z_minus_1 (z-1)^k with arg(z-1) in [0, pi]
//   pow_1_minus_z (1-z)^k := e^{-i pi k} (z-1)^k, real for real z < 1
enum class Branch { log_at_0, pow_z_minus_1, pow_1_minus_z };

cplx branch_pow(cplx z, double kappa, Branch convention);

struct SeriesValue {
  cplx value;
  cplx derivative;
  int terms = 0;
  bool converged = true;  // false when the term cap was hit
  double tail = 0.0;      // relative size of the last term kept
};

constexpr int kMaxSeriesTerms = 10000;

// Gauss series 2F1(a, b; c; z) and its z-derivative for |z| < 1.
SeriesValue hyp2f1_series(double a, double b, double c, cplx z);
cplx hyp2f1(double a, double b, double c, cplx z);

struct ExponentSet {
  double alpha = 0, beta = 0, gamma = 0;
  // s_xyz = (1 x alpha y beta z gamma)/2, signs in the order (alpha, beta, gamma)
  double s_ppp = 0, s_ppm = 0, s_pmp = 0, s_pmm = 0;
  double s_mpp = 0, s_mpm = 0, s_mmp = 0, s_mmm = 0;
  double Pi_product = 0;
};

// Unchecked construction; used to exercise the error paths of the matrix builders.
ExponentSet exponents_unchecked(double alpha, double beta, double gamma);
// Throws InvalidInput if an angle or an s-value is an integer.
ExponentSet make_exponents(double alpha, double beta, double gamma);

enum class Region { near0, near1, nearInf };

const char* to_string(Region r);
bool region_contains(Region r, cplx z);

struct Pair {
  cplx w1, w2, dw1, dw2;
  bool accurate = true;  // every series reached its tolerance
};

// Local solution pair of the hypergeometric equation at 0, 1 or infinity.
Pair basis_at(Region region, const ExponentSet& e, cplx z);

struct Mat2 {
  std::array<std::array<cplx, 2>, 2> m{};
  cplx& operator()(int i, int j) { return m[i][j]; }
  const cplx& operator()(int i, int j) const { return m[i][j]; }
};

// (w^(0)) = nu (w^(1)) = nu_hat (w^inf), indices 0-based.
struct ConnectionMatrices {
  Mat2 nu;
  Mat2 nu_hat;
};

ConnectionMatrices connection_matrices(const ExponentSet& e);

// sigma_j = w_j^(0) continued over the whole domain.
Pair sigma_global(const ExponentSet& e, cplx z);
Pair sigma_global(const ExponentSet& e, const ConnectionMatrices& cm, cplx z);

// sigma_j computed through one chosen local basis, for overlap checks.
Pair sigma_via(Region region, const ExponentSet& e, const ConnectionMatrices& cm, cplx z);

}  // namespace specfun
}  // namespace threelines
