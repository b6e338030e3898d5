#pragma once

#include <vector>

#include "screenlab/types.hpp"

// Spherical Bessel/Hankel functions, orthonormalized associated Legendre
// functions and vector spherical harmonics.
//
// Conventions (fixed once, used everywhere):
//   * Y_n^m is the fully orthonormal spherical harmonic with the
//     Condon-Shortley phase carried inside the Legendre function, so
//     Y_1^1 = -sqrt(3/8pi) sin(theta) e^{i phi}.
//   * s = sqrt(n(n+1)); U_nm = grad_S Y_nm / s (gradient type, "TM"),
//     X_nm = nu x U_nm (curl type, "TE"); both unit L^2(S^2) norm.
//   * Y_n^{-m} = (-1)^m conj(Y_n^m), and the same relation holds for U, X.
//   * At the two poles the tangential frame is the limit along the phi = 0
//     meridian; only |m| <= 1 modes survive there.

namespace screenlab::specfun {

enum class Family { TE, TM };

struct ModeKey {
  int n;  // degree >= 1
  int m;  // |m| <= n
  Family family;
};

// value = z_n(x); derivative_term = (x z_n(x))' / x = z_n'(x) + z_n(x)/x.
// The derivative_term is the Riccati combination appearing in every
// impedance-type boundary condition on the sphere.
struct RadialPair {
  cplx value;
  cplx derivative_term;
};

// Regular spherical Bessel function j_n(x).  Downward (Miller) recurrence,
// accurate to ~1e-12 relative for n <= 40, x <= 100.  Throws
// std::domain_error for x <= 0.
double sph_bessel_j(int n, double x);

// All of j_0..j_nmax at once (same algorithm, one downward pass).
std::vector<double> sph_bessel_j_seq(int nmax, double x);

// Irregular spherical Bessel function y_n(x), upward recurrence.
double sph_bessel_y(int n, double x);

// h_n^{(1)}(x) = j_n(x) + i y_n(x).
cplx sph_hankel1(int n, double x);

// Riccati pairs for j_n and h_n^{(1)}.
RadialPair riccati_j(int n, double x);
RadialPair riccati_h(int n, double x);

// Orthonormalized associated Legendre function P~_n^m(x) for 0 <= m <= n,
// |x| <= 1, including the sqrt((2n+1)(n-m)!/(4pi (n+m)!)) factor and the
// Condon-Shortley phase, so Y_n^m(theta,phi) = P~_n^m(cos theta) e^{im phi}.
double legendre_norm(int n, int m, double x);

struct VshSample {
  cplx Y;    // scalar harmonic
  Vec3c U;   // gradient-type tangential vector
  Vec3c X;   // curl-type tangential vector
};

// Evaluate (Y, U, X) for mode (n, m) at a unit direction.  Pole-safe: for
// |sin theta| < 1e-10 the analytic limits along the phi = 0 meridian are
// used instead of dividing by sin theta.
VshSample vsh_eval(int n, int m, const Vec3& direction);

// Linear index for the (n, m) mode list n = 1..N, m = -n..n.
inline int mode_index(int n, int m) { return n * n - 1 + (m + n); }
// Number of (n, m) pairs with n <= N.
inline int num_modes(int N) { return N * (N + 2); }

}  // namespace screenlab::specfun
