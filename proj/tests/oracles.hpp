#pragma once

// Test-side oracles, written independently of the library's solver algebra:
// power-series Bessel evaluation, brute-force surface quadrature, finite
// differences, pointwise boundary-condition residuals (traces rebuilt from
// coefficients with direct 3-vector operations), and a dense normal-equation
// Tikhonov reference.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "screenlab/auxiliary.hpp"
#include "screenlab/mie.hpp"
#include "screenlab/specfun.hpp"
#include "screenlab/tensor.hpp"
#include "screenlab/types.hpp"

namespace oracles {

using screenlab::cplx;
using screenlab::pi;
using screenlab::Vec3;
using screenlab::Vec3c;

// 30-term power series: j_n(x) = sum_k (-1)^k x^{n+2k} / (2^k k! (2n+2k+1)!!).
inline double series_j(int n, double x) {
  double dfact = 1.0;  // (2n+1)!!
  for (int k = 1; k <= 2 * n + 1; k += 2) dfact *= k;
  double term = std::pow(x, n) / dfact;
  double sum = term;
  for (int k = 1; k < 30; ++k) {
    term *= -(x * x) / (2.0 * k * (2.0 * (n + k) + 1.0));
    sum += term;
  }
  return sum;
}

// Brute-force surface integral over S^2: composite Simpson in theta (odd
// point count) x uniform trapezoid in phi (exact for trigonometric
// polynomials of azimuthal order < n_phi).
inline cplx surface_integral(const std::function<cplx(const Vec3&)>& f, int n_theta = 601,
                             int n_phi = 64) {
  cplx total = 0.0;
  const double dtheta = pi / (n_theta - 1);
  const double dphi = 2.0 * pi / n_phi;
  for (int a = 0; a < n_theta; ++a) {
    const double theta = a * dtheta;
    double sw = (a == 0 || a == n_theta - 1) ? 1.0 : ((a % 2 == 1) ? 4.0 : 2.0);
    sw *= dtheta / 3.0;
    const double st = std::sin(theta), ct = std::cos(theta);
    cplx ring = 0.0;
    for (int b = 0; b < n_phi; ++b) {
      const double phi = b * dphi;
      ring += f(Vec3(st * std::cos(phi), st * std::sin(phi), ct));
    }
    total += sw * st * dphi * ring;
  }
  return total;
}

// Pointwise application of the rotation-class tensor: Sigma xi = a xi + b (nu x xi).
inline Vec3c apply_sigma(const screenlab::tensor::SurfaceTensor& s, const Vec3& nu,
                         const Vec3c& xi) {
  return s.a * xi + s.b * screenlab::cross3(nu, xi);
}

// Tangential trace and rotated-curl trace at r = 1 of a one-sided expansion,
// rebuilt directly from radial factors and VSH samples.
struct Traces {
  Vec3c tangential;  // E_T
  Vec3c nu_curl;     // nu x curl E
};

template <typename GetTe, typename GetTm>
Traces side_traces(int N, double kappa, bool radiating, const Vec3& xhat, GetTe te, GetTm tm) {
  using screenlab::specfun::mode_index;
  using screenlab::specfun::riccati_h;
  using screenlab::specfun::riccati_j;
  using screenlab::specfun::vsh_eval;
  Traces out{Vec3c::Zero(), Vec3c::Zero()};
  for (int n = 1; n <= N; ++n) {
    const auto z = radiating ? riccati_h(n, kappa) : riccati_j(n, kappa);
    for (int m = -n; m <= n; ++m) {
      const cplx cte = te(mode_index(n, m));
      const cplx ctm = tm(mode_index(n, m));
      if (cte == 0.0 && ctm == 0.0) continue;
      const auto v = vsh_eval(n, m, xhat);
      out.tangential += cte * z.value * v.X - ctm * z.derivative_term * v.U;
      out.nu_curl += -kappa * (cte * z.derivative_term * v.X + ctm * z.value * v.U);
    }
  }
  return out;
}

// Max pointwise residual of the two screen transmission conditions:
// E+_T = E-_T and nu x (curl E+ - curl E-) = i kappa Sigma E+_T.
inline double screen_bc_residual(const screenlab::mie::FieldExpansion& e,
                                 const screenlab::tensor::SurfaceTensor& sigma,
                                 const std::vector<Vec3>& points) {
  double worst = 0.0;
  for (const Vec3& xhat : points) {
    auto inc = side_traces(
        e.N, e.kappa, false, xhat, [&](int i) { return e.te[i].incident; },
        [&](int i) { return e.tm[i].incident; });
    auto sca = side_traces(
        e.N, e.kappa, true, xhat, [&](int i) { return e.te[i].scattered; },
        [&](int i) { return e.tm[i].scattered; });
    auto interior = side_traces(
        e.N, e.kappa, false, xhat, [&](int i) { return e.te[i].interior; },
        [&](int i) { return e.tm[i].interior; });
    const Vec3c eplus_T = inc.tangential + sca.tangential;
    const Vec3c jump = (inc.nu_curl + sca.nu_curl) - interior.nu_curl;
    const Vec3c rhs = cplx(0.0, e.kappa) * apply_sigma(sigma, xhat, eplus_T);
    worst = std::max(worst, (eplus_T - interior.tangential).norm());
    worst = std::max(worst, (jump - rhs).norm());
  }
  return worst;
}

// Max pointwise residual of the auxiliary condition
// nu x curl E - lambda S E_T = 0, with S = projection onto the X family.
inline double aux_bc_residual(const screenlab::aux::AuxExpansion& e,
                              const std::vector<Vec3>& points) {
  using screenlab::specfun::mode_index;
  using screenlab::specfun::riccati_h;
  using screenlab::specfun::riccati_j;
  using screenlab::specfun::vsh_eval;
  double worst = 0.0;
  for (const Vec3& xhat : points) {
    Vec3c nu_curl = Vec3c::Zero();
    Vec3c s_of_trace = Vec3c::Zero();
    for (int n = 1; n <= e.N; ++n) {
      const auto j = riccati_j(n, e.kappa);
      const auto h = riccati_h(n, e.kappa);
      for (int m = -n; m <= n; ++m) {
        const int idx = mode_index(n, m);
        const auto v = vsh_eval(n, m, xhat);
        const cplx ite = e.incident_te[idx], itm = e.incident_tm[idx];
        const cplx ste = e.s_te[idx], stm = e.s_tm[idx];
        nu_curl += -e.kappa * ((ite * j.derivative_term + ste * h.derivative_term) * v.X +
                               (itm * j.value + stm * h.value) * v.U);
        // S keeps only the X-part of the tangential trace.
        s_of_trace += (ite * j.value + ste * h.value) * v.X;
      }
    }
    worst = std::max(worst, (nu_curl - e.lambda * s_of_trace).norm());
  }
  return worst;
}

// Pointwise residual of the eigen boundary condition for the interior ansatz
// w = alpha M_j + beta N_j at a single surface point.
inline double eig_bc_residual(int n, int m, double kappa,
                              const screenlab::tensor::SurfaceTensor& sigma, cplx lambda,
                              cplx alpha, cplx beta, const Vec3& xhat) {
  using screenlab::specfun::riccati_j;
  using screenlab::specfun::vsh_eval;
  const auto j = riccati_j(n, kappa);
  const auto v = vsh_eval(n, m, xhat);
  const Vec3c w_T = alpha * j.value * v.X - beta * j.derivative_term * v.U;
  const Vec3c nu_curl = -kappa * (alpha * j.derivative_term * v.X + beta * j.value * v.U);
  const Vec3c s_w = alpha * j.value * v.X;
  return (nu_curl + cplx(0.0, kappa) * apply_sigma(sigma, xhat, w_T) - lambda * s_w).norm();
}

// Random unit vectors / points, seeded.
inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline std::vector<Vec3> random_surface_points(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) out.push_back(random_unit(rng));
  return out;
}

inline cplx random_cplx(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

}  // namespace oracles
