#include "screenlab/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace screenlab::specfun {

namespace {

void require_positive(double x) {
  if (!(x > 0.0)) throw std::domain_error("spherical Bessel argument must be positive");
}

}  // namespace

std::vector<double> sph_bessel_j_seq(int nmax, double x) {
  require_positive(x);
  if (nmax < 0) throw std::domain_error("negative Bessel order");
  std::vector<double> out(nmax + 1, 0.0);
  const double j0 = std::sin(x) / x;
  out[0] = j0;
  if (nmax == 0) return out;
  if (x < 0.5) {
    // Small arguments: the closed forms and the downward recurrence both
    // suffer catastrophic cancellation; the ascending series terminates in a
    // handful of terms here and is exact to machine precision.
    for (int n = 1; n <= nmax; ++n) {
      double dfact = 1.0;  // (2n+1)!!
      for (int k = 1; k <= 2 * n + 1; k += 2) dfact *= k;
      double term = std::pow(x, n) / dfact;
      double sum = term;
      for (int k = 1; k < 30; ++k) {
        term *= -(x * x) / (2.0 * k * (2.0 * (n + k) + 1.0));
        sum += term;
        if (std::abs(term) < 1e-300) break;
      }
      out[n] = sum;
    }
    return out;
  }
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  out[1] = j1;
  if (nmax == 1) return out;

  // Miller's algorithm: run the three-term recurrence downward from a start
  // order well above both nmax and x, then normalize against j_0.
  const double big = std::max(static_cast<double>(nmax), x);
  const int nstart = nmax + 20 + static_cast<int>(std::sqrt(60.0 * big)) + static_cast<int>(x);
  std::vector<double> tmp(nstart + 2, 0.0);
  tmp[nstart + 1] = 0.0;
  tmp[nstart] = 1e-300;
  for (int k = nstart; k >= 1; --k) {
    tmp[k - 1] = (2.0 * k + 1.0) / x * tmp[k] - tmp[k + 1];
    if (std::abs(tmp[k - 1]) > 1e250) {
      for (int j = k - 1; j <= nstart + 1; ++j) tmp[j] *= 1e-250;
    }
  }
  const double scale = j0 / tmp[0];
  for (int k = 2; k <= nmax; ++k) out[k] = tmp[k] * scale;
  return out;
}

double sph_bessel_j(int n, double x) { return sph_bessel_j_seq(n, x)[n]; }

double sph_bessel_y(int n, double x) {
  require_positive(x);
  if (n < 0) throw std::domain_error("negative Bessel order");
  const double y0 = -std::cos(x) / x;
  if (n == 0) return y0;
  const double y1 = -std::cos(x) / (x * x) - std::sin(x) / x;
  if (n == 1) return y1;
  double prev = y0, cur = y1;
  for (int k = 1; k < n; ++k) {
    const double next = (2.0 * k + 1.0) / x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

cplx sph_hankel1(int n, double x) {
  return {sph_bessel_j(n, x), sph_bessel_y(n, x)};
}

RadialPair riccati_j(int n, double x) {
  require_positive(x);
  const auto j = sph_bessel_j_seq(std::max(n, 1), x);
  if (n == 0) {
    // j_0' = -j_1, so (x j_0)'/x = -j_1 + j_0/x.
    return {cplx(j[0]), cplx(-j[1] + j[0] / x)};
  }
  // (x z_n)'/x = z_{n-1} - n z_n / x for any solution of the Bessel system.
  return {cplx(j[n]), cplx(j[n - 1] - n * j[n] / x)};
}

RadialPair riccati_h(int n, double x) {
  const cplx h = sph_hankel1(n, x);
  if (n == 0) {
    const cplx h1 = sph_hankel1(1, x);
    return {h, -h1 + h / x};
  }
  const cplx hm1 = sph_hankel1(n - 1, x);
  return {h, hm1 - static_cast<double>(n) * h / x};
}

namespace {

// Core recurrence with the sine of the polar angle supplied by the caller:
// near the poles sqrt(1 - x^2) loses half the significant digits, while the
// caller often knows sin(theta) to full precision.
double legendre_norm_with_sin(int n, int m, double x, double sx) {
  // Diagonal term P~_m^m, built up with the Condon-Shortley sign folded in.
  double pmm = std::sqrt(1.0 / (4.0 * pi));
  for (int k = 1; k <= m; ++k) {
    pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sx;
  }
  if (n == m) return pmm;
  double pm1 = std::sqrt(2.0 * m + 3.0) * x * pmm;  // P~_{m+1}^m
  if (n == m + 1) return pm1;
  double pm2 = pmm;
  for (int k = m + 2; k <= n; ++k) {
    const double a = std::sqrt((4.0 * k * k - 1.0) / (static_cast<double>(k) * k - static_cast<double>(m) * m));
    const double aprev =
        std::sqrt((4.0 * (k - 1.0) * (k - 1.0) - 1.0) /
                  ((k - 1.0) * (k - 1.0) - static_cast<double>(m) * m));
    const double p = a * (x * pm1 - pm2 / aprev);
    pm2 = pm1;
    pm1 = p;
  }
  return pm1;
}

}  // namespace

double legendre_norm(int n, int m, double x) {
  if (m < 0 || m > n) throw std::domain_error("legendre_norm requires 0 <= m <= n");
  if (std::abs(x) > 1.0 + 1e-12) throw std::domain_error("legendre_norm requires |x| <= 1");
  x = std::clamp(x, -1.0, 1.0);
  const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
  return legendre_norm_with_sin(n, m, x, sx);
}

namespace {

// d P~_n^m (cos theta) / d theta, stable away from the poles.
double dlegendre_dtheta(int n, int m, double ct, double st) {
  const double p = legendre_norm_with_sin(n, m, ct, st);
  double pm1 = 0.0;
  if (n - 1 >= m) pm1 = legendre_norm_with_sin(n - 1, m, ct, st);
  // (1-x^2) dP~/dx = -n x P~_n^m + sqrt((2n+1)(n-m)(n+m)/(2n-1)) P~_{n-1}^m,
  // and d/dtheta = -sin(theta) d/dx.
  const double c = std::sqrt((2.0 * n + 1.0) * (n - m) * (n + m) / (2.0 * n - 1.0));
  return (n * ct * p - c * pm1) / st;
}

// Limit amplitude of the |m| = 1 tangential modes at the north pole:
// U_{n,1} -> (A/s)(x_hat + i y_hat) with A = -(1/2) sqrt((2n+1) n(n+1) / 4pi).
double pole_amplitude(int n) {
  return -0.5 * std::sqrt((2.0 * n + 1.0) * n * (n + 1.0) / (4.0 * pi));
}

VshSample vsh_eval_pos_m(int n, int m, const Vec3& dir) {
  VshSample out;
  const double ct = std::clamp(dir.z(), -1.0, 1.0);
  const double rho = std::hypot(dir.x(), dir.y());
  const double s = std::sqrt(static_cast<double>(n) * (n + 1));

  if (rho < 1e-10) {
    // Pole: frame is the phi = 0 meridian limit.  North: theta_hat = x_hat,
    // phi_hat = y_hat.  South: theta_hat = -x_hat, phi_hat = y_hat.
    const bool north = ct > 0.0;
    out.Y = 0.0;
    out.U = Vec3c::Zero();
    out.X = Vec3c::Zero();
    if (m == 0) {
      const double sign = north ? 1.0 : ((n % 2 == 0) ? 1.0 : -1.0);
      out.Y = sign * std::sqrt((2.0 * n + 1.0) / (4.0 * pi));
    } else if (m == 1) {
      const double A = pole_amplitude(n);
      const cplx i(0.0, 1.0);
      if (north) {
        out.U = (A / s) * (Vec3c(1, 0, 0) + i * Vec3c(0, 1, 0));
        // X = nu x U with nu = +z_hat.
        out.X = (A / s) * (Vec3c(0, 1, 0) - i * Vec3c(1, 0, 0));
      } else {
        const double sgn = (n % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n+1}
        out.U = sgn * (A / s) * (Vec3c(1, 0, 0) + i * Vec3c(0, 1, 0));
        // nu = -z_hat at the south pole.
        out.X = sgn * (A / s) * (Vec3c(0, -1, 0) + i * Vec3c(1, 0, 0));
      }
    }
    return out;
  }

  const double st = rho;
  const double cphi = dir.x() / rho;
  const double sphi = dir.y() / rho;
  const cplx eimphi = std::pow(cplx(cphi, sphi), m);

  const Vec3 theta_hat(ct * cphi, ct * sphi, -st);
  const Vec3 phi_hat(-sphi, cphi, 0.0);

  const double p = legendre_norm_with_sin(n, m, ct, st);
  const double dp = dlegendre_dtheta(n, m, ct, st);

  out.Y = p * eimphi;
  const cplx dY_dtheta = dp * eimphi;
  const cplx Y_over_sin = (p / st) * eimphi;
  const cplx im(0.0, m);

  out.U = (dY_dtheta * theta_hat.cast<cplx>() + im * Y_over_sin * phi_hat.cast<cplx>()) / s;
  // X = nu x U; nu = dir, nu x theta_hat = phi_hat, nu x phi_hat = -theta_hat.
  out.X = (dY_dtheta * phi_hat.cast<cplx>() - im * Y_over_sin * theta_hat.cast<cplx>()) / s;
  return out;
}

}  // namespace

VshSample vsh_eval(int n, int m, const Vec3& dir) {
  if (n < 1 || std::abs(m) > n) throw std::domain_error("vsh_eval: invalid mode (n, m)");
  if (std::abs(dir.norm() - 1.0) > 1e-12) throw std::domain_error("vsh_eval: direction must be unit");
  if (m >= 0) return vsh_eval_pos_m(n, m, dir);
  VshSample base = vsh_eval_pos_m(n, -m, dir);
  const double sign = ((-m) % 2 == 0) ? 1.0 : -1.0;
  VshSample out;
  out.Y = sign * std::conj(base.Y);
  out.U = sign * base.U.conjugate();
  out.X = sign * base.X.conjugate();
  return out;
}

}  // namespace screenlab::specfun
