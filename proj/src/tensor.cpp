#include "screenlab/tensor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace screenlab::tensor {

cplx quadratic_form(const GeneralTensor2& t, const Vec2c& xi) {
  const cplx a = xi(0), b = xi(1);
  return std::norm(a) * t.s11 + std::conj(a) * b * t.s12 + std::conj(b) * a * t.s21 +
         std::norm(b) * t.s22;
}

bool check_uniqueness(const GeneralTensor2& t) {
  const double r11 = t.s11.real();
  const double r22 = t.s22.real();
  const cplx off = 0.5 * (t.s12 + std::conj(t.s21));
  const bool c1 = r11 >= -1e-15;
  const bool c2 = r22 >= -1e-15;
  const bool c3 = r11 * r22 - std::norm(off) >= -1e-15;
  return c1 && c2 && c3;
}

namespace {

// Smallest eigenvalue of a 2x2 Hermitian matrix [[h11, h12], [conj(h12), h22]].
double min_eig_2x2(double h11, double h22, cplx h12) {
  const double tr = h11 + h22;
  const double disc = std::sqrt(0.25 * (h11 - h22) * (h11 - h22) + std::norm(h12));
  return 0.5 * tr - disc;
}

}  // namespace

AdmissibilityReport check_existence(const GeneralTensor2& t, int theta_samples) {
  if (theta_samples < 2) throw std::invalid_argument("check_existence: theta_samples >= 2 required");

  AdmissibilityReport report;
  const double r11 = t.s11.real();
  const double r22 = t.s22.real();
  const cplx off = 0.5 * (t.s12 + std::conj(t.s21));
  report.uniqueness_checks = {r11 >= -1e-15, r22 >= -1e-15,
                              r11 * r22 - std::norm(off) >= -1e-15};
  report.uniqueness_ok = check_uniqueness(t);

  // Hermitian part H and skew part K (both Hermitian matrices).
  const double H11 = t.s11.real(), H22 = t.s22.real();
  const cplx H12 = 0.5 * (t.s12 + std::conj(t.s21));
  const double K11 = t.s11.imag(), K22 = t.s22.imag();
  const cplx K12 = (t.s12 - std::conj(t.s21)) / cplx(0.0, 2.0);

  double best_gamma = -std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  for (int k = 0; k < theta_samples; ++k) {
    const double theta = 0.5 * pi * k / (theta_samples - 1);
    const double c = std::cos(theta), s = std::sin(theta);
    const double g = min_eig_2x2(c * H11 + s * K11, c * H22 + s * K22, c * H12 + s * K12);
    if (g > best_gamma) {
      best_gamma = g;
      best_theta = theta;
    }
  }
  report.existence_ok = best_gamma > 0.0;
  if (report.existence_ok) {
    report.theta_star = best_theta;
    report.gamma_star = best_gamma;
  }
  return report;
}

GeneralTensor2 transpose(const GeneralTensor2& t) { return {t.s11, t.s21, t.s12, t.s22}; }

SurfaceTensor transpose(const SurfaceTensor& t) { return {t.a, -t.b}; }

}  // namespace screenlab::tensor
