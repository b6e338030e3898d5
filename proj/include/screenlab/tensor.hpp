#pragma once

#include <array>
#include <optional>

#include "screenlab/types.hpp"

// Surface conductivity tensors in the local right-handed tangential frame
// (t1, t2) and the admissibility checks used before any forward solve.

namespace screenlab::tensor {

struct GeneralTensor2 {
  cplx s11{0.0}, s12{0.0}, s21{0.0}, s22{0.0};
};

// Rotation class: Sigma xi = a xi + b (nu x xi).  In a right-handed frame
// nu x t1 = t2, nu x t2 = -t1, so the matrix is [[a, -b], [b, a]].
struct SurfaceTensor {
  cplx a{0.0};
  cplx b{0.0};

  GeneralTensor2 general() const { return {a, -b, b, a}; }
};

struct AdmissibilityReport {
  bool uniqueness_ok = false;
  bool existence_ok = false;
  std::optional<double> theta_star;  // argmax of the smallest eigenvalue of M(theta)
  std::optional<double> gamma_star;  // that maximal smallest eigenvalue
  // Which of the three inequalities of the Hermitian-part PSD test held:
  // Re s11 >= 0, Re s22 >= 0, Re s11 * Re s22 >= |s12 + conj(s21)|^2 / 4.
  std::array<bool, 3> uniqueness_checks{false, false, false};
};

// xi^H Sigma xi for xi = (alpha, beta) in the tangential frame.
cplx quadratic_form(const GeneralTensor2& t, const Vec2c& xi);

// True iff the Hermitian part (Sigma + Sigma^H)/2 is positive semidefinite.
bool check_uniqueness(const GeneralTensor2& t);

// Scans M(theta) = cos(theta) (Sigma+Sigma^H)/2 + sin(theta) (Sigma-Sigma^H)/(2i)
// over a uniform theta grid on [0, pi/2] and reports the theta maximizing the
// smallest eigenvalue.  existence_ok iff that maximum is positive.  The
// returned report also carries the uniqueness check.
AdmissibilityReport check_existence(const GeneralTensor2& t, int theta_samples = 181);

GeneralTensor2 transpose(const GeneralTensor2& t);
SurfaceTensor transpose(const SurfaceTensor& t);

}  // namespace screenlab::tensor
