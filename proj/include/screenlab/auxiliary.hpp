#pragma once

#include <vector>

#include "screenlab/mie.hpp"
#include "screenlab/types.hpp"

// The auxiliary exterior problem: total field E^(lam) = E^i + E^(lam),s in the
// exterior of the unit ball, radiating scattered part, boundary condition
//   nu x curl E^(lam) - lambda S E^(lam)_T = 0  on r = 1,
// where S is the smoothing projection onto curl-type (X) tangential fields.
// The screen tensor Sigma never enters.

namespace screenlab::aux {

using mie::IncidentBlock;

// Coefficients of a tangential field sum ( u_nm U_nm + x_nm X_nm ),
// n = 1..N, indexed by specfun::mode_index.
struct TangentialExpansion {
  int N = 0;
  std::vector<cplx> u;
  std::vector<cplx> x;
};

// Exact action of S = -nu x grad_S lap_S^{-1} div_S (nu x .) on the sphere:
// annihilates every U (gradient-type) component and fixes every X
// (curl-type) component.  Derivation: for v = X_nm, nu x v = -U_nm, whose
// surface divergence is -lap_S Y_nm / s = s Y_nm; solving lap_S q = s Y_nm
// gives q = -Y_nm/s and -nu x grad_S q = nu x U_nm = X_nm.  For v = U_nm,
// nu x v = X_nm is surface-divergence free.
TangentialExpansion smoothing_operator_s(const TangentialExpansion& in);

struct AuxModeSolution {
  cplx s_te{0.0};  // radiating TE coefficient
  cplx s_tm{0.0};  // radiating TM coefficient (lambda-independent)
};

// Per-degree solve.  TE: s_te = -i_te (kappa R[j] + lambda j)/(kappa R[h] + lambda h);
// TM: s_tm = -i_tm j/h.  Throws when the TE denominator vanishes (exterior
// spectral point, only possible for Im lambda < 0), naming (n, lambda).
AuxModeSolution solve_aux_mode(int n, cplx lambda, double kappa, const IncidentBlock& inc);

struct AuxExpansion {
  double kappa = 0.0;
  cplx lambda{0.0};
  int N = 0;
  std::vector<cplx> incident_te, incident_tm;
  std::vector<cplx> s_te, s_tm;  // radiating coefficients per mode_index
};

AuxExpansion solve_aux(const std::vector<IncidentBlock>& inc, cplx lambda, double kappa, int N);

// Far field of the auxiliary scattered field (same asymptotics as mie).
Vec3c far_field(const AuxExpansion& e, const Vec3& xhat);

}  // namespace screenlab::aux
