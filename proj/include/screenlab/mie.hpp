#pragma once

#include <vector>

#include <json.hpp>

#include "screenlab/specfun.hpp"
#include "screenlab/tensor.hpp"
#include "screenlab/types.hpp"

// Exact per-mode solution of the transmission problem for the closed unit
// spherical screen: interior field regular (j-type), exterior field incident
// plus radiating (h-type), tangential electric trace continuous and the
// rotated magnetic trace jumping by i kappa Sigma E_T.
//
// Mode basis (per (n, m), kappa fixed, z = j_n or h_n^(1)):
//   TE ("M") mode:  M_z(x) = z_n(kappa r) X_nm(x_hat)
//   TM ("N") mode:  N_z(x) = (1/kappa) curl M_z
//                        = -(s z_n(kappa r)/(kappa r)) Y_nm r_hat
//                          - R[z](kappa r) U_nm,
// with s = sqrt(n(n+1)) and R[z](x) = (x z(x))'/x the Riccati term.
// Tangential traces at r = 1:  M -> z X,  N -> -R[z] U;
// rotated curls:  nu x curl M = -kappa R[z] X,  nu x curl N = -kappa z U.

namespace screenlab::mie {

using specfun::Family;
using specfun::ModeKey;
using specfun::mode_index;
using specfun::num_modes;
using tensor::SurfaceTensor;

struct PlaneWave {
  Vec3 d;       // unit propagation direction
  Vec3c p;      // polarization, d . p = 0
  double kappa; // wave number
};

// Incident expansion coefficients of one (n, m) pair: i_te multiplies the
// regular TE mode M_j, i_tm multiplies the regular TM mode N_j.
struct IncidentBlock {
  cplx i_te{0.0};
  cplx i_tm{0.0};
};

struct ModeCoeff {
  cplx incident{0.0};
  cplx interior{0.0};   // multiplies the regular j-type mode
  cplx scattered{0.0};  // multiplies the radiating h-type mode
};

struct FieldExpansion {
  double kappa = 0.0;
  int N = 0;
  std::vector<ModeCoeff> te;  // indexed by mode_index(n, m)
  std::vector<ModeCoeff> tm;
};

// The 4x4 per-degree block coupling (c_te, c_tm, s_te, s_tm) to the incident
// block, identical for every m at fixed n.
struct ModeBlock {
  int n = 0;
  Eigen::Matrix4cd A;               // system matrix
  Eigen::Matrix<cplx, 4, 2> rhs;    // right-hand side as a map of (i_te, i_tm)
  double condition = 0.0;
};

struct ScreenModeSolution {
  cplx c_te, c_tm, s_te, s_tm;
};

// Expansion of E^i = i kappa p e^{i kappa d . x} in regular VSH modes,
// n = 1..N.  Throws if the PlaneWave invariants are violated.
std::vector<IncidentBlock> plane_wave_coefficients(const PlaneWave& w, int N);

// Assemble the per-degree transmission block.
ModeBlock screen_mode_block(int n, const SurfaceTensor& sigma, double kappa);

// Solve one degree.  Throws on condition number > 1e12 (interior-resonance
// style degeneracy), naming the mode.
ScreenModeSolution solve_screen_mode(int n, const SurfaceTensor& sigma, double kappa,
                                     const IncidentBlock& inc);

// Full forward solve for a plane wave.
FieldExpansion solve_forward(const PlaneWave& w, const SurfaceTensor& sigma, int N);

// Forward solve from prescribed incident coefficients (plane-wave or
// Herglotz superposition alike).
FieldExpansion solve_forward_coeffs(const std::vector<IncidentBlock>& inc, double kappa,
                                    const SurfaceTensor& sigma, int N);

enum class Side { Interior, Exterior };

// Field evaluation off the screen.  Interior: regular modes only.  Exterior:
// incident (regular) plus scattered (radiating) modes.
Vec3c evaluate_field(const FieldExpansion& e, const Vec3& x, Side side);

// Far field of the scattered part:  E^s ~ (e^{i kappa r}/r) E^inf.
Vec3c far_field(const FieldExpansion& e, const Vec3& xhat);

nlohmann::json to_json(const FieldExpansion& e);
FieldExpansion expansion_from_json(const nlohmann::json& j);

}  // namespace screenlab::mie
