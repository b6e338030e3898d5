#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "screenlab/farfield.hpp"
#include "screenlab/types.hpp"

// Tikhonov-regularized solution of the discrete far-field equation, the
// indicator sweep over lambda, and peak detection.

namespace screenlab::inversion {

using farfield::DirectionGrid;
using farfield::ModeMaps;

struct ProbeSet {
  std::vector<Vec3> points;  // |z| <= r_max
  double r_max = 0.9;
  std::uint64_t seed = 0;
};

// Uniform sampling in the ball of radius r_max (rejection, seeded).
ProbeSet make_probes(int count, double r_max, std::uint64_t seed);

// Far field of an electric dipole at z with moment q:
//   (i kappa / 4 pi) (x_hat x q) x x_hat exp(-i kappa x_hat . z).
Vec3c dipole_far_field(const Vec3& xhat, const Vec3& z, const Vec3& q, double kappa);

// Sample the dipole far field on the active receivers of a grid as a frame
// coefficient vector, sqrt(weight)-scaled to match the matrix convention.
VecX dipole_rhs(const DirectionGrid& grid, const Vec3& z, const Vec3& q, double kappa);

struct TikhonovResult {
  VecX g;
  double residual = 0.0;
};

// g = argmin ||M g - rhs||^2 + alpha ||g||^2 via SVD.
TikhonovResult tikhonov_solve(const MatX& M, const VecX& rhs, double alpha);

struct TikhonovPolicy {
  enum class Mode { Fixed, Morozov };
  Mode mode = Mode::Fixed;
  double rho = 1e-6;     // Fixed: alpha = rho * sigma_max^2
  double tau = 1.1;      // Morozov: residual target tau * noise_level * ||rhs||
  double noise_level = 0.0;
};

struct IndicatorCurve {
  std::vector<cplx> lambdas;
  std::vector<double> indicator;      // mean over probes x polarizations of ||g||
  std::vector<double> residual_mean;  // mean residual
  std::vector<bool> valid;
};

// For each lambda: form the modified operator from F_data and the auxiliary
// operator, factor once, then solve for every (probe, canonical polarization)
// right-hand side.  Invalid entries (auxiliary poles, decomposition failure)
// are recorded, not fatal.
IndicatorCurve scan_indicator(const MatX& F_data, const DirectionGrid& grid,
                              const std::vector<cplx>& lambda_grid, const ProbeSet& probes,
                              double kappa, int N, const TikhonovPolicy& policy, int workers = 1);

// Variant reusing precomputed mode maps and (optionally) cached auxiliary
// operators: if aux_lookup returns a matrix for a lambda index it is used
// verbatim, otherwise the operator is assembled from the maps.
using AuxLookup = std::function<bool(std::size_t, MatX&)>;
IndicatorCurve scan_indicator_with_maps(const MatX& F_data, const ModeMaps& maps,
                                        const std::vector<cplx>& lambda_grid,
                                        const ProbeSet& probes, const TikhonovPolicy& policy,
                                        const DirectionGrid& grid, int workers,
                                        const AuxLookup& aux_lookup);

struct Peak {
  std::size_t index = 0;  // position on the lambda grid
  double lambda = 0.0;    // Re(lambda) at the peak
  double prominence = 0.0;
  double width = 0.0;     // full width at half prominence, in lambda units
};

// Local maxima with prominence >= prominence_factor * median(indicator).
// Invalid entries are linearly interpolated over before detection.
std::vector<Peak> detect_peaks(const IndicatorCurve& curve, double prominence_factor);

}  // namespace screenlab::inversion
