#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "screenlab/mie.hpp"
#include "screenlab/tensor.hpp"
#include "screenlab/types.hpp"

// Direction grids on the unit sphere, dense realizations of the far-field
// operators F, F^(lam) and the modified operator F - F^(lam), noise
// injection and the FFO1 binary matrix format.
//
// Discretization convention: a tangential kernel g is represented by its two
// components in the per-node frames (t1 = theta_hat, t2 = phi_hat).  The
// matrices carry the quadrature weights split symmetrically, entry
//   sqrt(w_i) sqrt(w_j) * t_k(x_i) . E_inf(x_i; d_j, t_l(d_j)),
// so that plain Euclidean inner products of coefficient vectors approximate
// the L^2(S^2) inner products of the kernels they represent (vector for g:
// sqrt(w_j) g(d_j)), and the discrete adjoint of F is the exact transcription
// of the continuous one.

namespace screenlab::farfield {

using tensor::SurfaceTensor;

enum class GridKind { ProductGauss, SphericalDesign };

struct DirectionGrid {
  int n_polar = 0;
  int n_azimuth = 0;
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // positive, summing to 4 pi
  std::vector<Vec3> t1, t2;     // orthonormal tangential frames
  // Aperture masks: receivers = observation nodes, transmitters = incident
  // nodes.  Default all-true.
  std::vector<bool> receiver_mask;
  std::vector<bool> transmitter_mask;

  int size() const { return static_cast<int>(nodes.size()); }
  int active_receivers() const;
  int active_transmitters() const;
  bool same_layout(const DirectionGrid& other) const;
};

// Product Gauss-Legendre x uniform-azimuth grid with n_polar * n_azimuth
// nodes.  Exact for spherical harmonics up to degree min(2 n_polar - 1,
// n_azimuth - 1).
DirectionGrid build_grid(int n_polar, int n_azimuth);

// Factorizing convenience entry: picks n_polar ~ sqrt(n_dirs / 1.5).  Only
// ProductGauss is supported; SphericalDesign requests are rejected.
DirectionGrid build_grid(int n_dirs, GridKind kind);

// Restrict a mask to directions with node . axis >= 0 (hemisphere aperture).
void apply_hemisphere_mask(DirectionGrid& grid, const Vec3& axis, bool receivers,
                           bool transmitters);

enum class OperatorKind { F, F_lambda, Modified };

struct FarFieldMatrix {
  std::shared_ptr<const DirectionGrid> grid;
  MatX entries;  // (2 * active receivers) x (2 * active transmitters)
  OperatorKind kind = OperatorKind::F;
  cplx lambda{0.0};  // meaningful for F_lambda / Modified
};

// lambda- and Sigma-independent pieces of the assembly, reusable across a
// lambda sweep: obs maps stacked radiating mode coefficients (TE block then
// TM block, each num_modes(N) long) to far-field samples; inc maps stacked
// incident-node kernel components to incident mode coefficients.
struct ModeMaps {
  double kappa = 0.0;
  int N = 0;
  MatX obs;  // (2 n_obs) x (2 M)
  MatX inc;  // (2 M) x (2 n_inc)
};

ModeMaps build_mode_maps(const DirectionGrid& grid, double kappa, int N);

FarFieldMatrix assemble_F(const SurfaceTensor& sigma, double kappa,
                          std::shared_ptr<const DirectionGrid> grid, int N);
FarFieldMatrix assemble_F_lambda(cplx lambda, double kappa,
                                 std::shared_ptr<const DirectionGrid> grid, int N);

// Fast variants reusing precomputed maps.
MatX assemble_F_entries(const ModeMaps& maps, const SurfaceTensor& sigma);
MatX assemble_F_lambda_entries(const ModeMaps& maps, cplx lambda);

FarFieldMatrix modified_operator(const FarFieldMatrix& F, const FarFieldMatrix& F_lambda);

struct NoiseSpec {
  double level = 0.0;     // relative spectral-norm error
  std::uint64_t seed = 0;
};

// M + E with E from i.i.d. complex uniform entries on the unit square,
// rescaled so ||E||_2 / ||M||_2 = level exactly.  Deterministic given seed
// (the uniform variates are generated from raw mt19937_64 output, not from
// std::uniform_real_distribution, for cross-platform byte stability).
FarFieldMatrix add_noise(const FarFieldMatrix& M, const NoiseSpec& spec);

// Signed direction-flip permutation R in the discrete frames: node i maps to
// the node at -x_i; the t1 component keeps its sign, the t2 component flips
// (the frame limit at the antipode reverses phi_hat).  Requires an
// unmasked grid symmetric under the antipodal map (ProductGauss with even
// n_azimuth is).  Returned as a dense real matrix of size 2n x 2n.
Eigen::MatrixXd flip_operator(const DirectionGrid& grid);

// FFO1 binary format: magic "FFO1", u32 rows, u32 cols (little-endian),
// row-major complex entries as little-endian f64 (re, im) pairs.
void write_ffo1(const std::string& path, const MatX& m);
MatX read_ffo1(const std::string& path);

// JSON sidecar describing a stored matrix.
nlohmann::json sidecar(const FarFieldMatrix& m, const SurfaceTensor* sigma,
                       const NoiseSpec* noise);

}  // namespace screenlab::farfield
