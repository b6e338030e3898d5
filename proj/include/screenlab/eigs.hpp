#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "screenlab/tensor.hpp"
#include "screenlab/types.hpp"

// Direct Sigma-Steklov eigenvalue computation on the unit ball.  Interior
// ansatz per degree n:  w = alpha M_j + beta N_j  (j-type TE/TM modes); the
// boundary condition  nu x curl w + i kappa Sigma w_T = lambda S w_T  reduces
// to the 2x2 pencil (A - lambda B)(alpha, beta)^T = 0 with B of rank one
// (S only sees the TE trace row), so det(A - lambda B) = 0 is linear in
// lambda and solvable in closed form.

namespace screenlab::eigs {

using tensor::SurfaceTensor;

struct Pencil {
  int n = 0;
  Eigen::Matrix2cd A;
  Eigen::Matrix2cd B;
};

Pencil mode_pencil(int n, double kappa, const SurfaceTensor& sigma);

struct Window {
  double re_min = 0.0, re_max = 0.0;
  double im_min = -1.0, im_max = 1.0;
  bool contains(cplx z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

struct Eigenvalue {
  cplx lambda{0.0};
  int n = 0;
  std::string family;  // "TE" for decoupled b = 0, "coupled" otherwise
  int multiplicity = 0;  // 2n + 1
};

struct EigenvalueSet {
  std::vector<Eigenvalue> values;
  Window window;
  double kappa = 0.0;
  SurfaceTensor sigma;
  // Degrees whose pencil is degenerate (every lambda admissible, or no
  // lambda-dependence left); flagged, never silently folded into `values`.
  std::vector<int> degenerate_modes;
};

// Closed-form per-degree eigenvalues collected over n <= N_max.  Throws if a
// degree hits an interior resonance (both trace coefficients vanish).
EigenvalueSet eigenvalues_in_window(double kappa, const SurfaceTensor& sigma,
                                    const Window& window, int N_max = 30);

// Eigenvector (alpha, beta) for a reported eigenvalue (null vector of
// A - lambda B), normalized to unit Euclidean norm.
Vec2c eigenvector(const Pencil& p, cplx lambda);

struct TraceRow {
  double s = 0.0;
  std::vector<Eigenvalue> values;
};

// Sweep a one-parameter tensor family sigma(s) and collect the in-window
// eigenvalues for each parameter value.
std::vector<TraceRow> eigenvalue_trace(double kappa,
                                       const std::function<SurfaceTensor(double)>& family,
                                       const std::vector<double>& params, const Window& window,
                                       int N_max = 30);

nlohmann::json to_json(const EigenvalueSet& set);

}  // namespace screenlab::eigs
