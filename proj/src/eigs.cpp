#include "screenlab/eigs.hpp"

#include <cmath>
#include <stdexcept>

#include "screenlab/specfun.hpp"

namespace screenlab::eigs {

using specfun::riccati_j;

Pencil mode_pencil(int n, double kappa, const SurfaceTensor& sigma) {
  if (n < 1) throw std::domain_error("mode_pencil: n >= 1 required");
  if (!(kappa > 0.0)) throw std::domain_error("mode_pencil: kappa must be positive");
  const auto j = riccati_j(n, kappa);
  const cplx ja = j.value, Rj = j.derivative_term;
  // Both trace coefficients vanishing simultaneously would be an interior
  // resonance; for the Riccati pair this cannot happen at a common argument,
  // so only an exact double zero (never hit in floating point) is fatal.
  // Smallness alone is the natural large-n decay and is handled relatively
  // in the pencil solve.
  if (ja == cplx(0.0) && Rj == cplx(0.0))
    throw std::runtime_error("mode_pencil: interior resonance at n = " + std::to_string(n));
  const cplx ik(0.0, kappa);
  Pencil p;
  p.n = n;
  // Boundary traces of the ansatz: w_T = alpha j X - beta R[j] U,
  // nu x curl w = -alpha kappa R[j] X - beta kappa j U, S w_T = alpha j X.
  // X row then U row:
  p.A << -kappa * Rj + ik * sigma.a * ja, -ik * sigma.b * Rj,
         -ik * sigma.b * ja, -kappa * ja - ik * sigma.a * Rj;
  p.B << ja, 0.0,
         0.0, 0.0;
  return p;
}

namespace {

struct ModeRoot {
  bool has_root = false;
  bool degenerate = false;
  cplx lambda{0.0};
};

ModeRoot solve_pencil(const Pencil& p) {
  const cplx j = p.B(0, 0);
  const cplx A11 = p.A(0, 0), A12 = p.A(0, 1), A21 = p.A(1, 0), A22 = p.A(1, 1);
  ModeRoot out;
  const double scale = std::abs(A11) + std::abs(A12) + std::abs(A21) + std::abs(A22);
  if (std::abs(j) < 1e-13 * std::max(1.0, scale)) {
    // B vanishes: no lambda-dependence left in the determinant.
    out.degenerate = true;
    return out;
  }
  if (std::abs(A22) < 1e-13 * std::max(1.0, scale)) {
    if (std::abs(A12) < 1e-13 * std::max(1.0, scale) ||
        std::abs(A21) < 1e-13 * std::max(1.0, scale)) {
      // TM row identically satisfiable: every lambda is an eigenvalue.
      out.degenerate = true;
      return out;
    }
    // det(A - lambda B) = -A12 A21, a nonzero constant: no root.
    return out;
  }
  // det(A - lambda B) = (A11 - lambda j) A22 - A12 A21 = 0.
  out.has_root = true;
  out.lambda = (A11 * A22 - A12 * A21) / (j * A22);
  return out;
}

}  // namespace

Vec2c eigenvector(const Pencil& p, cplx lambda) {
  const Eigen::Matrix2cd M = p.A - lambda * p.B;
  // Null vector of a (numerically) rank-one 2x2 matrix: pick the larger row.
  const double r0 = std::abs(M(0, 0)) + std::abs(M(0, 1));
  const double r1 = std::abs(M(1, 0)) + std::abs(M(1, 1));
  Vec2c v;
  if (r0 >= r1)
    v = Vec2c(-M(0, 1), M(0, 0));
  else
    v = Vec2c(-M(1, 1), M(1, 0));
  const double nrm = v.norm();
  if (nrm == 0.0) return Vec2c(1.0, 0.0);
  return v / nrm;
}

EigenvalueSet eigenvalues_in_window(double kappa, const SurfaceTensor& sigma,
                                    const Window& window, int N_max) {
  if (N_max < 1) throw std::invalid_argument("eigenvalues_in_window: N_max >= 1");
  EigenvalueSet set;
  set.window = window;
  set.kappa = kappa;
  set.sigma = sigma;
  const bool coupled = sigma.b != cplx(0.0);
  for (int n = 1; n <= N_max; ++n) {
    const Pencil p = mode_pencil(n, kappa, sigma);
    const ModeRoot root = solve_pencil(p);
    if (root.degenerate) {
      set.degenerate_modes.push_back(n);
      continue;
    }
    if (root.has_root && window.contains(root.lambda)) {
      set.values.push_back({root.lambda, n, coupled ? "coupled" : "TE", 2 * n + 1});
    }
  }
  return set;
}

std::vector<TraceRow> eigenvalue_trace(double kappa,
                                       const std::function<SurfaceTensor(double)>& family,
                                       const std::vector<double>& params, const Window& window,
                                       int N_max) {
  std::vector<TraceRow> rows;
  rows.reserve(params.size());
  for (double s : params) {
    TraceRow row;
    row.s = s;
    row.values = eigenvalues_in_window(kappa, family(s), window, N_max).values;
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json to_json(const EigenvalueSet& set) {
  nlohmann::json vals = nlohmann::json::array();
  for (const auto& e : set.values) {
    vals.push_back({{"lambda_re", e.lambda.real()},
                    {"lambda_im", e.lambda.imag()},
                    {"n", e.n},
                    {"family", e.family},
                    {"multiplicity", e.multiplicity}});
  }
  return {{"eigenvalues", vals},
          {"window",
           {{"re_min", set.window.re_min},
            {"re_max", set.window.re_max},
            {"im_min", set.window.im_min},
            {"im_max", set.window.im_max}}},
          {"kappa", set.kappa},
          {"sigma",
           {{"a", {set.sigma.a.real(), set.sigma.a.imag()}},
            {"b", {set.sigma.b.real(), set.sigma.b.imag()}}}},
          {"degenerate_modes", set.degenerate_modes}};
}

}  // namespace screenlab::eigs
