#include "screenlab/mie.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

namespace screenlab::mie {

using specfun::riccati_h;
using specfun::riccati_j;
using specfun::vsh_eval;
using specfun::VshSample;

namespace {

cplx ipow(int k) {
  // i^k
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((k % 4) + 4) % 4];
}

void check_plane_wave(const PlaneWave& w) {
  if (std::abs(w.d.norm() - 1.0) > 1e-12) throw std::invalid_argument("PlaneWave: |d| != 1");
  if (std::abs(w.d.dot(w.p.real())) > 1e-12 || std::abs(w.d.dot(w.p.imag())) > 1e-12)
    throw std::invalid_argument("PlaneWave: polarization not orthogonal to direction");
  if (w.p.norm() == 0.0) throw std::invalid_argument("PlaneWave: zero polarization");
  if (!(w.kappa > 0.0)) throw std::invalid_argument("PlaneWave: kappa must be positive");
}

}  // namespace

std::vector<IncidentBlock> plane_wave_coefficients(const PlaneWave& w, int N) {
  check_plane_wave(w);
  std::vector<IncidentBlock> out(num_modes(N));
  const cplx ik(0.0, w.kappa);
  for (int n = 1; n <= N; ++n) {
    for (int m = -n; m <= n; ++m) {
      const VshSample v = vsh_eval(n, m, w.d);
      // p e^{i kappa d.x} = sum 4pi i^n (X*(d).p) M_j + 4pi i^{n+1} (U*(d).p) N_j;
      // the incident field carries the extra factor i kappa.
      const cplx xp = v.X.dot(w.p);  // Eigen dot conjugates its first factor
      const cplx up = v.U.dot(w.p);
      IncidentBlock& b = out[mode_index(n, m)];
      b.i_te = ik * 4.0 * pi * ipow(n) * xp;
      b.i_tm = ik * 4.0 * pi * ipow(n + 1) * up;
    }
  }
  return out;
}

ModeBlock screen_mode_block(int n, const SurfaceTensor& sigma, double kappa) {
  const auto j = riccati_j(n, kappa);
  const auto h = riccati_h(n, kappa);
  const cplx ja = j.value, Rj = j.derivative_term;
  const cplx ha = h.value, Rh = h.derivative_term;
  const cplx ia = cplx(0, 1) * sigma.a;
  const cplx ib = cplx(0, 1) * sigma.b;

  ModeBlock blk;
  blk.n = n;
  // Unknown ordering: (c_te, c_tm, s_te, s_tm).
  // Rows: TE trace continuity, TM trace continuity, TE jump, TM jump.
  blk.A << ja, 0, -ha, 0,
           0, Rj, 0, -Rh,
           Rj, 0, -Rh - ia * ha, ib * Rh,
           0, ja, ib * ha, -ha + ia * Rh;
  blk.rhs << ja, 0,
             0, Rj,
             Rj + ia * ja, -ib * Rj,
             -ib * ja, ja - ia * Rj;

  // Condition of the column-equilibrated block: the raw columns scale like
  // j_n (tiny) and h_n (huge) at large n, which is harmless for the solve
  // but would swamp the singular-value ratio.
  Eigen::Matrix4cd eq = blk.A;
  for (int c = 0; c < 4; ++c) {
    const double nc = eq.col(c).norm();
    if (nc > 0.0) eq.col(c) /= nc;
  }
  const Eigen::JacobiSVD<Eigen::Matrix4cd> svd(eq);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  blk.condition = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
  return blk;
}

ScreenModeSolution solve_screen_mode(int n, const SurfaceTensor& sigma, double kappa,
                                     const IncidentBlock& inc) {
  const ModeBlock blk = screen_mode_block(n, sigma, kappa);
  if (!(blk.condition < 1e12)) {
    throw std::runtime_error("solve_screen_mode: near-singular mode block at n = " +
                             std::to_string(n) + " (condition " + std::to_string(blk.condition) +
                             ")");
  }
  const Eigen::Vector2cd i(inc.i_te, inc.i_tm);
  const Eigen::Vector4cd sol = blk.A.partialPivLu().solve(blk.rhs * i);
  return {sol(0), sol(1), sol(2), sol(3)};
}

FieldExpansion solve_forward_coeffs(const std::vector<IncidentBlock>& inc, double kappa,
                                    const SurfaceTensor& sigma, int N) {
  if (static_cast<int>(inc.size()) < num_modes(N))
    throw std::invalid_argument("solve_forward_coeffs: incident coefficient list too short");
  FieldExpansion e;
  e.kappa = kappa;
  e.N = N;
  e.te.resize(num_modes(N));
  e.tm.resize(num_modes(N));
  for (int n = 1; n <= N; ++n) {
    const ModeBlock blk = screen_mode_block(n, sigma, kappa);
    if (!(blk.condition < 1e12)) {
      throw std::runtime_error("solve_forward: near-singular mode block at n = " +
                               std::to_string(n));
    }
    const auto lu = blk.A.partialPivLu();
    for (int m = -n; m <= n; ++m) {
      const int idx = mode_index(n, m);
      const IncidentBlock& b = inc[idx];
      const Eigen::Vector4cd sol = lu.solve(blk.rhs * Eigen::Vector2cd(b.i_te, b.i_tm));
      e.te[idx] = {b.i_te, sol(0), sol(2)};
      e.tm[idx] = {b.i_tm, sol(1), sol(3)};
    }
  }
  return e;
}

FieldExpansion solve_forward(const PlaneWave& w, const SurfaceTensor& sigma, int N) {
  return solve_forward_coeffs(plane_wave_coefficients(w, N), w.kappa, sigma, N);
}

namespace {

// Evaluate sum of modes with given (TE, TM) coefficient accessors and radial
// kind (j or h) at point x.
template <typename GetTe, typename GetTm>
Vec3c sum_modes(const FieldExpansion& e, const Vec3& x, bool radiating, GetTe te, GetTm tm) {
  const double r = x.norm();
  if (r <= 0.0) throw std::domain_error("evaluate_field: |x| must be positive");
  const Vec3 xhat = x / r;
  const double kr = e.kappa * r;
  Vec3c out = Vec3c::Zero();
  for (int n = 1; n <= e.N; ++n) {
    const specfun::RadialPair z = radiating ? riccati_h(n, kr) : riccati_j(n, kr);
    const double s = std::sqrt(static_cast<double>(n) * (n + 1));
    for (int m = -n; m <= n; ++m) {
      const int idx = mode_index(n, m);
      const cplx cte = te(idx);
      const cplx ctm = tm(idx);
      if (cte == 0.0 && ctm == 0.0) continue;
      const VshSample v = vsh_eval(n, m, xhat);
      // M_z = z X;  N_z = -(s z/(kr)) Y r_hat - R[z] U.
      out += cte * z.value * v.X;
      out += ctm * (-(s * z.value / kr) * v.Y * xhat.cast<cplx>() - z.derivative_term * v.U);
    }
  }
  return out;
}

}  // namespace

Vec3c evaluate_field(const FieldExpansion& e, const Vec3& x, Side side) {
  if (side == Side::Interior) {
    return sum_modes(
        e, x, false, [&](int i) { return e.te[i].interior; },
        [&](int i) { return e.tm[i].interior; });
  }
  const Vec3c incident = sum_modes(
      e, x, false, [&](int i) { return e.te[i].incident; },
      [&](int i) { return e.tm[i].incident; });
  const Vec3c scattered = sum_modes(
      e, x, true, [&](int i) { return e.te[i].scattered; },
      [&](int i) { return e.tm[i].scattered; });
  return incident + scattered;
}

Vec3c far_field(const FieldExpansion& e, const Vec3& xhat) {
  if (std::abs(xhat.norm() - 1.0) > 1e-12) throw std::domain_error("far_field: |xhat| != 1");
  Vec3c out = Vec3c::Zero();
  for (int n = 1; n <= e.N; ++n) {
    // h_n(kr) ~ (-i)^{n+1} e^{ikr}/(kr), R[h](kr) ~ (-i)^n e^{ikr}/(kr).
    const cplx cM = ipow(-(n + 1)) / e.kappa;
    const cplx cN = -ipow(-n) / e.kappa;
    for (int m = -n; m <= n; ++m) {
      const int idx = mode_index(n, m);
      const cplx ste = e.te[idx].scattered;
      const cplx stm = e.tm[idx].scattered;
      if (ste == 0.0 && stm == 0.0) continue;
      const VshSample v = vsh_eval(n, m, xhat);
      out += cM * ste * v.X + cN * stm * v.U;
    }
  }
  return out;
}

nlohmann::json to_json(const FieldExpansion& e) {
  nlohmann::json modes = nlohmann::json::array();
  for (int n = 1; n <= e.N; ++n) {
    for (int m = -n; m <= n; ++m) {
      const int idx = mode_index(n, m);
      auto pack = [&](const char* family, const ModeCoeff& c) {
        modes.push_back({{"n", n},
                         {"m", m},
                         {"family", family},
                         {"incident", {c.incident.real(), c.incident.imag()}},
                         {"interior", {c.interior.real(), c.interior.imag()}},
                         {"scattered", {c.scattered.real(), c.scattered.imag()}}});
      };
      pack("TE", e.te[idx]);
      pack("TM", e.tm[idx]);
    }
  }
  return {{"kappa", e.kappa}, {"N", e.N}, {"modes", modes}};
}

FieldExpansion expansion_from_json(const nlohmann::json& j) {
  FieldExpansion e;
  e.kappa = j.at("kappa").get<double>();
  e.N = j.at("N").get<int>();
  e.te.resize(num_modes(e.N));
  e.tm.resize(num_modes(e.N));
  for (const auto& mode : j.at("modes")) {
    const int n = mode.at("n").get<int>();
    const int m = mode.at("m").get<int>();
    ModeCoeff c;
    auto rd = [&](const char* key) {
      const auto& v = mode.at(key);
      return cplx(v.at(0).get<double>(), v.at(1).get<double>());
    };
    c.incident = rd("incident");
    c.interior = rd("interior");
    c.scattered = rd("scattered");
    if (mode.at("family").get<std::string>() == "TE")
      e.te[mode_index(n, m)] = c;
    else
      e.tm[mode_index(n, m)] = c;
  }
  return e;
}

}  // namespace screenlab::mie
