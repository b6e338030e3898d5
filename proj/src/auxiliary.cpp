#include "screenlab/auxiliary.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace screenlab::aux {

using specfun::mode_index;
using specfun::num_modes;
using specfun::riccati_h;
using specfun::riccati_j;
using specfun::vsh_eval;

TangentialExpansion smoothing_operator_s(const TangentialExpansion& in) {
  TangentialExpansion out;
  out.N = in.N;
  out.u.assign(in.u.size(), cplx(0.0));
  out.x = in.x;
  return out;
}

AuxModeSolution solve_aux_mode(int n, cplx lambda, double kappa, const IncidentBlock& inc) {
  const auto j = riccati_j(n, kappa);
  const auto h = riccati_h(n, kappa);
  const cplx te_num = kappa * j.derivative_term + lambda * j.value;
  const cplx te_den = kappa * h.derivative_term + lambda * h.value;
  const double scale = std::abs(kappa * h.derivative_term) + std::abs(lambda * h.value);
  if (std::abs(te_den) < 1e-13 * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "solve_aux_mode: TE denominator vanishes at n = " << n << ", lambda = ("
        << lambda.real() << ", " << lambda.imag() << ")";
    throw std::runtime_error(msg.str());
  }
  AuxModeSolution sol;
  sol.s_te = -inc.i_te * te_num / te_den;
  sol.s_tm = -inc.i_tm * j.value / h.value;
  return sol;
}

AuxExpansion solve_aux(const std::vector<IncidentBlock>& inc, cplx lambda, double kappa, int N) {
  if (static_cast<int>(inc.size()) < num_modes(N))
    throw std::invalid_argument("solve_aux: incident coefficient list too short");
  AuxExpansion e;
  e.kappa = kappa;
  e.lambda = lambda;
  e.N = N;
  e.incident_te.resize(num_modes(N));
  e.incident_tm.resize(num_modes(N));
  e.s_te.resize(num_modes(N));
  e.s_tm.resize(num_modes(N));
  for (int n = 1; n <= N; ++n) {
    // The per-degree ratios are m-independent; solve once per n.
    const AuxModeSolution unit = solve_aux_mode(n, lambda, kappa, IncidentBlock{1.0, 1.0});
    for (int m = -n; m <= n; ++m) {
      const int idx = mode_index(n, m);
      e.incident_te[idx] = inc[idx].i_te;
      e.incident_tm[idx] = inc[idx].i_tm;
      e.s_te[idx] = unit.s_te * inc[idx].i_te;
      e.s_tm[idx] = unit.s_tm * inc[idx].i_tm;
    }
  }
  return e;
}

Vec3c far_field(const AuxExpansion& e, const Vec3& xhat) {
  if (std::abs(xhat.norm() - 1.0) > 1e-12) throw std::domain_error("far_field: |xhat| != 1");
  auto ipow = [](int k) {
    static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[((k % 4) + 4) % 4];
  };
  Vec3c out = Vec3c::Zero();
  for (int n = 1; n <= e.N; ++n) {
    const cplx cM = ipow(-(n + 1)) / e.kappa;
    const cplx cN = -ipow(-n) / e.kappa;
    for (int m = -n; m <= n; ++m) {
      const int idx = mode_index(n, m);
      const cplx ste = e.s_te[idx];
      const cplx stm = e.s_tm[idx];
      if (ste == 0.0 && stm == 0.0) continue;
      const auto v = vsh_eval(n, m, xhat);
      out += cM * ste * v.X + cN * stm * v.U;
    }
  }
  return out;
}

}  // namespace screenlab::aux
