#include "screenlab/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

#include "screenlab/parallel.hpp"

namespace screenlab::inversion {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<int> active_indices(const std::vector<bool>& mask) {
  std::vector<int> out;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

ProbeSet make_probes(int count, double r_max, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("make_probes: count must be positive");
  if (!(r_max > 0.0 && r_max < 1.0))
    throw std::invalid_argument("make_probes: r_max must lie in (0, 1)");
  ProbeSet set;
  set.r_max = r_max;
  set.seed = seed;
  std::mt19937_64 rng(seed);
  while (static_cast<int>(set.points.size()) < count) {
    const double x = r_max * (2.0 * uniform01(rng) - 1.0);
    const double y = r_max * (2.0 * uniform01(rng) - 1.0);
    const double z = r_max * (2.0 * uniform01(rng) - 1.0);
    const Vec3 p(x, y, z);
    if (p.norm() <= r_max) set.points.push_back(p);
  }
  return set;
}

Vec3c dipole_far_field(const Vec3& xhat, const Vec3& z, const Vec3& q, double kappa) {
  if (std::abs(xhat.norm() - 1.0) > 1e-12)
    throw std::domain_error("dipole_far_field: |xhat| != 1");
  const Vec3 t = xhat.cross(q).cross(xhat);
  const cplx phase = std::exp(cplx(0.0, -kappa * xhat.dot(z)));
  return cplx(0.0, kappa / (4.0 * pi)) * phase * t.cast<cplx>();
}

VecX dipole_rhs(const DirectionGrid& grid, const Vec3& z, const Vec3& q, double kappa) {
  const auto rec = active_indices(grid.receiver_mask);
  VecX rhs(2 * rec.size());
  for (size_t r = 0; r < rec.size(); ++r) {
    const int i = rec[r];
    const Vec3c e = dipole_far_field(grid.nodes[i], z, q, kappa);
    const double sw = std::sqrt(grid.weights[i]);
    rhs(2 * r) = sw * grid.t1[i].cast<cplx>().dot(e);
    rhs(2 * r + 1) = sw * grid.t2[i].cast<cplx>().dot(e);
  }
  return rhs;
}

TikhonovResult tikhonov_solve(const MatX& M, const VecX& rhs, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("tikhonov_solve: alpha must be positive");
  Eigen::BDCSVD<MatX> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  VecX beta = svd.matrixU().adjoint() * rhs;
  VecX filtered(beta.size());
  for (Eigen::Index k = 0; k < beta.size(); ++k)
    filtered(k) = s(k) / (s(k) * s(k) + alpha) * beta(k);
  TikhonovResult out;
  out.g = svd.matrixV() * filtered;
  out.residual = (M * out.g - rhs).norm();
  return out;
}

namespace {

// One factorization of the modified operator, reused for all right-hand
// sides at a fixed lambda.
struct Factored {
  Eigen::BDCSVD<MatX> svd;
  explicit Factored(const MatX& m) : svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV) {}

  TikhonovResult solve(const VecX& rhs, double alpha) const {
    const auto& s = svd.singularValues();
    VecX beta = svd.matrixU().adjoint() * rhs;
    VecX filtered(beta.size());
    double res2 = rhs.squaredNorm() - beta.squaredNorm();  // out-of-range part
    res2 = std::max(res2, 0.0);
    for (Eigen::Index k = 0; k < beta.size(); ++k) {
      filtered(k) = s(k) / (s(k) * s(k) + alpha) * beta(k);
      const double fac = alpha / (s(k) * s(k) + alpha);
      res2 += fac * fac * std::norm(beta(k));
    }
    TikhonovResult out;
    out.g = svd.matrixV() * filtered;
    out.residual = std::sqrt(res2);
    return out;
  }

  double residual_for(const VecX& rhs, double alpha) const {
    const auto& s = svd.singularValues();
    const VecX beta = svd.matrixU().adjoint() * rhs;
    double res2 = std::max(rhs.squaredNorm() - beta.squaredNorm(), 0.0);
    for (Eigen::Index k = 0; k < beta.size(); ++k) {
      const double fac = alpha / (s(k) * s(k) + alpha);
      res2 += fac * fac * std::norm(beta(k));
    }
    return std::sqrt(res2);
  }
};

double pick_alpha(const Factored& fac, const VecX& rhs, const TikhonovPolicy& policy) {
  const double smax = fac.svd.singularValues()(0);
  if (policy.mode == TikhonovPolicy::Mode::Fixed || policy.noise_level <= 0.0)
    return std::max(policy.rho * smax * smax, 1e-300);
  // Morozov: residual(alpha) is increasing; bisection on log10(alpha) until
  // residual = tau * noise_level * ||rhs||.
  const double target = policy.tau * policy.noise_level * rhs.norm();
  double lo = std::log10(std::max(smax * smax * 1e-16, 1e-300));
  double hi = std::log10(std::max(smax * smax * 1e4, 1e-280));
  if (fac.residual_for(rhs, std::pow(10.0, lo)) >= target) return std::pow(10.0, lo);
  if (fac.residual_for(rhs, std::pow(10.0, hi)) <= target) return std::pow(10.0, hi);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fac.residual_for(rhs, std::pow(10.0, mid)) < target)
      lo = mid;
    else
      hi = mid;
  }
  return std::pow(10.0, 0.5 * (lo + hi));
}

}  // namespace

IndicatorCurve scan_indicator_with_maps(const MatX& F_data, const ModeMaps& maps,
                                        const std::vector<cplx>& lambda_grid,
                                        const ProbeSet& probes, const TikhonovPolicy& policy,
                                        const DirectionGrid& grid, int workers,
                                        const AuxLookup& aux_lookup) {
  if (probes.points.empty()) throw std::invalid_argument("scan_indicator: no probe points");
  IndicatorCurve curve;
  const std::size_t L = lambda_grid.size();
  curve.lambdas = lambda_grid;
  curve.indicator.assign(L, 0.0);
  curve.residual_mean.assign(L, 0.0);
  curve.valid.assign(L, false);

  // Right-hand sides are lambda-independent; build them once.
  const Vec3 pols[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  std::vector<VecX> rhss;
  for (const Vec3& z : probes.points)
    for (const Vec3& q : pols) rhss.push_back(dipole_rhs(grid, z, q, maps.kappa));

  parallel_for(L, workers, [&](std::size_t li) {
    try {
      MatX flam;
      if (!aux_lookup || !aux_lookup(li, flam))
        flam = farfield::assemble_F_lambda_entries(maps, lambda_grid[li]);
      const MatX modified = F_data - flam;
      const Factored fac(modified);
      double norm_sum = 0.0, res_sum = 0.0;
      for (const VecX& rhs : rhss) {
        const double alpha = pick_alpha(fac, rhs, policy);
        const TikhonovResult r = fac.solve(rhs, alpha);
        norm_sum += r.g.norm();
        res_sum += r.residual;
      }
      curve.indicator[li] = norm_sum / rhss.size();
      curve.residual_mean[li] = res_sum / rhss.size();
      curve.valid[li] = true;
    } catch (const std::exception&) {
      curve.valid[li] = false;  // recorded, sweep continues
    }
  });
  return curve;
}

IndicatorCurve scan_indicator(const MatX& F_data, const DirectionGrid& grid,
                              const std::vector<cplx>& lambda_grid, const ProbeSet& probes,
                              double kappa, int N, const TikhonovPolicy& policy, int workers) {
  const ModeMaps maps = farfield::build_mode_maps(grid, kappa, N);
  return scan_indicator_with_maps(F_data, maps, lambda_grid, probes, policy, grid, workers,
                                  AuxLookup{});
}

namespace {

// Indicator values with invalid entries linearly interpolated over.
std::vector<double> interpolated(const IndicatorCurve& c) {
  std::vector<double> v = c.indicator;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (c.valid[i]) continue;
    std::size_t lo = i;
    while (lo > 0 && !c.valid[lo]) --lo;
    std::size_t hi = i;
    while (hi + 1 < n && !c.valid[hi]) ++hi;
    const bool has_lo = c.valid[lo], has_hi = c.valid[hi];
    if (has_lo && has_hi) {
      const double t = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
      v[i] = (1.0 - t) * v[lo] + t * v[hi];
    } else if (has_lo) {
      v[i] = v[lo];
    } else if (has_hi) {
      v[i] = v[hi];
    } else {
      v[i] = 0.0;
    }
  }
  return v;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<Peak> detect_peaks(const IndicatorCurve& curve, double prominence_factor) {
  const std::size_t n = curve.indicator.size();
  std::vector<Peak> peaks;
  if (n < 3) return peaks;
  const std::vector<double> v = interpolated(curve);
  const double med = median_of(v);
  const double threshold = prominence_factor * med;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
    // Prominence: on each side, walk to the nearest sample higher than the
    // peak (or the curve end) and record the minimum passed on the way.
    double left_min = v[i], right_min = v[i];
    for (std::size_t j = i; j-- > 0;) {
      if (v[j] > v[i]) break;
      left_min = std::min(left_min, v[j]);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (v[j] > v[i]) break;
      right_min = std::min(right_min, v[j]);
    }
    const double prominence = v[i] - std::max(left_min, right_min);
    if (!(prominence >= threshold)) continue;

    Peak p;
    p.index = i;
    p.lambda = curve.lambdas[i].real();
    p.prominence = prominence;
    // Full width where the curve crosses peak - prominence/2, linearly
    // interpolated between samples.
    const double level = v[i] - 0.5 * prominence;
    double left = static_cast<double>(i), right = static_cast<double>(i);
    for (std::size_t j = i; j-- > 0;) {
      if (v[j] <= level) {
        const double t = (v[j + 1] - level) / (v[j + 1] - v[j]);
        left = static_cast<double>(j + 1) - t;
        break;
      }
      left = static_cast<double>(j);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (v[j] <= level) {
        const double t = (v[j - 1] - level) / (v[j - 1] - v[j]);
        right = static_cast<double>(j - 1) + t;
        break;
      }
      right = static_cast<double>(j);
    }
    const double step =
        (n > 1) ? std::abs(curve.lambdas[1].real() - curve.lambdas[0].real()) : 1.0;
    p.width = (right - left) * step;
    peaks.push_back(p);
  }
  return peaks;
}

}  // namespace screenlab::inversion
