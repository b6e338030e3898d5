#include "screenlab/farfield.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

#include "screenlab/auxiliary.hpp"

static_assert(std::endian::native == std::endian::little,
              "FFO1 serialization assumes a little-endian host");

namespace screenlab::farfield {

using specfun::mode_index;
using specfun::num_modes;
using specfun::vsh_eval;

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

std::vector<int> active_indices(const std::vector<bool>& mask) {
  std::vector<int> out;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(static_cast<int>(i));
  return out;
}

cplx ipow(int k) {
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((k % 4) + 4) % 4];
}

}  // namespace

int DirectionGrid::active_receivers() const {
  return static_cast<int>(active_indices(receiver_mask).size());
}
int DirectionGrid::active_transmitters() const {
  return static_cast<int>(active_indices(transmitter_mask).size());
}

bool DirectionGrid::same_layout(const DirectionGrid& other) const {
  if (n_polar != other.n_polar || n_azimuth != other.n_azimuth) return false;
  if (receiver_mask != other.receiver_mask) return false;
  if (transmitter_mask != other.transmitter_mask) return false;
  return true;
}

DirectionGrid build_grid(int n_polar, int n_azimuth) {
  if (n_polar < 1 || n_azimuth < 2) throw std::invalid_argument("build_grid: grid too small");
  DirectionGrid g;
  g.n_polar = n_polar;
  g.n_azimuth = n_azimuth;
  std::vector<double> ct, wt;
  gauss_legendre(n_polar, ct, wt);
  const double wphi = 2.0 * pi / n_azimuth;
  for (int a = 0; a < n_polar; ++a) {
    const double cth = ct[a];
    const double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
    for (int b = 0; b < n_azimuth; ++b) {
      const double phi = wphi * b;
      const double cp = std::cos(phi), sp = std::sin(phi);
      g.nodes.emplace_back(sth * cp, sth * sp, cth);
      g.weights.push_back(wt[a] * wphi);
      g.t1.emplace_back(cth * cp, cth * sp, -sth);  // theta_hat
      g.t2.emplace_back(-sp, cp, 0.0);              // phi_hat
    }
  }
  g.receiver_mask.assign(g.nodes.size(), true);
  g.transmitter_mask.assign(g.nodes.size(), true);
  return g;
}

DirectionGrid build_grid(int n_dirs, GridKind kind) {
  if (kind == GridKind::SphericalDesign)
    throw std::invalid_argument("build_grid: spherical-design grids are not provided");
  if (n_dirs < 6) throw std::invalid_argument("build_grid: need at least 6 directions");
  // Pick the divisor pair n_polar * n_azimuth = n_dirs with even azimuth
  // count and aspect closest to the 1:1.5 polar:azimuth default.
  int best_polar = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int np = 1; np <= n_dirs; ++np) {
    if (n_dirs % np != 0) continue;
    const int na = n_dirs / np;
    if (na < 2 || na % 2 != 0) continue;
    const double score = std::abs(static_cast<double>(na) / np - 1.5);
    if (score < best_score) {
      best_score = score;
      best_polar = np;
    }
  }
  if (best_polar < 0)
    throw std::invalid_argument("build_grid: unsupported direction count for product-Gauss grid");
  return build_grid(best_polar, n_dirs / best_polar);
}

void apply_hemisphere_mask(DirectionGrid& grid, const Vec3& axis, bool receivers,
                           bool transmitters) {
  for (int i = 0; i < grid.size(); ++i) {
    const bool keep = grid.nodes[i].dot(axis) >= 0.0;
    if (receivers) grid.receiver_mask[i] = grid.receiver_mask[i] && keep;
    if (transmitters) grid.transmitter_mask[i] = grid.transmitter_mask[i] && keep;
  }
}

ModeMaps build_mode_maps(const DirectionGrid& grid, double kappa, int N) {
  ModeMaps maps;
  maps.kappa = kappa;
  maps.N = N;
  const int M = num_modes(N);
  const auto rec = active_indices(grid.receiver_mask);
  const auto tra = active_indices(grid.transmitter_mask);
  maps.obs.setZero(2 * rec.size(), 2 * M);
  maps.inc.setZero(2 * M, 2 * tra.size());

  for (size_t r = 0; r < rec.size(); ++r) {
    const int i = rec[r];
    const double sw = std::sqrt(grid.weights[i]);
    const Vec3c f1 = grid.t1[i].cast<cplx>();
    const Vec3c f2 = grid.t2[i].cast<cplx>();
    for (int n = 1; n <= N; ++n) {
      const cplx cM = ipow(-(n + 1)) / kappa;
      const cplx cN = -ipow(-n) / kappa;
      for (int m = -n; m <= n; ++m) {
        const int idx = mode_index(n, m);
        const auto v = vsh_eval(n, m, grid.nodes[i]);
        maps.obs(2 * r, idx) = sw * cM * f1.dot(v.X);
        maps.obs(2 * r + 1, idx) = sw * cM * f2.dot(v.X);
        maps.obs(2 * r, M + idx) = sw * cN * f1.dot(v.U);
        maps.obs(2 * r + 1, M + idx) = sw * cN * f2.dot(v.U);
      }
    }
  }
  const cplx ik(0.0, kappa);
  for (size_t c = 0; c < tra.size(); ++c) {
    const int j = tra[c];
    const double sw = std::sqrt(grid.weights[j]);
    for (int n = 1; n <= N; ++n) {
      const cplx cte = ik * 4.0 * pi * ipow(n);
      const cplx ctm = ik * 4.0 * pi * ipow(n + 1);
      for (int m = -n; m <= n; ++m) {
        const int idx = mode_index(n, m);
        const auto v = vsh_eval(n, m, grid.nodes[j]);
        // conj(X).t_l etc.: incident coefficients of the unit-polarization
        // plane wave from node j (Eigen's dot conjugates its first factor).
        maps.inc(idx, 2 * c) = sw * cte * v.X.dot(grid.t1[j].cast<cplx>());
        maps.inc(idx, 2 * c + 1) = sw * cte * v.X.dot(grid.t2[j].cast<cplx>());
        maps.inc(M + idx, 2 * c) = sw * ctm * v.U.dot(grid.t1[j].cast<cplx>());
        maps.inc(M + idx, 2 * c + 1) = sw * ctm * v.U.dot(grid.t2[j].cast<cplx>());
      }
    }
  }
  return maps;
}

MatX assemble_F_entries(const ModeMaps& maps, const SurfaceTensor& sigma) {
  const int M = num_modes(maps.N);
  MatX scaled = maps.inc;
  for (int n = 1; n <= maps.N; ++n) {
    const mie::ModeBlock blk = mie::screen_mode_block(n, sigma, maps.kappa);
    if (!(blk.condition < 1e12))
      throw std::runtime_error("assemble_F: near-singular mode block at n = " + std::to_string(n));
    // Scattering transfer (s_te, s_tm) = T (i_te, i_tm): rows 2,3 of A^{-1} rhs.
    const Eigen::Matrix<cplx, 4, 2> full = blk.A.partialPivLu().solve(blk.rhs);
    const Eigen::Matrix2cd T = full.bottomRows<2>();
    for (int m = -n; m <= n; ++m) {
      const int idx = mode_index(n, m);
      const auto te = maps.inc.row(idx);
      const auto tm = maps.inc.row(M + idx);
      scaled.row(idx) = T(0, 0) * te + T(0, 1) * tm;
      scaled.row(M + idx) = T(1, 0) * te + T(1, 1) * tm;
    }
  }
  return maps.obs * scaled;
}

MatX assemble_F_lambda_entries(const ModeMaps& maps, cplx lambda) {
  const int M = num_modes(maps.N);
  MatX scaled = maps.inc;
  for (int n = 1; n <= maps.N; ++n) {
    const aux::AuxModeSolution unit =
        aux::solve_aux_mode(n, lambda, maps.kappa, mie::IncidentBlock{1.0, 1.0});
    for (int m = -n; m <= n; ++m) {
      const int idx = mode_index(n, m);
      scaled.row(idx) = unit.s_te * maps.inc.row(idx);
      scaled.row(M + idx) = unit.s_tm * maps.inc.row(M + idx);
    }
  }
  return maps.obs * scaled;
}

FarFieldMatrix assemble_F(const SurfaceTensor& sigma, double kappa,
                          std::shared_ptr<const DirectionGrid> grid, int N) {
  FarFieldMatrix out;
  out.grid = grid;
  out.kind = OperatorKind::F;
  out.entries = assemble_F_entries(build_mode_maps(*grid, kappa, N), sigma);
  return out;
}

FarFieldMatrix assemble_F_lambda(cplx lambda, double kappa,
                                 std::shared_ptr<const DirectionGrid> grid, int N) {
  FarFieldMatrix out;
  out.grid = grid;
  out.kind = OperatorKind::F_lambda;
  out.lambda = lambda;
  out.entries = assemble_F_lambda_entries(build_mode_maps(*grid, kappa, N), lambda);
  return out;
}

FarFieldMatrix modified_operator(const FarFieldMatrix& F, const FarFieldMatrix& F_lambda) {
  if (!F.grid || !F_lambda.grid || !F.grid->same_layout(*F_lambda.grid))
    throw std::invalid_argument("modified_operator: grid mismatch");
  if (F.entries.rows() != F_lambda.entries.rows() || F.entries.cols() != F_lambda.entries.cols())
    throw std::invalid_argument("modified_operator: dimension mismatch");
  FarFieldMatrix out;
  out.grid = F.grid;
  out.kind = OperatorKind::Modified;
  out.lambda = F_lambda.lambda;
  out.entries = F.entries - F_lambda.entries;
  return out;
}

namespace {

double spectral_norm(const MatX& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<MatX> svd(m);
  return svd.singularValues()(0);
}

// Deterministic uniform on [0, 1) from raw mt19937_64 output.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

FarFieldMatrix add_noise(const FarFieldMatrix& M, const NoiseSpec& spec) {
  if (spec.level < 0.0 || spec.level >= 1.0)
    throw std::invalid_argument("add_noise: level must be in [0, 1)");
  FarFieldMatrix out = M;
  if (spec.level == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  MatX E(M.entries.rows(), M.entries.cols());
  for (Eigen::Index i = 0; i < E.rows(); ++i)
    for (Eigen::Index j = 0; j < E.cols(); ++j) {
      const double re = 2.0 * uniform01(rng) - 1.0;
      const double im = 2.0 * uniform01(rng) - 1.0;
      E(i, j) = cplx(re, im);
    }
  const double nM = spectral_norm(M.entries);
  const double nE = spectral_norm(E);
  if (nE == 0.0) throw std::runtime_error("add_noise: degenerate noise draw");
  E *= spec.level * nM / nE;
  out.entries = M.entries + E;
  return out;
}

Eigen::MatrixXd flip_operator(const DirectionGrid& grid) {
  for (bool b : grid.receiver_mask)
    if (!b) throw std::invalid_argument("flip_operator: requires an unmasked grid");
  for (bool b : grid.transmitter_mask)
    if (!b) throw std::invalid_argument("flip_operator: requires an unmasked grid");
  const int n = grid.size();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    int fi = -1;
    for (int j = 0; j < n; ++j) {
      if ((grid.nodes[j] + grid.nodes[i]).norm() < 1e-9) {
        fi = j;
        break;
      }
    }
    if (fi < 0) throw std::invalid_argument("flip_operator: grid is not antipodally symmetric");
    // (Rg)(d_i) = g(-d_i): express the frame at the antipode in the frame at i.
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        const Vec3& a = (k == 0) ? grid.t1[i] : grid.t2[i];
        const Vec3& b = (l == 0) ? grid.t1[fi] : grid.t2[fi];
        R(2 * i + k, 2 * fi + l) = a.dot(b);
      }
  }
  return R;
}

void write_ffo1(const std::string& path, const MatX& m) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_ffo1: cannot open " + tmp);
    out.write("FFO1", 4);
    const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double re = m(i, j).real(), im = m(i, j).imag();
        out.write(reinterpret_cast<const char*>(&re), 8);
        out.write(reinterpret_cast<const char*>(&im), 8);
      }
    if (!out) throw std::runtime_error("write_ffo1: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("write_ffo1: rename failed for " + path);
}

MatX read_ffo1(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_ffo1: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "FFO1")
    throw std::runtime_error("read_ffo1: bad magic in " + path);
  std::uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  MatX m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), 8);
      in.read(reinterpret_cast<char*>(&im), 8);
      m(i, j) = cplx(re, im);
    }
  if (!in) throw std::runtime_error("read_ffo1: truncated file " + path);
  return m;
}

nlohmann::json sidecar(const FarFieldMatrix& m, const SurfaceTensor* sigma,
                       const NoiseSpec* noise) {
  nlohmann::json j;
  j["format"] = "FFO1";
  j["rows"] = m.entries.rows();
  j["cols"] = m.entries.cols();
  switch (m.kind) {
    case OperatorKind::F: j["kind"] = "F"; break;
    case OperatorKind::F_lambda: j["kind"] = "F_lambda"; break;
    case OperatorKind::Modified: j["kind"] = "modified"; break;
  }
  if (m.kind != OperatorKind::F) j["lambda"] = {m.lambda.real(), m.lambda.imag()};
  if (m.grid) {
    j["grid"] = {{"n_polar", m.grid->n_polar},
                 {"n_azimuth", m.grid->n_azimuth},
                 {"active_receivers", m.grid->active_receivers()},
                 {"active_transmitters", m.grid->active_transmitters()}};
  }
  if (sigma)
    j["sigma"] = {{"a", {sigma->a.real(), sigma->a.imag()}},
                  {"b", {sigma->b.real(), sigma->b.imag()}}};
  if (noise) j["noise"] = {{"level", noise->level}, {"seed", noise->seed}};
  return j;
}

}  // namespace screenlab::farfield
