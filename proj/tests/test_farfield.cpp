#include <doctest.h>

#include <cstdio>
#include <random>

#include "oracles.hpp"
#include "screenlab/farfield.hpp"

using namespace screenlab;
using namespace screenlab::farfield;

namespace {
const cplx I(0.0, 1.0);

std::shared_ptr<DirectionGrid> grid96() {
  return std::make_shared<DirectionGrid>(build_grid(8, 12));
}

// Kernel sampled from a smooth tangential field: g(d) = (I - dd^T) c(d) with
// a low-degree polynomial c.
Vec3c smooth_kernel(const Vec3& d) {
  const Vec3c c(cplx(1.0, 0.2) * d.x() + 0.3, cplx(0.0, 1.0) * d.y() - 0.1,
                0.5 * d.z() * d.x() + cplx(0.2, -0.4));
  return c - d.cast<cplx>() * d.cast<cplx>().dot(c);
}

// Kernel coefficient vector in the matrix convention (sqrt-weighted frames).
VecX kernel_vector(const DirectionGrid& g) {
  VecX v(2 * g.size());
  for (int j = 0; j < g.size(); ++j) {
    const Vec3c gj = smooth_kernel(g.nodes[j]);
    const double sw = std::sqrt(g.weights[j]);
    v(2 * j) = sw * g.t1[j].cast<cplx>().dot(gj);
    v(2 * j + 1) = sw * g.t2[j].cast<cplx>().dot(gj);
  }
  return v;
}

}  // namespace

TEST_CASE("grid weights, frames, quadrature degree") {
  const auto g = build_grid(8, 12);
  REQUIRE(g.size() == 96);
  double wsum = 0.0;
  for (double w : g.weights) {
    CHECK(w > 0.0);
    wsum += w;
  }
  CHECK(wsum == doctest::Approx(4.0 * pi).epsilon(1e-12));
  for (int i = 0; i < g.size(); ++i) {
    CHECK(std::abs(g.nodes[i].norm() - 1.0) < 1e-12);
    CHECK(std::abs(g.t1[i].dot(g.nodes[i])) < 1e-12);
    CHECK(std::abs(g.t2[i].dot(g.nodes[i])) < 1e-12);
    CHECK(std::abs(g.t1[i].dot(g.t2[i])) < 1e-12);
    CHECK(std::abs(g.t1[i].norm() - 1.0) < 1e-12);
  }
  // Exact integration of |Y_{3,2}|^2.
  cplx acc = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const auto v = specfun::vsh_eval(3, 2, g.nodes[i]);
    acc += g.weights[i] * v.Y * std::conj(v.Y);
  }
  CHECK(std::abs(acc - 1.0) < 1e-12);
}

TEST_CASE("build_grid by count and aperture mask") {
  const auto g = build_grid(96, GridKind::ProductGauss);
  CHECK(g.n_polar == 8);
  CHECK(g.n_azimuth == 12);
  CHECK_THROWS_AS(build_grid(96, GridKind::SphericalDesign), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(7, GridKind::ProductGauss), std::invalid_argument);

  auto masked = build_grid(8, 12);
  apply_hemisphere_mask(masked, Vec3(0, 0, 1), true, false);
  CHECK(masked.active_receivers() == 48);
  CHECK(masked.active_transmitters() == 96);
}

TEST_CASE("assemble_F: Sigma = 0 gives the zero matrix") {
  const auto g = grid96();
  const auto F = assemble_F(tensor::SurfaceTensor{0.0, 0.0}, 1.9, g, 8);
  CHECK(F.entries.norm() == doctest::Approx(0.0));
  CHECK(F.entries.rows() == 192);
  CHECK(F.entries.cols() == 192);
}

TEST_CASE("Herglotz superposition oracle") {
  const auto g = grid96();
  const tensor::SurfaceTensor sigma{0.5 * I, 0.0};
  const int N = 17;
  const double kappa = 1.9;
  const auto F = assemble_F(sigma, kappa, g, N);
  const VecX gv = kernel_vector(*g);
  const VecX action = F.entries * gv;

  // Direct superposition: solve one forward problem per incident node and
  // accumulate w_j g_j . (far field at the receivers).
  const int n = g->size();
  VecX direct = VecX::Zero(2 * n);
  for (int j = 0; j < n; ++j) {
    const Vec3c gj = smooth_kernel(g->nodes[j]);
    if (gj.norm() < 1e-14) continue;
    const mie::FieldExpansion e = mie::solve_forward({g->nodes[j], gj, kappa}, sigma, N);
    for (int i = 0; i < n; ++i) {
      const Vec3c ff = mie::far_field(e, g->nodes[i]);
      const double swi = std::sqrt(g->weights[i]);
      direct(2 * i) += g->weights[j] * swi * g->t1[i].cast<cplx>().dot(ff);
      direct(2 * i + 1) += g->weights[j] * swi * g->t2[i].cast<cplx>().dot(ff);
    }
  }
  CHECK((action - direct).norm() < 1e-6 * direct.norm());
}

TEST_CASE("quadrature refinement improves the Herglotz action") {
  // The matrix action equals the exact Herglotz far field up to the
  // quadrature error of the incident-side integral; compare a coarse and a
  // refined grid against a much finer reference on the same receivers.
  const tensor::SurfaceTensor sigma{0.5 * I, 0.0};
  const double kappa = 1.9;
  const int N = 12;

  // Exact coefficients of the Herglotz field: integrate the plane-wave
  // coefficients of the kernel over the sphere with a dense oracle grid
  // (composite Simpson in theta x trapezoid in phi, one sweep for all modes).
  std::vector<mie::IncidentBlock> exact(specfun::num_modes(N), mie::IncidentBlock{0.0, 0.0});
  {
    const int n_theta = 801, n_phi = 64;
    const double dtheta = pi / (n_theta - 1);
    const double dphi = 2.0 * pi / n_phi;
    for (int a = 0; a < n_theta; ++a) {
      const double theta = a * dtheta;
      double sw = (a == 0 || a == n_theta - 1) ? 1.0 : ((a % 2 == 1) ? 4.0 : 2.0);
      sw *= dtheta / 3.0;
      const double st = std::sin(theta), ct = std::cos(theta);
      for (int b = 0; b < n_phi; ++b) {
        const double phi = b * dphi;
        const Vec3 d(st * std::cos(phi), st * std::sin(phi), ct);
        const double w = sw * st * dphi;
        if (w == 0.0) continue;
        const Vec3c gd = smooth_kernel(d);
        if (gd.norm() < 1e-15) continue;
        const auto blocks = mie::plane_wave_coefficients({d, gd, kappa}, N);
        for (size_t idx = 0; idx < exact.size(); ++idx) {
          exact[idx].i_te += w * blocks[idx].i_te;
          exact[idx].i_tm += w * blocks[idx].i_tm;
        }
      }
    }
  }
  const mie::FieldExpansion ref = mie::solve_forward_coeffs(exact, kappa, sigma, N);

  auto action_error = [&](int n_polar, int n_azimuth) {
    auto g = std::make_shared<DirectionGrid>(build_grid(n_polar, n_azimuth));
    const auto F = assemble_F(sigma, kappa, g, N);
    const VecX act = F.entries * kernel_vector(*g);
    double err = 0.0;
    for (int i = 0; i < g->size(); ++i) {
      const Vec3c ff = mie::far_field(ref, g->nodes[i]);
      const double swi = std::sqrt(g->weights[i]);
      err = std::max(err, std::abs(act(2 * i) - swi * g->t1[i].cast<cplx>().dot(ff)));
      err = std::max(err, std::abs(act(2 * i + 1) - swi * g->t2[i].cast<cplx>().dot(ff)));
    }
    return err;
  };

  // An under-resolved incident grid (exact only to degree 7 < N) aliases the
  // mode content; the reference resolution removes that error entirely.
  const double coarse = action_error(4, 8);
  const double fine = action_error(8, 12);
  CHECK(fine * 10.0 < coarse + 1e-13);
  CHECK(fine < 1e-9);
}

TEST_CASE("adjoint identity for F and F_lambda") {
  const auto g = grid96();
  const double kappa = 1.9;
  const int N = 17;
  for (const cplx b : {cplx(0.0), cplx(0.1)}) {
    const tensor::SurfaceTensor sigma{0.5 * I, b};
    const MatX F = assemble_F(sigma, kappa, g, N).entries;
    const MatX Ft = assemble_F(tensor::transpose(sigma), kappa, g, N).entries;
    const Eigen::MatrixXd R = flip_operator(*g);
    const MatX rhs = (R * Ft * R).conjugate();
    CHECK((F.adjoint() - rhs).norm() < 1e-8 * F.norm());
  }
  const MatX Fl = assemble_F_lambda(cplx(0.4), kappa, g, N).entries;
  const Eigen::MatrixXd R = flip_operator(*g);
  CHECK((Fl.adjoint() - (R * Fl * R).conjugate()).norm() < 1e-8 * Fl.norm());
}

TEST_CASE("TM blocks of F_lambda constant across lambda") {
  const auto g = grid96();
  const auto maps = build_mode_maps(*g, 1.9, 10);
  const MatX a = assemble_F_lambda_entries(maps, cplx(-0.5));
  const MatX b = assemble_F_lambda_entries(maps, cplx(0.9));
  // Difference of the two operators is TE-only: applying it to any kernel
  // and projecting the far field back on TM modes gives zero; equivalently
  // the TM-scaled part of the assembly is bitwise equal.  Check through the
  // mode-space factor directly.
  const int M = specfun::num_modes(10);
  for (int n = 1; n <= 10; ++n) {
    const auto sa = aux::solve_aux_mode(n, cplx(-0.5), 1.9, mie::IncidentBlock{1.0, 1.0});
    const auto sb = aux::solve_aux_mode(n, cplx(0.9), 1.9, mie::IncidentBlock{1.0, 1.0});
    CHECK(sa.s_tm == sb.s_tm);  // bitwise
    CHECK(sa.s_te != sb.s_te);
  }
  CHECK((a - b).norm() > 1e-8);  // TE part does move
  (void)M;
}

TEST_CASE("modified operator arithmetic") {
  const auto g = grid96();
  const auto F = assemble_F(tensor::SurfaceTensor{0.5 * I, 0.0}, 1.9, g, 8);
  const auto Fl = assemble_F_lambda(cplx(0.2), 1.9, g, 8);
  const auto M = modified_operator(F, Fl);
  CHECK((M.entries - (F.entries - Fl.entries)).norm() == 0.0);
  const auto zero = modified_operator(F, F);
  CHECK(zero.entries.norm() == 0.0);

  auto other = std::make_shared<DirectionGrid>(build_grid(4, 8));
  const auto F2 = assemble_F(tensor::SurfaceTensor{0.5 * I, 0.0}, 1.9, other, 8);
  CHECK_THROWS_AS(modified_operator(F, F2), std::invalid_argument);
}

TEST_CASE("noise contract") {
  const auto g = grid96();
  auto F = assemble_F(tensor::SurfaceTensor{0.5 * I, 0.0}, 1.9, g, 12);

  const auto same = add_noise(F, NoiseSpec{0.0, 9});
  CHECK((same.entries - F.entries).norm() == 0.0);

  const NoiseSpec spec{0.0015, 20240915};
  const auto noisy = add_noise(F, spec);
  Eigen::BDCSVD<MatX> svd_d(noisy.entries - F.entries);
  Eigen::BDCSVD<MatX> svd_f(F.entries);
  const double rel = svd_d.singularValues()(0) / svd_f.singularValues()(0);
  CHECK(std::abs(rel - 0.0015) < 1e-12);

  const auto noisy2 = add_noise(F, spec);
  CHECK((noisy2.entries - noisy.entries).norm() == 0.0);
  const auto other_seed = add_noise(F, NoiseSpec{0.0015, 1});
  CHECK((other_seed.entries - noisy.entries).norm() > 0.0);
}

TEST_CASE("compactness diagnostic: singular values collapse") {
  const auto g = grid96();
  const int N = 12;
  const auto F = assemble_F(tensor::SurfaceTensor{0.5 * I, 0.1}, 1.9, g, N);
  Eigen::BDCSVD<MatX> svd(F.entries);
  const auto& s = svd.singularValues();
  // Rank cannot exceed the mode count, and the tail is far below 1e-10.
  CHECK(s(std::min<int>(2 * specfun::num_modes(N), s.size() - 1)) < 1e-10 * s(0));
}

TEST_CASE("FFO1 round trip is bitwise") {
  std::mt19937_64 rng(2);
  MatX m(7, 5);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 5; ++j) m(i, j) = oracles::random_cplx(rng);
  const std::string path = "test_roundtrip.ffo";
  write_ffo1(path, m);
  const MatX back = read_ffo1(path);
  REQUIRE(back.rows() == 7);
  REQUIRE(back.cols() == 5);
  CHECK((back - m).norm() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("sidecar metadata") {
  const auto g = grid96();
  const auto Fl = assemble_F_lambda(cplx(0.25, 0.0), 1.9, g, 8);
  const tensor::SurfaceTensor sigma{0.5 * I, 0.0};
  const NoiseSpec noise{0.0015, 3};
  const auto j = sidecar(Fl, &sigma, &noise);
  CHECK(j.at("kind") == "F_lambda");
  CHECK(j.at("lambda").at(0).get<double>() == doctest::Approx(0.25));
  CHECK(j.at("grid").at("n_polar").get<int>() == 8);
  CHECK(j.at("noise").at("seed").get<std::uint64_t>() == 3);
}
