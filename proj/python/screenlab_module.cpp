// Python bindings: a thin functional facade over the C++ core.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "screenlab/eigs.hpp"
#include "screenlab/farfield.hpp"
#include "screenlab/inversion.hpp"
#include "screenlab/mie.hpp"
#include "screenlab/tensor.hpp"

namespace py = pybind11;
using namespace screenlab;

namespace {

tensor::SurfaceTensor make_sigma(cplx a, cplx b) { return {a, b}; }

std::shared_ptr<farfield::DirectionGrid> make_grid(int n_polar, int n_azimuth) {
  return std::make_shared<farfield::DirectionGrid>(farfield::build_grid(n_polar, n_azimuth));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral screen laboratory core";

  m.def(
      "eigenvalues",
      [](double kappa, cplx a, cplx b, double re_min, double re_max, double im_min,
         double im_max, int n_max) {
        const auto set = eigs::eigenvalues_in_window(
            kappa, make_sigma(a, b), eigs::Window{re_min, re_max, im_min, im_max}, n_max);
        py::list out;
        for (const auto& ev : set.values) {
          py::dict d;
          d["lambda"] = ev.lambda;
          d["n"] = ev.n;
          d["family"] = ev.family;
          d["multiplicity"] = ev.multiplicity;
          out.append(d);
        }
        return out;
      },
      py::arg("kappa"), py::arg("a"), py::arg("b") = cplx(0.0), py::arg("re_min") = -50.0,
      py::arg("re_max") = 50.0, py::arg("im_min") = -50.0, py::arg("im_max") = 50.0,
      py::arg("n_max") = 30,
      "Sigma-Steklov eigenvalues of the unit-sphere screen in a complex window");

  m.def(
      "check_tensor",
      [](cplx a, cplx b) {
        const auto rep = tensor::check_existence(make_sigma(a, b).general());
        py::dict d;
        d["uniqueness_ok"] = rep.uniqueness_ok;
        d["existence_ok"] = rep.existence_ok;
        if (rep.theta_star) d["theta_star"] = *rep.theta_star;
        if (rep.gamma_star) d["gamma_star"] = *rep.gamma_star;
        return d;
      },
      py::arg("a"), py::arg("b") = cplx(0.0), "Admissibility report for a rotation-class tensor");

  m.def(
      "far_field",
      [](double kappa, cplx a, cplx b, Vec3 d, const Vec3c& p, const Vec3& xhat, int N) {
        const auto e = mie::solve_forward({d.normalized(), p, kappa}, make_sigma(a, b), N);
        return Vec3c(mie::far_field(e, xhat.normalized()));
      },
      py::arg("kappa"), py::arg("a"), py::arg("b"), py::arg("d"), py::arg("p"), py::arg("xhat"),
      py::arg("N") = 17, "Far field of the scattered plane wave at one observation direction");

  m.def(
      "far_field_matrix",
      [](double kappa, cplx a, cplx b, int n_polar, int n_azimuth, int N, double noise_level,
         std::uint64_t noise_seed) {
        auto grid = make_grid(n_polar, n_azimuth);
        auto F = farfield::assemble_F(make_sigma(a, b), kappa, grid, N);
        if (noise_level > 0.0)
          F = farfield::add_noise(F, farfield::NoiseSpec{noise_level, noise_seed});
        return MatX(F.entries);
      },
      py::arg("kappa"), py::arg("a"), py::arg("b") = cplx(0.0), py::arg("n_polar") = 8,
      py::arg("n_azimuth") = 12, py::arg("N") = 17, py::arg("noise_level") = 0.0,
      py::arg("noise_seed") = 424242,
      "Dense far-field operator matrix (sqrt-weighted frame convention)");

  m.def(
      "scan",
      [](double kappa, cplx a, cplx b, std::vector<cplx> lambdas, int n_polar, int n_azimuth,
         int N, int probe_count, double r_max, std::uint64_t probe_seed, double noise_level,
         std::uint64_t noise_seed, int workers, double prominence_factor) {
        auto grid = make_grid(n_polar, n_azimuth);
        auto F = farfield::assemble_F(make_sigma(a, b), kappa, grid, N);
        if (noise_level > 0.0)
          F = farfield::add_noise(F, farfield::NoiseSpec{noise_level, noise_seed});
        const auto probes = inversion::make_probes(probe_count, r_max, probe_seed);
        inversion::TikhonovPolicy policy;
        const auto curve =
            inversion::scan_indicator(F.entries, *grid, lambdas, probes, kappa, N, policy,
                                      workers);
        const auto peaks = inversion::detect_peaks(curve, prominence_factor);
        py::dict out;
        out["lambdas"] = curve.lambdas;
        out["indicator"] = curve.indicator;
        out["residual_mean"] = curve.residual_mean;
        out["valid"] = curve.valid;
        py::list pk;
        for (const auto& p : peaks) {
          py::dict d;
          d["index"] = p.index;
          d["lambda"] = p.lambda;
          d["prominence"] = p.prominence;
          d["width"] = p.width;
          pk.append(d);
        }
        out["peaks"] = pk;
        return out;
      },
      py::arg("kappa"), py::arg("a"), py::arg("b"), py::arg("lambdas"), py::arg("n_polar") = 8,
      py::arg("n_azimuth") = 12, py::arg("N") = 17, py::arg("probe_count") = 15,
      py::arg("r_max") = 0.9, py::arg("probe_seed") = 7, py::arg("noise_level") = 0.0,
      py::arg("noise_seed") = 424242, py::arg("workers") = 1,
      py::arg("prominence_factor") = 3.0,
      "Indicator sweep over a lambda grid, with detected peaks");

  m.attr("__version__") = "0.1.0";
}
