#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "screenlab/tensor.hpp"
#include "screenlab/types.hpp"

// Single-JSON run configuration shared by every CLI command, with strict
// validation and a verbatim echo into the run manifest.

namespace screenlab::config {

struct LambdaGrid {
  double min = -0.5;
  double max = 1.0;
  int count = 501;
  double im = 0.0;  // constant imaginary part of the sweep line

  std::vector<cplx> values() const;
};

struct GridConfig {
  int n_polar = 8;
  int n_azimuth = 12;
  // Optional hemisphere apertures: keep nodes with node . axis >= 0.
  std::optional<Vec3> receiver_hemisphere;
  std::optional<Vec3> transmitter_hemisphere;
};

struct NoiseConfig {
  double level = 0.0015;
  std::uint64_t seed = 424242;
};

struct ProbeConfig {
  int count = 15;
  double r_max = 0.9;
  std::uint64_t seed = 7;
};

struct TikhonovConfig {
  std::string policy = "fixed";  // "fixed" | "morozov"
  double rho = 1e-6;
  double tau = 1.1;
};

struct WindowConfig {
  double re_min = -0.5;
  double re_max = 1.0;
  double im_min = -1e-6;
  double im_max = 100.0;
};

struct IncidentConfig {
  Vec3 d{0.0, 0.0, 1.0};
  Vec3c p{1.0, 0.0, 0.0};
};

struct TraceConfig {
  std::string param = "a_im";  // which scalar of sigma the sweep drives
  std::vector<double> values;
};

struct RunConfig {
  double kappa = 1.9;
  tensor::SurfaceTensor sigma{cplx(0.0, 0.5), cplx(0.0, 0.0)};
  // Optional general 2x2 tensor (admissibility checks only).
  std::optional<tensor::GeneralTensor2> sigma_general;
  int N = 17;  // truncation; default ceil(kappa) + 15
  GridConfig grid;
  LambdaGrid lambda_grid;
  NoiseConfig noise;
  ProbeConfig probes;
  TikhonovConfig tikhonov;
  WindowConfig window;
  IncidentConfig incident;
  std::optional<TraceConfig> trace;
  std::string cache_dir;   // empty: no cache
  std::string output_dir = ".";

  nlohmann::json echo;  // the parsed document, verbatim

  tensor::GeneralTensor2 general_tensor() const {
    return sigma_general ? *sigma_general : sigma.general();
  }
};

// Parse + validate.  Unknown top-level keys are rejected to catch typos.
RunConfig parse(const nlohmann::json& doc);
RunConfig load(const std::string& path);

// Manifest: config echo, effective seeds, library version, timestamp.
nlohmann::json manifest(const RunConfig& cfg);

inline constexpr const char* version = "0.1.0";

// Atomic text file write (temp + rename).
void write_text_atomic(const std::string& path, const std::string& contents);

// 17-significant-digit float formatting used by every CSV emitter.
std::string format_float(double v);

}  // namespace screenlab::config
