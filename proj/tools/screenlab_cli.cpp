// screenlab: command-line driver for the spectral screen laboratory.
//
// Subcommands
//   check-tensor  admissibility report for the configured tensor
//   eigs          direct eigenvalue computation in the configured window
//   trace         eigenvalue sweep over a one-parameter tensor family
//   forward       single plane-wave forward solve
//   faroperator   assemble the (optionally noisy) data operator, store FFO1
//   scan          indicator sweep over the lambda grid
//   peaks         re-run peak detection on an existing indicator.csv
//
// Every command takes --config <file.json> and writes its outputs plus a
// manifest.json into the configured output directory, atomically.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "screenlab/auxiliary.hpp"
#include "screenlab/eigs.hpp"
#include "screenlab/farfield.hpp"
#include "screenlab/inversion.hpp"
#include "screenlab/mie.hpp"
#include "screenlab/runconfig.hpp"
#include "screenlab/tensor.hpp"

namespace fs = std::filesystem;
using namespace screenlab;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config_path;
  int workers = 1;
  std::string cache_dir;  // overrides config when set
  std::int64_t seed_override = -1;
  std::string output_dir;  // overrides config when set
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--workers", args.workers, "Worker threads for the lambda sweep")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cache", args.cache_dir, "Cache directory for operator matrices");
  cmd->add_option("--seed-override", args.seed_override,
                  "Replace the configured noise seed (non-negative integer)");
  cmd->add_option("--output", args.output_dir, "Replace the configured output directory");
}

config::RunConfig load_config(const CommonArgs& args) {
  config::RunConfig cfg = config::load(args.config_path);
  if (!args.cache_dir.empty()) cfg.cache_dir = args.cache_dir;
  if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
  if (args.seed_override >= 0)
    cfg.noise.seed = static_cast<std::uint64_t>(args.seed_override);
  fs::create_directories(cfg.output_dir);
  if (!cfg.cache_dir.empty()) fs::create_directories(cfg.cache_dir);
  return cfg;
}

void write_json(const std::string& path, const json& j) {
  config::write_text_atomic(path, j.dump(2) + "\n");
}

void write_manifest(const config::RunConfig& cfg, const std::string& command) {
  json m = config::manifest(cfg);
  m["command"] = command;
  write_json((fs::path(cfg.output_dir) / "manifest.json").string(), m);
}

std::shared_ptr<farfield::DirectionGrid> make_grid(const config::RunConfig& cfg) {
  auto g = std::make_shared<farfield::DirectionGrid>(
      farfield::build_grid(cfg.grid.n_polar, cfg.grid.n_azimuth));
  if (cfg.grid.receiver_hemisphere)
    farfield::apply_hemisphere_mask(*g, *cfg.grid.receiver_hemisphere, true, false);
  if (cfg.grid.transmitter_hemisphere)
    farfield::apply_hemisphere_mask(*g, *cfg.grid.transmitter_hemisphere, false, true);
  return g;
}

eigs::Window make_window(const config::RunConfig& cfg) {
  return {cfg.window.re_min, cfg.window.re_max, cfg.window.im_min, cfg.window.im_max};
}

inversion::TikhonovPolicy make_policy(const config::RunConfig& cfg) {
  inversion::TikhonovPolicy p;
  p.mode = cfg.tikhonov.policy == "morozov" ? inversion::TikhonovPolicy::Mode::Morozov
                                            : inversion::TikhonovPolicy::Mode::Fixed;
  p.rho = cfg.tikhonov.rho;
  p.tau = cfg.tikhonov.tau;
  p.noise_level = cfg.noise.level;
  return p;
}

farfield::FarFieldMatrix assemble_data_operator(const config::RunConfig& cfg,
                                                std::shared_ptr<farfield::DirectionGrid> grid) {
  auto F = farfield::assemble_F(cfg.sigma, cfg.kappa, grid, cfg.N);
  if (cfg.noise.level > 0.0)
    F = farfield::add_noise(F, farfield::NoiseSpec{cfg.noise.level, cfg.noise.seed});
  return F;
}

json peaks_to_json(const std::vector<inversion::Peak>& peaks, double factor) {
  json out;
  out["prominence_factor"] = factor;
  out["peaks"] = json::array();
  for (const auto& p : peaks) {
    out["peaks"].push_back({{"index", p.index},
                            {"lambda", p.lambda},
                            {"prominence", p.prominence},
                            {"width", p.width}});
  }
  return out;
}

std::string indicator_csv(const inversion::IndicatorCurve& curve) {
  std::ostringstream os;
  os << "lambda_re,lambda_im,indicator,residual_mean,valid\n";
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    os << config::format_float(curve.lambdas[i].real()) << ','
       << config::format_float(curve.lambdas[i].imag()) << ','
       << config::format_float(curve.indicator[i]) << ','
       << config::format_float(curve.residual_mean[i]) << ',' << (curve.valid[i] ? 1 : 0)
       << '\n';
  }
  return os.str();
}

inversion::IndicatorCurve read_indicator_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  inversion::IndicatorCurve curve;
  std::string line;
  if (!std::getline(in, line) || line.rfind("lambda_re,", 0) != 0)
    throw std::runtime_error("not an indicator CSV: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    double vals[4];
    for (int k = 0; k < 4; ++k) {
      if (!std::getline(ls, field, ',')) throw std::runtime_error("short CSV row in " + path);
      vals[k] = std::stod(field);
    }
    if (!std::getline(ls, field, ',')) throw std::runtime_error("short CSV row in " + path);
    curve.lambdas.emplace_back(vals[0], vals[1]);
    curve.indicator.push_back(vals[2]);
    curve.residual_mean.push_back(vals[3]);
    curve.valid.push_back(std::stoi(field) != 0);
  }
  return curve;
}

// Cache of the lambda-operator matrices: one FFO1 file plus sidecar per
// lambda-grid index.  The sidecar must match the current run (lambda, grid
// layout, kappa, N), otherwise the entry is ignored and rebuilt.
struct AuxCache {
  std::string dir;
  double kappa = 0.0;
  int N = 0;
  int n_polar = 0, n_azimuth = 0;

  std::string base(std::size_t i) const {
    return (fs::path(dir) / ("flam_" + std::to_string(i))).string();
  }

  bool load(std::size_t i, cplx lambda, MatX& out) const {
    if (dir.empty()) return false;
    const std::string meta_path = base(i) + ".json";
    std::ifstream meta(meta_path);
    if (!meta) return false;
    try {
      json j;
      meta >> j;
      if (j.at("kind") != "F_lambda") return false;
      if (j.at("kappa").get<double>() != kappa || j.at("N").get<int>() != N) return false;
      if (j.at("grid").at("n_polar").get<int>() != n_polar ||
          j.at("grid").at("n_azimuth").get<int>() != n_azimuth)
        return false;
      if (j.at("lambda").at(0).get<double>() != lambda.real() ||
          j.at("lambda").at(1).get<double>() != lambda.imag())
        return false;
      out = farfield::read_ffo1(base(i) + ".ffo");
      return true;
    } catch (const std::exception&) {
      return false;
    }
  }

  void store(std::size_t i, cplx lambda, const MatX& m,
             const std::shared_ptr<const farfield::DirectionGrid>& grid) const {
    if (dir.empty()) return;
    farfield::write_ffo1(base(i) + ".ffo", m);
    farfield::FarFieldMatrix wrap{grid, m, farfield::OperatorKind::F_lambda, lambda};
    json j = farfield::sidecar(wrap, nullptr, nullptr);
    j["kappa"] = kappa;
    j["N"] = N;
    write_json(base(i) + ".json", j);
  }
};

const char* plot_script =
    "set datafile separator ','\n"
    "set xlabel 'Re lambda'\n"
    "set ylabel 'indicator'\n"
    "set logscale y\n"
    "plot 'indicator.csv' every ::1 using 1:3 with lines title 'indicator'\n";

int cmd_check_tensor(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto g = cfg.general_tensor();
  const auto report = tensor::check_existence(g);
  json out;
  out["tensor"] = {{"s11", {g.s11.real(), g.s11.imag()}},
                   {"s12", {g.s12.real(), g.s12.imag()}},
                   {"s21", {g.s21.real(), g.s21.imag()}},
                   {"s22", {g.s22.real(), g.s22.imag()}}};
  out["uniqueness_ok"] = report.uniqueness_ok;
  out["existence_ok"] = report.existence_ok;
  if (report.theta_star) out["theta_star"] = *report.theta_star;
  if (report.gamma_star) out["gamma_star"] = *report.gamma_star;
  out["uniqueness_checks"] = report.uniqueness_checks;
  write_json((fs::path(cfg.output_dir) / "tensor.json").string(), out);
  write_manifest(cfg, "check-tensor");
  std::cout << "uniqueness: " << (report.uniqueness_ok ? "ok" : "FAILED")
            << "  existence: " << (report.existence_ok ? "ok" : "FAILED") << "\n";
  return (report.uniqueness_ok && report.existence_ok) ? 0 : 1;
}

int cmd_eigs(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const auto set = eigs::eigenvalues_in_window(cfg.kappa, cfg.sigma, make_window(cfg), 30);
  write_json((fs::path(cfg.output_dir) / "eigs.json").string(), eigs::to_json(set));
  write_manifest(cfg, "eigs");
  std::cout << set.values.size() << " eigenvalue(s) in window\n";
  for (const auto& ev : set.values)
    std::cout << "  n=" << ev.n << "  lambda=" << config::format_float(ev.lambda.real())
              << (ev.lambda.imag() != 0.0
                      ? (" + " + config::format_float(ev.lambda.imag()) + "i")
                      : std::string())
              << "  x" << ev.multiplicity << " (" << ev.family << ")\n";
  return 0;
}

int cmd_trace(const CommonArgs& args) {
  const auto cfg = load_config(args);
  if (!cfg.trace) throw std::runtime_error("trace: config has no 'trace' section");
  const auto& tc = *cfg.trace;
  auto family = [&](double s) {
    tensor::SurfaceTensor sigma = cfg.sigma;
    if (tc.param == "a_re")
      sigma.a = cplx(s, sigma.a.imag());
    else if (tc.param == "a_im")
      sigma.a = cplx(sigma.a.real(), s);
    else if (tc.param == "b_re")
      sigma.b = cplx(s, sigma.b.imag());
    else if (tc.param == "b_im")
      sigma.b = cplx(sigma.b.real(), s);
    else
      throw std::runtime_error("trace: unknown parameter " + tc.param);
    return sigma;
  };
  const auto rows = eigs::eigenvalue_trace(cfg.kappa, family, tc.values, make_window(cfg), 30);
  std::ostringstream os;
  os << "param,lambda_re,lambda_im,n,family,multiplicity\n";
  for (const auto& row : rows)
    for (const auto& ev : row.values)
      os << config::format_float(row.s) << ',' << config::format_float(ev.lambda.real()) << ','
         << config::format_float(ev.lambda.imag()) << ',' << ev.n << ',' << ev.family << ','
         << ev.multiplicity << '\n';
  config::write_text_atomic((fs::path(cfg.output_dir) / "trace.csv").string(), os.str());
  write_manifest(cfg, "trace");
  std::cout << rows.size() << " parameter value(s) swept\n";
  return 0;
}

int cmd_forward(const CommonArgs& args) {
  const auto cfg = load_config(args);
  const mie::PlaneWave w{cfg.incident.d, cfg.incident.p, cfg.kappa};
  const auto e = mie::solve_forward(w, cfg.sigma, cfg.N);
  write_json((fs::path(cfg.output_dir) / "forward.json").string(), mie::to_json(e));
  write_manifest(cfg, "forward");
  std::cout << "forward solve done (N=" << cfg.N << ")\n";
  return 0;
}

int cmd_faroperator(const CommonArgs& args) {
  const auto cfg = load_config(args);
  auto grid = make_grid(cfg);
  const auto F = assemble_data_operator(cfg, grid);
  const std::string base = (fs::path(cfg.output_dir) / "faroperator").string();
  farfield::write_ffo1(base + ".ffo", F.entries);
  const farfield::NoiseSpec noise{cfg.noise.level, cfg.noise.seed};
  json side = farfield::sidecar(F, &cfg.sigma, cfg.noise.level > 0.0 ? &noise : nullptr);
  side["kappa"] = cfg.kappa;
  side["N"] = cfg.N;
  write_json(base + ".json", side);
  write_manifest(cfg, "faroperator");
  std::cout << "operator " << F.entries.rows() << "x" << F.entries.cols() << " written\n";
  return 0;
}

int cmd_scan(const CommonArgs& args) {
  const auto cfg = load_config(args);
  auto grid = make_grid(cfg);
  const auto F = assemble_data_operator(cfg, grid);
  const auto maps = farfield::build_mode_maps(*grid, cfg.kappa, cfg.N);
  const auto lambdas = cfg.lambda_grid.values();
  const auto probes =
      inversion::make_probes(cfg.probes.count, cfg.probes.r_max, cfg.probes.seed);

  AuxCache cache{cfg.cache_dir, cfg.kappa, cfg.N, cfg.grid.n_polar, cfg.grid.n_azimuth};
  inversion::AuxLookup lookup = [&](std::size_t i, MatX& out) {
    if (cache.load(i, lambdas[i], out)) return true;
    if (!cache.dir.empty()) {
      out = farfield::assemble_F_lambda_entries(maps, lambdas[i]);
      cache.store(i, lambdas[i], out, grid);
      return true;
    }
    return false;
  };

  const auto curve = inversion::scan_indicator_with_maps(F.entries, maps, lambdas, probes,
                                                         make_policy(cfg), *grid, args.workers,
                                                         lookup);
  config::write_text_atomic((fs::path(cfg.output_dir) / "indicator.csv").string(),
                            indicator_csv(curve));
  const double factor = 3.0;
  const auto peaks = inversion::detect_peaks(curve, factor);
  write_json((fs::path(cfg.output_dir) / "peaks.json").string(), peaks_to_json(peaks, factor));
  config::write_text_atomic((fs::path(cfg.output_dir) / "plot.gp").string(), plot_script);
  write_manifest(cfg, "scan");
  std::cout << lambdas.size() << " lambda sample(s), " << peaks.size() << " peak(s)\n";
  return 0;
}

int cmd_peaks(const CommonArgs& args, double factor) {
  const auto cfg = load_config(args);
  const auto curve =
      read_indicator_csv((fs::path(cfg.output_dir) / "indicator.csv").string());
  const auto peaks = inversion::detect_peaks(curve, factor);
  write_json((fs::path(cfg.output_dir) / "peaks.json").string(), peaks_to_json(peaks, factor));
  write_manifest(cfg, "peaks");
  std::cout << peaks.size() << " peak(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral screen laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  double prominence_factor = 3.0;

  auto* c_tensor = app.add_subcommand("check-tensor", "Tensor admissibility report");
  auto* c_eigs = app.add_subcommand("eigs", "Eigenvalues in the configured window");
  auto* c_trace = app.add_subcommand("trace", "Eigenvalue sweep over a tensor family");
  auto* c_forward = app.add_subcommand("forward", "Plane-wave forward solve");
  auto* c_farop = app.add_subcommand("faroperator", "Assemble and store the data operator");
  auto* c_scan = app.add_subcommand("scan", "Indicator sweep over the lambda grid");
  auto* c_peaks = app.add_subcommand("peaks", "Peak detection on an existing indicator.csv");
  for (auto* c : {c_tensor, c_eigs, c_trace, c_forward, c_farop, c_scan, c_peaks})
    add_common(c, args);
  c_peaks->add_option("--prominence", prominence_factor, "Prominence factor over the median");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_tensor->parsed()) return cmd_check_tensor(args);
    if (c_eigs->parsed()) return cmd_eigs(args);
    if (c_trace->parsed()) return cmd_trace(args);
    if (c_forward->parsed()) return cmd_forward(args);
    if (c_farop->parsed()) return cmd_faroperator(args);
    if (c_scan->parsed()) return cmd_scan(args);
    if (c_peaks->parsed()) return cmd_peaks(args, prominence_factor);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
