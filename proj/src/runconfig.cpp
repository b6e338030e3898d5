#include "screenlab/runconfig.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace screenlab::config {

std::vector<cplx> LambdaGrid::values() const {
  std::vector<cplx> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double t = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
    out.emplace_back(min + t * (max - min), im);
  }
  return out;
}

namespace {

cplx read_cplx_pair(const nlohmann::json& j, const char* re_key, const char* im_key) {
  return {j.value(re_key, 0.0), j.value(im_key, 0.0)};
}

Vec3 read_vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("config: expected a 3-vector");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

RunConfig parse(const nlohmann::json& doc) {
  reject_unknown(doc,
                 {"kappa", "sigma", "sigma_general", "N", "grid", "lambda_grid", "noise",
                  "probes", "tikhonov", "window", "incident", "trace", "cache_dir", "output_dir"},
                 "top level");
  RunConfig cfg;
  cfg.echo = doc;

  cfg.kappa = doc.value("kappa", cfg.kappa);
  if (!(cfg.kappa > 0.0)) throw std::invalid_argument("config: kappa must be positive");

  if (doc.contains("sigma")) {
    const auto& s = doc.at("sigma");
    reject_unknown(s, {"a_re", "a_im", "b_re", "b_im"}, "sigma");
    cfg.sigma.a = read_cplx_pair(s, "a_re", "a_im");
    cfg.sigma.b = read_cplx_pair(s, "b_re", "b_im");
  }
  if (doc.contains("sigma_general")) {
    const auto& s = doc.at("sigma_general");
    reject_unknown(s,
                   {"s11_re", "s11_im", "s12_re", "s12_im", "s21_re", "s21_im", "s22_re",
                    "s22_im"},
                   "sigma_general");
    tensor::GeneralTensor2 g;
    g.s11 = read_cplx_pair(s, "s11_re", "s11_im");
    g.s12 = read_cplx_pair(s, "s12_re", "s12_im");
    g.s21 = read_cplx_pair(s, "s21_re", "s21_im");
    g.s22 = read_cplx_pair(s, "s22_re", "s22_im");
    cfg.sigma_general = g;
  }

  cfg.N = doc.value("N", static_cast<int>(std::ceil(cfg.kappa)) + 15);
  if (cfg.N < 1 || cfg.N > 60) throw std::invalid_argument("config: N out of range [1, 60]");

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    reject_unknown(g, {"n_polar", "n_azimuth", "receiver_hemisphere", "transmitter_hemisphere"},
                   "grid");
    cfg.grid.n_polar = g.value("n_polar", cfg.grid.n_polar);
    cfg.grid.n_azimuth = g.value("n_azimuth", cfg.grid.n_azimuth);
    if (cfg.grid.n_polar < 1 || cfg.grid.n_azimuth < 2)
      throw std::invalid_argument("config: grid too small");
    if (g.contains("receiver_hemisphere"))
      cfg.grid.receiver_hemisphere = read_vec3(g.at("receiver_hemisphere"));
    if (g.contains("transmitter_hemisphere"))
      cfg.grid.transmitter_hemisphere = read_vec3(g.at("transmitter_hemisphere"));
  }

  if (doc.contains("lambda_grid")) {
    const auto& l = doc.at("lambda_grid");
    reject_unknown(l, {"min", "max", "count", "im"}, "lambda_grid");
    cfg.lambda_grid.min = l.value("min", cfg.lambda_grid.min);
    cfg.lambda_grid.max = l.value("max", cfg.lambda_grid.max);
    cfg.lambda_grid.count = l.value("count", cfg.lambda_grid.count);
    cfg.lambda_grid.im = l.value("im", cfg.lambda_grid.im);
    if (cfg.lambda_grid.count < 1) throw std::invalid_argument("config: lambda count < 1");
    if (!(cfg.lambda_grid.max >= cfg.lambda_grid.min))
      throw std::invalid_argument("config: lambda range inverted");
  }

  if (doc.contains("noise")) {
    const auto& n = doc.at("noise");
    reject_unknown(n, {"level", "seed"}, "noise");
    cfg.noise.level = n.value("level", cfg.noise.level);
    cfg.noise.seed = n.value("seed", cfg.noise.seed);
    if (cfg.noise.level < 0.0 || cfg.noise.level >= 1.0)
      throw std::invalid_argument("config: noise level must be in [0, 1)");
  }

  if (doc.contains("probes")) {
    const auto& p = doc.at("probes");
    reject_unknown(p, {"count", "r_max", "seed"}, "probes");
    cfg.probes.count = p.value("count", cfg.probes.count);
    cfg.probes.r_max = p.value("r_max", cfg.probes.r_max);
    cfg.probes.seed = p.value("seed", cfg.probes.seed);
    if (cfg.probes.count < 1) throw std::invalid_argument("config: probe count < 1");
    if (!(cfg.probes.r_max > 0.0 && cfg.probes.r_max < 1.0))
      throw std::invalid_argument("config: probe r_max must be in (0, 1)");
  }

  if (doc.contains("tikhonov")) {
    const auto& t = doc.at("tikhonov");
    reject_unknown(t, {"policy", "rho", "tau"}, "tikhonov");
    cfg.tikhonov.policy = t.value("policy", cfg.tikhonov.policy);
    cfg.tikhonov.rho = t.value("rho", cfg.tikhonov.rho);
    cfg.tikhonov.tau = t.value("tau", cfg.tikhonov.tau);
    if (cfg.tikhonov.policy != "fixed" && cfg.tikhonov.policy != "morozov")
      throw std::invalid_argument("config: tikhonov policy must be 'fixed' or 'morozov'");
    if (!(cfg.tikhonov.rho > 0.0)) throw std::invalid_argument("config: tikhonov rho <= 0");
  }

  if (doc.contains("window")) {
    const auto& w = doc.at("window");
    reject_unknown(w, {"re_min", "re_max", "im_min", "im_max"}, "window");
    cfg.window.re_min = w.value("re_min", cfg.lambda_grid.min);
    cfg.window.re_max = w.value("re_max", cfg.lambda_grid.max);
    cfg.window.im_min = w.value("im_min", cfg.window.im_min);
    cfg.window.im_max = w.value("im_max", cfg.window.im_max);
  } else {
    cfg.window.re_min = cfg.lambda_grid.min;
    cfg.window.re_max = cfg.lambda_grid.max;
  }

  if (doc.contains("incident")) {
    const auto& i = doc.at("incident");
    reject_unknown(i, {"d", "p_re", "p_im"}, "incident");
    if (i.contains("d")) cfg.incident.d = read_vec3(i.at("d")).normalized();
    Vec3 pre = Vec3::UnitX(), pim = Vec3::Zero();
    if (i.contains("p_re")) pre = read_vec3(i.at("p_re"));
    if (i.contains("p_im")) pim = read_vec3(i.at("p_im"));
    cfg.incident.p = pre.cast<cplx>() + cplx(0, 1) * pim.cast<cplx>();
  }

  if (doc.contains("trace")) {
    const auto& t = doc.at("trace");
    reject_unknown(t, {"param", "values"}, "trace");
    TraceConfig tc;
    tc.param = t.value("param", tc.param);
    if (tc.param != "a_re" && tc.param != "a_im" && tc.param != "b_re" && tc.param != "b_im")
      throw std::invalid_argument("config: trace param must name a sigma scalar");
    for (const auto& v : t.at("values")) tc.values.push_back(v.get<double>());
    if (tc.values.empty()) throw std::invalid_argument("config: trace values empty");
    cfg.trace = tc;
  }

  cfg.cache_dir = doc.value("cache_dir", cfg.cache_dir);
  cfg.output_dir = doc.value("output_dir", cfg.output_dir);
  return cfg;
}

RunConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  return parse(doc);
}

nlohmann::json manifest(const RunConfig& cfg) {
  nlohmann::json m;
  m["config"] = cfg.echo;
  m["effective"] = {{"kappa", cfg.kappa},
                    {"N", cfg.N},
                    {"noise_seed", cfg.noise.seed},
                    {"probe_seed", cfg.probes.seed}};
  m["version"] = version;
  const auto now = std::chrono::system_clock::now();
  m["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  return m;
}

void write_text_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_text_atomic: cannot open " + tmp);
    out << contents;
    if (!out) throw std::runtime_error("write_text_atomic: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("write_text_atomic: rename failed for " + path);
}

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace screenlab::config
