#include "artifacts.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace usim::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_version(const json& j, const std::string& what) {
  std::string v = j.at("format_version").get<std::string>();
  if (v != format_version)
    throw DataError("unsupported " + what + " format: " + v);
}

Schedule parse_schedule(const json& j) {
  Schedule s;
  for (const auto& st : j)
    s.push_back({st.at(0).get<double>(), st.at(1).get<int>()});
  if (s.empty()) throw ConfigError("schedule override is empty");
  return s;
}

std::vector<double> parse_angles(const json& j) {
  if (j.is_object()) {
    auto count = j.at("count").get<std::size_t>();
    auto span = j.at("half_span").get<double>();
    return angle_grid(count, span);
  }
  auto a = j.get<std::vector<double>>();
  if (a.empty()) throw ConfigError("angle override is empty");
  return a;
}

std::string csv_num(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  return out;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  if (!j.contains("preset")) throw ConfigError("config is missing \"preset\"");
  RunConfig cfg = make_preset(j.at("preset").get<std::string>());
  bool explicit_y0 = false;
  for (const auto& [key, val] : j.items()) {
    if (key == "preset") continue;
    if (key == "n0") cfg.model.n0 = val.get<std::size_t>();
    else if (key == "samples") cfg.samples = val.get<std::size_t>();
    else if (key == "init_samples") cfg.init_samples = val.get<std::size_t>();
    else if (key == "tau") cfg.tau = val.get<double>();
    else if (key == "gamma") cfg.gamma = val.get<double>();
    else if (key == "iterations") cfg.iterations = val.get<int>();
    else if (key == "eta_scale") cfg.eta_scale = val.get<double>();
    else if (key == "truncation") cfg.truncation = val.get<int>();
    else if (key == "nx") cfg.nx = val.get<std::size_t>();
    else if (key == "nq") cfg.nq = val.get<std::size_t>();
    else if (key == "y0") { cfg.y0 = val.get<double>(); explicit_y0 = true; }
    else if (key == "weighted_update") cfg.weighted_update = val.get<bool>();
    else if (key == "warm_all_stages") cfg.warm_all_stages = val.get<bool>();
    else if (key == "sign_threshold") cfg.sign_threshold = val.get<double>();
    else if (key == "sign_anchor") cfg.sign_anchor = val.get<std::size_t>();
    else if (key == "seed") cfg.seed = val.get<std::uint64_t>();
    else if (key == "schedule") cfg.schedule = parse_schedule(val);
    else if (key == "angles") cfg.angles = parse_angles(val);
    else throw ConfigError("unknown config key: " + key);
  }
  if (!explicit_y0 || cfg.y0 == 0.0)
    cfg.y0 = default_measurement_height(cfg.model);
  if (cfg.gamma < 0.0) throw ConfigError("gamma must be nonnegative");
  if (cfg.iterations < 0) throw ConfigError("iteration count must be nonnegative");
  if (cfg.truncation < 1) throw ConfigError("truncation must be at least 1");
  return cfg;
}

RunConfig load_config(const std::string& preset, const std::string& config_path) {
  if (config_path.empty()) {
    if (preset.empty()) throw ConfigError("pass --preset or --config");
    return config_from_json(json{{"preset", preset}});
  }
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config file " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!preset.empty()) j["preset"] = preset;
  return config_from_json(j);
}

ordered_json config_echo(const RunConfig& cfg) {
  ordered_json sched = ordered_json::array();
  for (const auto& st : cfg.schedule) sched.push_back({st.kappa, st.kmax});
  ordered_json j;
  j["preset"] = cfg.model.name;
  j["n0"] = cfg.model.n0;
  j["schedule"] = std::move(sched);
  j["angles"] = cfg.angles;
  j["samples"] = cfg.samples;
  j["init_samples"] = cfg.init_samples;
  j["tau"] = cfg.tau;
  j["gamma"] = cfg.gamma;
  j["iterations"] = cfg.iterations;
  j["eta_scale"] = cfg.eta_scale;
  j["truncation"] = cfg.truncation;
  j["nx"] = cfg.nx;
  j["nq"] = cfg.nq;
  j["y0"] = cfg.y0;
  j["weighted_update"] = cfg.weighted_update;
  j["warm_all_stages"] = cfg.warm_all_stages;
  j["sign_threshold"] = cfg.sign_threshold;
  j["sign_anchor"] = cfg.sign_anchor;
  j["seed"] = cfg.seed;
  return j;
}

void write_ensemble(const CoefficientEnsemble& ens, const RunConfig& cfg,
                    const std::string& path) {
  ordered_json j;
  j["format_version"] = format_version;
  j["kmax"] = ens.kmax;
  j["n0"] = ens.n0;
  j["y0"] = ens.y0;
  j["dx"] = ens.dx;
  j["init_count"] = ens.init_count;
  j["warm_start"] = ens.warm_start;
  ordered_json samples = ordered_json::array();
  for (std::size_t m = 0; m < ens.samples.size(); ++m) {
    const McSampleResult& s = ens.samples[m];
    ordered_json e;
    e["m"] = m;
    e["ok"] = s.ok;
    if (s.ok)
      e["coeffs"] = s.coeffs;
    else
      e["error"] = s.error;
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  j["config"] = config_echo(cfg);
  auto out = open_out(path);
  out << j.dump() << '\n';
  if (!out) throw DataError("write failed: " + path);
}

CoefficientEnsemble read_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(std::string("ensemble parse error: ") + e.what());
  }
  check_version(j, "ensemble");
  CoefficientEnsemble ens;
  ens.kmax = j.at("kmax").get<int>();
  ens.n0 = j.at("n0").get<std::size_t>();
  ens.y0 = j.at("y0").get<double>();
  ens.dx = j.at("dx").get<double>();
  ens.init_count = j.at("init_count").get<std::size_t>();
  ens.warm_start = j.at("warm_start").get<std::vector<double>>();
  std::size_t dim = 2 * static_cast<std::size_t>(ens.kmax) + 1;
  for (const auto& e : j.at("samples")) {
    if (e.at("m").get<std::size_t>() != ens.samples.size())
      throw DataError("ensemble sample indices are out of order");
    McSampleResult s;
    s.ok = e.at("ok").get<bool>();
    if (s.ok) {
      s.coeffs = e.at("coeffs").get<std::vector<double>>();
      if (s.coeffs.size() != dim)
        throw DataError("ensemble coefficient length disagrees with kmax");
    } else {
      s.error = e.value("error", std::string("unknown"));
    }
    ens.samples.push_back(std::move(s));
  }
  if (ens.samples.empty()) throw DataError("ensemble has no samples");
  return ens;
}

void write_traces(const std::vector<ContinuationTrace>& traces,
                  const std::string& path) {
  ordered_json j;
  j["format_version"] = format_version;
  ordered_json samples = ordered_json::array();
  for (std::size_t m = 0; m < traces.size(); ++m)
    samples.push_back(
        {{"m", m}, {"stage_history", traces[m].stage_history}});
  j["samples"] = std::move(samples);
  auto out = open_out(path);
  out << j.dump() << '\n';
  if (!out) throw DataError("write failed: " + path);
}

void write_stats(const ReconstructionStats& st, const RunConfig& cfg,
                 const std::string& json_path, const std::string& nodes_csv_path,
                 const std::string& profile_csv_path) {
  ordered_json j;
  j["format_version"] = format_version;
  j["mean_coeffs"] = st.mean_coeffs;
  j["nodes"] = st.xs;
  j["cov_diag"] = st.cov_diag;
  j["h2"] = st.h2;
  j["habs"] = st.habs;
  j["sign"] = st.sign.sign;
  j["clusters"] = {{"plus", st.sign.plus},
                   {"minus", st.sign.minus},
                   {"other", st.sign.other}};
  j["config_echo"] = config_echo(cfg);
  auto out = open_out(json_path);
  out << j.dump() << '\n';
  if (!out) throw DataError("write failed: " + json_path);

  auto nodes = open_out(nodes_csv_path);
  nodes << "# " << format_version << " x,h2,habs,sign\n";
  for (std::size_t i = 0; i < st.xs.size(); ++i)
    nodes << csv_num(st.xs[i]) << ',' << csv_num(st.h2[i]) << ','
          << csv_num(st.habs[i]) << ',' << st.sign.sign[i] << '\n';
  if (!nodes) throw DataError("write failed: " + nodes_csv_path);

  int kmax = static_cast<int>((st.mean_coeffs.size() - 1) / 2);
  FourierSurface cbar{kmax, st.mean_coeffs};
  constexpr std::size_t plot_n = 512;
  auto prof = open_out(profile_csv_path);
  prof << "# " << format_version << " x,fbar\n";
  for (std::size_t k = 0; k < plot_n; ++k) {
    double x = period * static_cast<double>(k) / plot_n;
    prof << csv_num(x) << ',' << csv_num(cbar.eval(x)) << '\n';
  }
  if (!prof) throw DataError("write failed: " + profile_csv_path);
}

void write_record_csv(const DatasetRecord& rec, const std::string& path) {
  auto out = open_out(path);
  out << "# " << format_version << " x,re,im\n";
  for (std::size_t k = 0; k < rec.nx; ++k) {
    double x = period * static_cast<double>(k) / static_cast<double>(rec.nx);
    out << csv_num(x) << ',' << csv_num(rec.values[k].real()) << ','
        << csv_num(rec.values[k].imag()) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

void write_realization_csv(const Realization& real, const std::string& path) {
  auto out = open_out(path);
  out << "# " << format_version << " x,f\n";
  std::size_t n = real.nodes.size();
  for (std::size_t i = 0; i <= n; ++i) {
    double x = real.dx * static_cast<double>(i);
    out << csv_num(x) << ',' << csv_num(real.nodes[i % n]) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace usim::cli
