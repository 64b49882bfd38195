#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "artifacts.hpp"
#include "usim/line_mfs.hpp"
#include "usim/manifest.hpp"
#include "usim/panel_bem.hpp"
#include "usim/rng.hpp"
#include "usim/surface.hpp"

namespace fs = std::filesystem;
using namespace usim;

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

struct CommonOpts {
  std::string preset;
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool trace = false;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_trace) {
  cmd->add_option("--preset", o.preset, "preset name: " + [] {
    std::string s;
    for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }());
  cmd->add_option("--config", o.config, "JSON config file (see README)")
      ->check(CLI::ExistingFile);
  o.seed_opt = cmd->add_option("--seed", o.seed, "override the RNG seed");
  cmd->add_option("--workers", o.workers, "worker thread count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  if (with_trace)
    cmd->add_flag("--trace", o.trace, "write per-sample objective traces");
}

RunConfig resolve_config(const CommonOpts& o) {
  RunConfig cfg = cli::load_config(o.preset, o.config);
  if (o.seed_opt && o.seed_opt->count() > 0) cfg.seed = o.seed;
  return cfg;
}

std::string out_path(const std::string& dir, const char* name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

std::string phase_generate(const RunConfig& cfg, const CommonOpts& o,
                           Manifest& man) {
  auto t0 = clock_type::now();
  Dataset ds = generate_dataset(cfg, o.workers);
  std::string path = out_path(o.out, "dataset.jsonl");
  write_dataset(ds, path);
  man.timings_ms.emplace_back("generate", ms_since(t0));
  add_artifact(man, path);
  std::cout << "generate: " << ds.records.size() << " records -> " << path
            << "\n";
  return path;
}

std::string phase_invert(const RunConfig& cfg, const CommonOpts& o,
                         const std::string& data_path, Manifest& man) {
  auto t0 = clock_type::now();
  Dataset ds = read_dataset(data_path);
  std::vector<ContinuationTrace> traces;
  CoefficientEnsemble ens = mcch_invert(ds, cfg, o.workers, cfg.warm_all_stages,
                                        o.trace ? &traces : nullptr);
  for (std::size_t m = 0; m < ens.samples.size(); ++m)
    if (!ens.samples[m].ok)
      man.errors.push_back("sample " + std::to_string(m) + ": " +
                           ens.samples[m].error);
  std::string path = out_path(o.out, "ensemble.json");
  cli::write_ensemble(ens, cfg, path);
  man.timings_ms.emplace_back("invert", ms_since(t0));
  add_artifact(man, path);
  if (o.trace) {
    std::string tpath = out_path(o.out, "trace.json");
    cli::write_traces(traces, tpath);
    add_artifact(man, tpath);
  }
  std::cout << "invert: " << ens.converged() << "/" << ens.samples.size()
            << " samples converged -> " << path << "\n";
  return path;
}

void phase_stats(const RunConfig& cfg, const CommonOpts& o,
                 const std::string& ens_path, Manifest& man) {
  auto t0 = clock_type::now();
  CoefficientEnsemble ens = cli::read_ensemble(ens_path);
  if (ens.n0 != cfg.model.n0)
    throw ConfigError("ensemble node count " + std::to_string(ens.n0) +
                      " disagrees with configured n0 " +
                      std::to_string(cfg.model.n0));
  ReconstructionStats st =
      compute_stats(ens, cfg.sign_threshold, cfg.sign_anchor);
  std::string jpath = out_path(o.out, "stats.json");
  std::string npath = out_path(o.out, "stats_nodes.csv");
  std::string ppath = out_path(o.out, "profile.csv");
  cli::write_stats(st, cfg, jpath, npath, ppath);
  man.timings_ms.emplace_back("stats", ms_since(t0));
  add_artifact(man, jpath);
  add_artifact(man, npath);
  add_artifact(man, ppath);
  std::cout << "stats: " << st.xs.size() << " nodes -> " << jpath << "\n";
}

void finish_manifest(Manifest& man, const CommonOpts& o, const RunConfig& cfg) {
  man.config_json = cli::config_echo(cfg).dump();
  std::string path = out_path(o.out, "manifest.json");
  write_manifest(man, path);
  std::cout << "manifest -> " << path << "\n";
}

struct OracleRow {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
};

OracleRow oracle_flat() {
  auto flat = [](double) { return 0.0; };
  double worst = 0.0;
  for (double th : {0.0, 0.5}) {
    PlaneWave w(2.0, th);
    LayerDensity den = solve_layer_density(flat, w, default_source_line(flat));
    ModeSet modes = rayleigh_modes(w, 6);
    std::vector<cplx> amps = line_amplitudes(den, modes);
    for (std::size_t i = 0; i < modes.ns.size(); ++i) {
      cplx target = modes.ns[i] == 0 ? cplx(-1.0, 0.0) : cplx(0.0, 0.0);
      worst = std::max(worst, std::abs(amps[i] - target));
    }
  }
  return {"flat-grating", worst < 1e-8, worst, 1e-8};
}

OracleRow oracle_energy() {
  RunConfig ex2 = make_preset("ex2");
  PlaneWave w(2.0, 0.3);
  PanelMesh mesh = build_panels_fn(ex2.model.g, 128, 3);
  BemSolution sol = bem_solve(mesh, w);
  ModeSet modes = rayleigh_modes(w, 8);
  std::vector<cplx> amps = bem_amplitudes(sol, modes);
  double dev = std::abs(energy_balance(modes, amps) - 1.0);
  return {"energy-balance", dev < 2e-3, dev, 2e-3};
}

OracleRow oracle_gradient() {
  RunConfig ex2 = make_preset("ex2");
  PlaneWave w(2.0, 0.2);
  ModeSet modes = rayleigh_modes(w, 8);
  std::vector<cplx> amps = rayleigh_lsq_amplitudes(ex2.model.g, w, modes);
  FieldSamples field = field_from_amplitudes(amps, modes, 2.6, 256);
  SpectralData sd = make_spectral_data(field, 8, 1e-2);
  std::vector<AngleContext> ctxs{make_angle_context(sd, 256)};

  FourierSurface c = fourier_project(ex2.model.g, 2);
  c.coeffs[1] += 0.05;
  c.coeffs[2] -= 0.03;
  std::vector<double> ga = objective_gradient(c, ctxs);
  double num = 0.0, den = 0.0;
  const double hstep = 1e-6;
  for (std::size_t p = 0; p < c.coeffs.size(); ++p) {
    FourierSurface cp = c, cm = c;
    cp.coeffs[p] += hstep;
    cm.coeffs[p] -= hstep;
    double fd =
        (objective_total(cp, ctxs) - objective_total(cm, ctxs)) / (2.0 * hstep);
    num += (ga[p] - fd) * (ga[p] - fd);
    den += fd * fd;
  }
  double rel = std::sqrt(num) / std::sqrt(den);
  return {"gradient-check", rel < 1e-6, rel, 1e-6};
}

void oracle_sampling(std::uint64_t seed, OracleRow& mean_row, OracleRow& var_row) {
  RunConfig ex1 = make_preset("ex1");
  const SurfaceModel& model = ex1.model;
  const std::size_t msamples = 4000;
  std::size_t n = model.n0;
  double dx = period / static_cast<double>(n);

  std::vector<double> mean(n, 0.0), sq(n, 0.0);
  std::uint64_t base = mix_seed(seed, 0xd15a);
  for (std::size_t m = 0; m < msamples; ++m) {
    Realization r = sample_realization(model, substream(base, m));
    for (std::size_t i = 0; i < n; ++i) {
      mean[i] += r.nodes[i];
      sq[i] += r.nodes[i] * r.nodes[i];
    }
  }
  std::size_t ok = 0;
  double var_rel = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = dx * static_cast<double>(i);
    mean[i] /= static_cast<double>(msamples);
    double var = sq[i] / static_cast<double>(msamples) - mean[i] * mean[i];
    double g = model.g(x), h = model.h(x);
    double bound = 3.0 * std::abs(h) * std::sqrt(dx / static_cast<double>(msamples));
    if (std::abs(mean[i] - g) <= bound) ++ok;
    if (std::abs(h) > 0.3)
      var_rel = std::max(var_rel, std::abs(var / dx - h * h) / (h * h));
  }
  double frac = static_cast<double>(ok) / static_cast<double>(n);
  mean_row = {"direct-sampling-mean", frac >= 0.99, frac, 0.99};
  var_row = {"direct-sampling-variance", var_rel < 0.12, var_rel, 0.12};
}

int cmd_oracle(const RunConfig& cfg) {
  std::vector<OracleRow> rows;
  rows.push_back(oracle_flat());
  rows.push_back(oracle_energy());
  rows.push_back(oracle_gradient());
  OracleRow mrow, vrow;
  oracle_sampling(cfg.seed, mrow, vrow);
  rows.push_back(mrow);
  rows.push_back(vrow);
  bool all = true;
  for (const auto& r : rows) {
    std::cout << "oracle " << r.name << ": " << (r.pass ? "PASS" : "FAIL")
              << " (measured " << r.measured << ", bound " << r.bound << ")\n";
    all = all && r.pass;
  }
  return all ? 0 : 4;
}

int cmd_export(const CommonOpts& o, const std::string& data_path,
               const std::vector<std::size_t>& record_idx, long long real_idx) {
  Dataset ds = read_dataset(data_path);
  if (!record_idx.empty()) {
    if (record_idx.size() != 3)
      throw ConfigError("--record takes three indices: sample stage angle");
    const DatasetRecord& rec = ds.at(record_idx[0], record_idx[1], record_idx[2]);
    std::string name = "record_" + std::to_string(record_idx[0]) + "_" +
                       std::to_string(record_idx[1]) + "_" +
                       std::to_string(record_idx[2]) + ".csv";
    std::string path = out_path(o.out, name.c_str());
    cli::write_record_csv(rec, path);
    std::cout << "export -> " << path << "\n";
    return 0;
  }
  if (real_idx >= 0) {
    if (!is_preset(ds.header.model))
      throw ConfigError("realization export needs a preset model, got " +
                        ds.header.model);
    auto m = static_cast<std::size_t>(real_idx);
    if (m >= ds.header.samples)
      throw ConfigError("sample index out of range");
    RunConfig cfg = make_preset(ds.header.model);
    cfg.model.n0 = ds.header.n0;
    Realization r =
        sample_realization_below(cfg.model, realization_seed(ds.header.seed, m),
                                 ds.header.y0 - surface_clearance);
    std::string name = "realization_" + std::to_string(m) + ".csv";
    std::string path = out_path(o.out, name.c_str());
    cli::write_realization_csv(r, path);
    std::cout << "export -> " << path << "\n";
    return 0;
  }
  throw ConfigError("pass --record m j l or --realization m");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random periodic grating scattering: dataset synthesis and "
               "statistical profile reconstruction"};
  app.require_subcommand(1);

  CommonOpts gen_o, inv_o, sta_o, pipe_o, ora_o, exp_o;
  std::string inv_data, sta_ens, exp_data;
  std::vector<std::size_t> exp_record;
  long long exp_real = -1;

  CLI::App* gen = app.add_subcommand("generate", "synthesize a scattering dataset");
  add_common(gen, gen_o, false);

  CLI::App* inv = app.add_subcommand("invert", "reconstruct profiles per sample");
  add_common(inv, inv_o, true);
  inv->add_option("--data", inv_data, "dataset path (default <out>/dataset.jsonl)");

  CLI::App* sta = app.add_subcommand("stats", "ensemble statistics and sign pattern");
  add_common(sta, sta_o, false);
  sta->add_option("--ensemble", sta_ens, "ensemble path (default <out>/ensemble.json)");

  CLI::App* pipe = app.add_subcommand("pipeline", "generate, invert, stats in one run");
  add_common(pipe, pipe_o, true);

  CLI::App* ora = app.add_subcommand("oracle", "self-check battery");
  add_common(ora, ora_o, false);

  CLI::App* exp = app.add_subcommand("export", "CSV export of records and realizations");
  add_common(exp, exp_o, false);
  exp->add_option("--data", exp_data, "dataset path")->required();
  exp->add_option("--record", exp_record, "record indices: sample stage angle")
      ->expected(3);
  exp->add_option("--realization", exp_real, "realization sample index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      RunConfig cfg = resolve_config(gen_o);
      Manifest man;
      man.command = "generate";
      phase_generate(cfg, gen_o, man);
      finish_manifest(man, gen_o, cfg);
      return 0;
    }
    if (inv->parsed()) {
      RunConfig cfg = resolve_config(inv_o);
      std::string data =
          inv_data.empty() ? (fs::path(inv_o.out) / "dataset.jsonl").string()
                           : inv_data;
      Manifest man;
      man.command = "invert";
      phase_invert(cfg, inv_o, data, man);
      finish_manifest(man, inv_o, cfg);
      return 0;
    }
    if (sta->parsed()) {
      RunConfig cfg = resolve_config(sta_o);
      std::string ens =
          sta_ens.empty() ? (fs::path(sta_o.out) / "ensemble.json").string()
                          : sta_ens;
      Manifest man;
      man.command = "stats";
      phase_stats(cfg, sta_o, ens, man);
      finish_manifest(man, sta_o, cfg);
      return 0;
    }
    if (pipe->parsed()) {
      RunConfig cfg = resolve_config(pipe_o);
      Manifest man;
      man.command = "pipeline";
      std::string data = phase_generate(cfg, pipe_o, man);
      std::string ens = phase_invert(cfg, pipe_o, data, man);
      phase_stats(cfg, pipe_o, ens, man);
      finish_manifest(man, pipe_o, cfg);
      return 0;
    }
    if (ora->parsed()) {
      RunConfig cfg = resolve_config(ora_o);
      return cmd_oracle(cfg);
    }
    if (exp->parsed()) {
      return cmd_export(exp_o, exp_data, exp_record, exp_real);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
