#include "usim/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "usim/panel_bem.hpp"
#include "usim/parallel.hpp"

namespace usim {

namespace {

using nlohmann::json;

constexpr std::uint64_t realization_tag = 0x5eed0001;
constexpr std::uint64_t noise_tag = 0x5eed0002;
constexpr double match_tol = 1e-12;

json header_json(const DatasetHeader& h) {
  json sched = json::array();
  for (const auto& st : h.schedule) sched.push_back({st.kappa, st.kmax});
  return json{{"format_version", h.version}, {"model", h.model},
              {"n0", h.n0},                  {"schedule", sched},
              {"angles", h.angles},          {"samples", h.samples},
              {"tau", h.tau},                {"y0", h.y0},
              {"nx", h.nx},                  {"seed", h.seed}};
}

DatasetHeader parse_header(const json& j) {
  DatasetHeader h;
  h.version = j.at("format_version").get<std::string>();
  if (h.version != format_version)
    throw DataError("unsupported dataset format: " + h.version);
  h.model = j.at("model").get<std::string>();
  h.n0 = j.at("n0").get<std::size_t>();
  for (const auto& st : j.at("schedule"))
    h.schedule.push_back({st.at(0).get<double>(), st.at(1).get<int>()});
  h.angles = j.at("angles").get<std::vector<double>>();
  h.samples = j.at("samples").get<std::size_t>();
  h.tau = j.at("tau").get<double>();
  h.y0 = j.at("y0").get<double>();
  h.nx = j.at("nx").get<std::size_t>();
  h.seed = j.at("seed").get<std::uint64_t>();
  if (h.schedule.empty() || h.angles.empty() || h.samples == 0 || h.nx == 0)
    throw DataError("dataset header is empty or inconsistent");
  return h;
}

json record_json(const DatasetRecord& r) {
  json vals = json::array();
  for (const cplx& v : r.values) vals.push_back({v.real(), v.imag()});
  return json{{"m", r.m},   {"kappa", r.kappa}, {"theta", r.theta},
              {"y0", r.y0}, {"nx", r.nx},       {"values", std::move(vals)}};
}

DatasetRecord parse_record(const json& j) {
  DatasetRecord r;
  r.m = j.at("m").get<std::size_t>();
  r.kappa = j.at("kappa").get<double>();
  r.theta = j.at("theta").get<double>();
  r.y0 = j.at("y0").get<double>();
  r.nx = j.at("nx").get<std::size_t>();
  const json& vals = j.at("values");
  r.values.reserve(vals.size());
  for (const auto& v : vals)
    r.values.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  if (r.values.size() != r.nx)
    throw DataError("record value count disagrees with nx");
  return r;
}

}  // namespace

const DatasetRecord& Dataset::at(std::size_t m, std::size_t stage,
                                 std::size_t angle) const {
  std::size_t s = stage_count(), l = angle_count();
  if (m >= header.samples || stage >= s || angle >= l)
    throw DataError("record index out of range");
  std::size_t idx = (m * s + stage) * l + angle;
  if (idx >= records.size()) throw DataError("dataset is incomplete");
  const DatasetRecord& r = records[idx];
  if (r.m != m || std::abs(r.kappa - header.schedule[stage].kappa) > match_tol ||
      std::abs(r.theta - header.angles[angle]) > match_tol)
    throw DataError("dataset records are out of canonical order");
  return r;
}

void add_noise(std::vector<cplx>& values, double tau, SplitMix64& gen) {
  if (tau < 0.0) throw ConfigError("noise level must be nonnegative");
  for (cplx& v : values) {
    double eps = 2.0 * gen.next_double() - 1.0;
    v *= 1.0 + tau * eps;
  }
}

std::uint64_t realization_seed(std::uint64_t master, std::size_t m) {
  return substream(mix_seed(master, realization_tag), m);
}

std::uint64_t noise_seed(std::uint64_t master, std::size_t m, std::size_t stage,
                         std::size_t angle) {
  return substream(mix_seed(master, noise_tag), m, stage * 4096 + angle);
}

Dataset generate_dataset(const RunConfig& cfg, std::size_t workers) {
  if (cfg.schedule.empty()) throw ConfigError("schedule is empty");
  if (cfg.angles.empty()) throw ConfigError("angle list is empty");
  if (cfg.samples == 0) throw ConfigError("sample count is zero");
  if (cfg.nx < 16) throw ConfigError("measurement grid is too coarse");
  if (cfg.tau < 0.0) throw ConfigError("noise level must be nonnegative");
  if (cfg.model.n0 < 2) throw ConfigError("surface node count is too small");

  double y0 = cfg.y0 != 0.0 ? cfg.y0 : default_measurement_height(cfg.model);
  if (y0 <= 0.0) throw ConfigError("measurement height must be positive");

  Dataset ds;
  ds.header.model = cfg.model.name;
  ds.header.n0 = cfg.model.n0;
  ds.header.schedule = cfg.schedule;
  ds.header.angles = cfg.angles;
  ds.header.samples = cfg.samples;
  ds.header.tau = cfg.tau;
  ds.header.y0 = y0;
  ds.header.nx = cfg.nx;
  ds.header.seed = cfg.seed;

  std::size_t s = cfg.schedule.size(), l = cfg.angles.size();
  ds.records.resize(cfg.samples * s * l);

  parallel_for(cfg.samples, workers, [&](std::size_t m) {
    Realization real = sample_realization_below(
        cfg.model, realization_seed(cfg.seed, m), y0 - surface_clearance);
    PanelMesh mesh = build_panels(real.nodes);
    for (std::size_t j = 0; j < s; ++j) {
      for (std::size_t a = 0; a < l; ++a) {
        PlaneWave wave(cfg.schedule[j].kappa, cfg.angles[a]);
        BemSolution sol = bem_solve(mesh, wave);
        FieldSamples field = bem_field_at(sol, y0, cfg.nx);
        SplitMix64 gen(noise_seed(cfg.seed, m, j, a));
        add_noise(field.values, cfg.tau, gen);
        DatasetRecord& rec = ds.records[(m * s + j) * l + a];
        rec.m = m;
        rec.kappa = cfg.schedule[j].kappa;
        rec.theta = cfg.angles[a];
        rec.y0 = y0;
        rec.nx = cfg.nx;
        rec.values = std::move(field.values);
      }
    }
  });
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << header_json(ds.header).dump() << '\n';
  for (const auto& r : ds.records) out << record_json(r).dump() << '\n';
  if (!out) throw DataError("write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset file is empty: " + path);
  Dataset ds;
  try {
    ds.header = parse_header(json::parse(line));
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ds.records.push_back(parse_record(json::parse(line)));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("dataset parse error: ") + e.what());
  }
  std::size_t expect =
      ds.header.samples * ds.header.schedule.size() * ds.header.angles.size();
  if (ds.records.size() != expect) {
    std::ostringstream msg;
    msg << "dataset is incomplete: " << ds.records.size() << " records, expected "
        << expect;
    throw DataError(msg.str());
  }
  for (std::size_t m = 0; m < ds.header.samples; ++m)
    for (std::size_t j = 0; j < ds.header.schedule.size(); ++j)
      for (std::size_t a = 0; a < ds.header.angles.size(); ++a) ds.at(m, j, a);
  return ds;
}

std::vector<StageRecords> sample_stages(const Dataset& ds, std::size_t m) {
  std::vector<StageRecords> stages(ds.stage_count());
  for (std::size_t j = 0; j < ds.stage_count(); ++j) {
    stages[j].kappa = ds.header.schedule[j].kappa;
    for (std::size_t a = 0; a < ds.angle_count(); ++a) {
      const DatasetRecord& rec = ds.at(m, j, a);
      if (std::abs(rec.y0 - ds.header.y0) > match_tol || rec.nx != ds.header.nx)
        throw DataError("record geometry disagrees with the dataset header");
      FieldSamples f;
      f.wave = PlaneWave(rec.kappa, rec.theta);
      f.y0 = rec.y0;
      f.xs = uniform_grid(rec.nx);
      f.values = rec.values;
      f.sample_index = m;
      stages[j].fields.push_back(std::move(f));
    }
  }
  return stages;
}

}  // namespace usim
