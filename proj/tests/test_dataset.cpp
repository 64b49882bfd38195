#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "usim/common.hpp"
#include "usim/dataset.hpp"
#include "usim/presets.hpp"
#include "usim/rng.hpp"

using namespace usim;

namespace {

RunConfig small_config() {
  RunConfig cfg = make_preset("ex1");
  cfg.samples = 2;
  cfg.schedule = {{2.0, 2}};
  cfg.angles = {-0.3, 0.4};
  cfg.nx = 32;
  cfg.seed = 9;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  for (const auto& l : lines) out << l << '\n';
}

}  // namespace

TEST_CASE("seed layout gives every cell its own reproducible substream") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {1ull, 2ull, 77ull})
    for (std::size_t m = 0; m < 8; ++m) seen.insert(realization_seed(master, m));
  CHECK(seen.size() == 24);

  seen.clear();
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t a = 0; a < 5; ++a) seen.insert(noise_seed(5, m, j, a));
  CHECK(seen.size() == 60);

  CHECK(realization_seed(5, 2) == realization_seed(5, 2));
  CHECK(noise_seed(5, 1, 2, 3) == noise_seed(5, 1, 2, 3));
  CHECK(realization_seed(5, 0) != noise_seed(5, 0, 0, 0));
}

TEST_CASE("noise multiplies each point by an independent bounded factor") {
  std::vector<cplx> v(20000, cplx(1.0, 0.0));
  SplitMix64 gen(123);
  add_noise(v, 0.1, gen);
  double mean = 0.0, var = 0.0;
  for (const cplx& z : v) {
    CHECK(z.imag() == 0.0);
    CHECK(z.real() >= 0.9);
    CHECK(z.real() <= 1.1);
    mean += z.real();
  }
  mean /= double(v.size());
  for (const cplx& z : v) var += (z.real() - mean) * (z.real() - mean);
  var /= double(v.size());
  CHECK(std::abs(mean - 1.0) < 2e-3);
  // eps is uniform on [-1, 1]: Var(1 + tau eps) = tau^2 / 3.
  CHECK(var == doctest::Approx(0.01 / 3.0).epsilon(0.05));

  std::vector<cplx> w(8, cplx(0.5, -2.0));
  std::vector<cplx> w0 = w;
  SplitMix64 g2(7);
  add_noise(w, 0.0, g2);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w[i] == w0[i]);

  SplitMix64 g3(7);
  CHECK_THROWS_AS(add_noise(w, -0.1, g3), ConfigError);

  // Same seed, same noise.
  std::vector<cplx> a(16, cplx(1.0, 1.0)), b(16, cplx(1.0, 1.0));
  SplitMix64 ga(99), gb(99);
  add_noise(a, 0.05, ga);
  add_noise(b, 0.05, gb);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("generate_dataset rejects invalid configurations") {
  RunConfig cfg = small_config();

  RunConfig c1 = cfg;
  c1.schedule.clear();
  CHECK_THROWS_AS(generate_dataset(c1), ConfigError);

  RunConfig c2 = cfg;
  c2.angles.clear();
  CHECK_THROWS_AS(generate_dataset(c2), ConfigError);

  RunConfig c3 = cfg;
  c3.samples = 0;
  CHECK_THROWS_AS(generate_dataset(c3), ConfigError);

  RunConfig c4 = cfg;
  c4.nx = 8;
  CHECK_THROWS_AS(generate_dataset(c4), ConfigError);

  RunConfig c5 = cfg;
  c5.tau = -1e-3;
  CHECK_THROWS_AS(generate_dataset(c5), ConfigError);

  RunConfig c6 = cfg;
  c6.model.n0 = 1;
  CHECK_THROWS_AS(generate_dataset(c6), ConfigError);

  RunConfig c7 = cfg;
  c7.y0 = -2.0;
  CHECK_THROWS_AS(generate_dataset(c7), ConfigError);
}

TEST_CASE("generated records sit in canonical order with header geometry") {
  RunConfig cfg = small_config();
  Dataset ds = generate_dataset(cfg);

  CHECK(ds.header.version == std::string(format_version));
  CHECK(ds.header.model == cfg.model.name);
  CHECK(ds.header.n0 == cfg.model.n0);
  CHECK(ds.header.samples == 2);
  CHECK(ds.header.nx == 32);
  CHECK(ds.header.y0 == doctest::Approx(default_measurement_height(cfg.model)));
  REQUIRE(ds.records.size() == 2 * 1 * 2);

  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t a = 0; a < 2; ++a) {
      const DatasetRecord& r = ds.at(m, 0, a);
      CHECK(r.m == m);
      CHECK(r.kappa == 2.0);
      CHECK(r.theta == cfg.angles[a]);
      CHECK(r.y0 == ds.header.y0);
      CHECK(r.nx == 32);
      REQUIRE(r.values.size() == 32);
    }

  CHECK_THROWS_AS(ds.at(2, 0, 0), DataError);
  CHECK_THROWS_AS(ds.at(0, 1, 0), DataError);
  CHECK_THROWS_AS(ds.at(0, 0, 2), DataError);

  // Bitwise reproducible, independent of the worker count.
  Dataset again = generate_dataset(cfg, 3);
  REQUIRE(again.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    for (std::size_t q = 0; q < 32; ++q)
      CHECK(again.records[i].values[q] == ds.records[i].values[q]);

  // A different master seed changes the data.
  RunConfig other = cfg;
  other.seed = 10;
  Dataset diff = generate_dataset(other);
  bool same = true;
  for (std::size_t q = 0; q < 32; ++q)
    same = same && diff.records[0].values[q] == ds.records[0].values[q];
  CHECK(!same);
}

TEST_CASE("dataset files round-trip byte for byte") {
  RunConfig cfg = small_config();
  Dataset ds = generate_dataset(cfg);
  const std::string pa = "/tmp/usim_ds_a.jsonl", pb = "/tmp/usim_ds_b.jsonl";
  write_dataset(ds, pa);

  Dataset back = read_dataset(pa);
  CHECK(back.header.version == ds.header.version);
  CHECK(back.header.model == ds.header.model);
  CHECK(back.header.n0 == ds.header.n0);
  CHECK(back.header.samples == ds.header.samples);
  CHECK(back.header.tau == ds.header.tau);
  CHECK(back.header.y0 == ds.header.y0);
  CHECK(back.header.seed == ds.header.seed);
  REQUIRE(back.header.schedule.size() == 1);
  CHECK(back.header.schedule[0].kappa == 2.0);
  CHECK(back.header.schedule[0].kmax == 2);
  REQUIRE(back.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    for (std::size_t q = 0; q < 32; ++q)
      CHECK(back.records[i].values[q] == ds.records[i].values[q]);

  write_dataset(back, pb);
  CHECK(slurp(pa) == slurp(pb));
}

TEST_CASE("dataset reader rejects malformed files") {
  RunConfig cfg = small_config();
  Dataset ds = generate_dataset(cfg);
  const std::string path = "/tmp/usim_ds_bad.jsonl";
  write_dataset(ds, path);
  std::vector<std::string> good = lines_of(slurp(path));
  REQUIRE(good.size() == 5);

  // Unsupported version string in the header line.
  std::vector<std::string> bad = good;
  std::size_t pos = bad[0].find("usim-1");
  REQUIRE(pos != std::string::npos);
  bad[0].replace(pos, 6, "usim-0");
  write_lines(path, bad);
  bool threw = false;
  try {
    read_dataset(path);
  } catch (const DataError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("unsupported dataset format") !=
          std::string::npos);
  }
  CHECK(threw);

  // Missing record.
  bad = good;
  bad.pop_back();
  write_lines(path, bad);
  threw = false;
  try {
    read_dataset(path);
  } catch (const DataError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("incomplete") != std::string::npos);
  }
  CHECK(threw);

  // Records shuffled out of canonical order.
  bad = good;
  std::swap(bad[1], bad[2]);
  write_lines(path, bad);
  threw = false;
  try {
    read_dataset(path);
  } catch (const DataError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("canonical order") != std::string::npos);
  }
  CHECK(threw);

  // Garbage line.
  bad = good;
  bad[3] = "{not json";
  write_lines(path, bad);
  threw = false;
  try {
    read_dataset(path);
  } catch (const DataError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("parse error") != std::string::npos);
  }
  CHECK(threw);

  // nx disagrees with the stored value count.
  bad = good;
  pos = bad[2].find("\"nx\":32");
  REQUIRE(pos != std::string::npos);
  bad[2].replace(pos, 7, "\"nx\":31");
  write_lines(path, bad);
  threw = false;
  try {
    read_dataset(path);
  } catch (const DataError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("disagrees with nx") != std::string::npos);
  }
  CHECK(threw);

  CHECK_THROWS_AS(read_dataset("/tmp/usim_no_such_file.jsonl"), DataError);
  write_lines(path, {});
  CHECK_THROWS_AS(read_dataset(path), DataError);
}

TEST_CASE("sample_stages regroups one sample and checks geometry") {
  RunConfig cfg = small_config();
  cfg.schedule = {{2.0, 1}, {3.0, 2}};
  Dataset ds = generate_dataset(cfg);

  std::vector<StageRecords> stages = sample_stages(ds, 1);
  REQUIRE(stages.size() == 2);
  CHECK(stages[0].kappa == 2.0);
  CHECK(stages[1].kappa == 3.0);
  for (std::size_t j = 0; j < 2; ++j) {
    REQUIRE(stages[j].fields.size() == 2);
    for (std::size_t a = 0; a < 2; ++a) {
      const FieldSamples& f = stages[j].fields[a];
      CHECK(f.wave.kappa == cfg.schedule[j].kappa);
      CHECK(f.wave.theta == cfg.angles[a]);
      CHECK(f.y0 == ds.header.y0);
      CHECK(f.sample_index == 1);
      REQUIRE(f.xs.size() == 32);
      const DatasetRecord& rec = ds.at(1, j, a);
      for (std::size_t q = 0; q < 32; ++q) CHECK(f.values[q] == rec.values[q]);
    }
  }

  Dataset mutated = ds;
  mutated.records[0].y0 += 0.5;
  CHECK_THROWS_AS(sample_stages(mutated, 0), DataError);
}
