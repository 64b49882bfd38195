#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usim/forward.hpp"
#include "usim/inversion.hpp"
#include "usim/presets.hpp"
#include "usim/rng.hpp"

namespace usim {

inline constexpr const char* format_version = "usim-1";

// Gap between the measurement line and the highest accepted surface node.
inline constexpr double surface_clearance = 0.02;

struct DatasetHeader {
  std::string version = format_version;
  std::string model;
  std::size_t n0 = 0;
  Schedule schedule;
  std::vector<double> angles;
  std::size_t samples = 0;
  double tau = 0.0;
  double y0 = 0.0;
  std::size_t nx = 0;
  std::uint64_t seed = 0;
};

// One stored measurement: sample index m, stage wavenumber, incidence angle,
// and the complex scattered field on the uniform grid at height y0.
struct DatasetRecord {
  std::size_t m = 0;
  double kappa = 0.0;
  double theta = 0.0;
  double y0 = 0.0;
  std::size_t nx = 0;
  std::vector<cplx> values;
};

// Records are kept in canonical order: sample-major, then schedule stage,
// then angle, independent of how many workers produced them.
struct Dataset {
  DatasetHeader header;
  std::vector<DatasetRecord> records;

  std::size_t stage_count() const { return header.schedule.size(); }
  std::size_t angle_count() const { return header.angles.size(); }
  const DatasetRecord& at(std::size_t m, std::size_t stage, std::size_t angle) const;
};

// Multiplies every grid value by (1 + tau * eps) with eps drawn uniformly
// from [-1, 1], one independent draw per grid point.
void add_noise(std::vector<cplx>& values, double tau, SplitMix64& gen);

// Seed layout: every (sample, stage, angle) cell gets its own substream so
// records are reproducible no matter the execution order.
std::uint64_t realization_seed(std::uint64_t master, std::size_t m);
std::uint64_t noise_seed(std::uint64_t master, std::size_t m, std::size_t stage,
                         std::size_t angle);

// Draws M surface realizations and solves the scattering problem for every
// (stage, angle) pair, recording the noisy field at height y0. Realizations
// are rejected until they stay below y0 by a small clearance.
Dataset generate_dataset(const RunConfig& cfg, std::size_t workers = 1);

void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

// Regroups one sample's records for the continuation solver and checks that
// their (kappa, theta, y0, nx) agree with the header.
std::vector<StageRecords> sample_stages(const Dataset& ds, std::size_t m);

}  // namespace usim
