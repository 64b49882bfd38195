#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usim/surface.hpp"

namespace usim {

struct Stage {
  double kappa = 2.0;
  int kmax = 2;
};

using Schedule = std::vector<Stage>;

// Everything a full run needs: surface model, wavenumber schedule, incident
// angles, sample counts, noise and regularization knobs, grid sizes.
struct RunConfig {
  SurfaceModel model;
  Schedule schedule;
  std::vector<double> angles;
  std::size_t samples = 1000;        // M
  std::size_t init_samples = 100;    // M_r, cold-start phase
  double tau = 1e-3;                 // multiplicative noise level
  double gamma = 1e-2;               // evanescent regularization
  int iterations = 50;               // Landweber sweeps per stage
  double eta_scale = 1e-3;           // step = eta_scale / kappa
  int truncation = 8;                // residual mode band [-N, N]
  std::size_t nx = 256;              // measurement samples per record
  std::size_t nq = 256;              // objective quadrature points
  double y0 = 0.0;                   // measurement height, 0 = auto policy
  bool weighted_update = false;      // scale gradient by J (diverges, off)
  bool warm_all_stages = false;      // warm-started samples redo every stage
  double sign_threshold = 0.5;       // sign-cluster correlation cutoff
  std::size_t sign_anchor = 0;       // node where the sign prior is positive
  std::uint64_t seed = 1;

  int final_kmax() const { return schedule.empty() ? 0 : schedule.back().kmax; }
  double final_kappa() const { return schedule.empty() ? 0.0 : schedule.back().kappa; }
};

std::vector<double> angle_grid(std::size_t count, double half_span);

// Measurement line just above the reachable surface band:
// max g + 2 max|h| sqrt(dx) + 0.05. Keeps the line inside the convergence
// basin of the phase objective while staying above almost every draw.
double default_measurement_height(const SurfaceModel& model);

bool is_preset(const std::string& name);
std::vector<std::string> preset_names();
RunConfig make_preset(const std::string& name);

}  // namespace usim
