#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "usim/common.hpp"

namespace usim {

// Random periodic profile: f(x_i) = g(x_i) + h(x_i) xi_i sqrt(dx) at the
// nodes x_i = i dx, dx = 2 pi / n0, extended by tent interpolation.
struct SurfaceModel {
  std::string name;
  std::function<double(double)> g;
  std::function<double(double)> h;
  std::size_t n0 = 80;
  double rejection_ratio = 0.9;  // resample while ||f-g|| > ratio * ||g||
};

struct Realization {
  std::vector<double> nodes;  // n0 values, node i at x = i dx, periodic wrap
  double dx = 0.0;
  std::uint32_t resamples = 0;

  std::size_t size() const { return nodes.size(); }
};

// Truncated Fourier profile c0 + sum_p c_{2p-1} cos(p x) + c_{2p} sin(p x).
struct FourierSurface {
  int kmax = 0;
  std::vector<double> coeffs;  // 2 kmax + 1 entries

  double eval(double x) const;
  double max_value(std::size_t ngrid = 2048) const;
};

double tent_eval(const std::vector<double>& nodes, double x);

double l2_norm_nodes(const std::vector<double>& v, double dx);

Realization sample_realization(const SurfaceModel& model, std::uint64_t seed,
                               std::uint32_t max_resamples = 1000);

// Same rejection loop with an extra ceiling on max f, used when the
// measurement height is fixed before sampling.
Realization sample_realization_below(const SurfaceModel& model, std::uint64_t seed,
                                     double ceiling, std::uint32_t max_resamples = 1000);

FourierSurface fourier_project(const std::function<double(double)>& f, int kmax,
                               std::size_t ngrid = 4096);

FourierSurface project_nodes(const std::vector<double>& nodes, int kmax,
                             std::size_t ngrid = 4096);

FourierSurface zero_pad(const FourierSurface& s, int kmax);

}  // namespace usim
