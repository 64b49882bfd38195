#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "usim/common.hpp"
#include "usim/rayleigh.hpp"

namespace usim {

// Scattered field sampled on a uniform x grid along the line y = y0.
struct FieldSamples {
  PlaneWave wave;
  double y0 = 0.0;
  std::vector<double> xs;
  std::vector<cplx> values;
  std::uint64_t sample_index = 0;
};

// u_n = (1/2pi) integral of u^s e^{-i alpha_n x}; A_n = u_n e^{-i beta_n y0}.
// The alpha_n kernel (not e^{-inx}) divides out the quasi-periodic phase; a
// plain integer kernel leaks across modes at oblique incidence.
std::vector<cplx> data_fourier_coeffs(const FieldSamples& f, const ModeSet& modes);
std::vector<cplx> rayleigh_amplitudes(const FieldSamples& f, const ModeSet& modes);

// Direct least-squares fit of the Rayleigh expansion on the boundary:
// sum_n A_n e^{i alpha_n x + i beta_n f(x)} = -u^i(x, f(x)). Valid for
// shallow smooth profiles; independent cross-check of the potential solvers.
std::vector<cplx> rayleigh_lsq_amplitudes(const std::function<double(double)>& profile,
                                          const PlaneWave& wave, const ModeSet& modes,
                                          std::size_t n_coll = 512);

FieldSamples field_from_amplitudes(const std::vector<cplx>& amps, const ModeSet& modes,
                                   double y0, std::size_t nx);

}  // namespace usim
