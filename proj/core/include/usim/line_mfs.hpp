#pragma once

#include <functional>

#include "usim/forward.hpp"

namespace usim {

// Single-layer solver with periodic point sources on the line y = t_src below
// the grating. Collocation on the boundary, least squares with truncated SVD.
// Spectrally accurate for smooth profiles; not suitable for corner profiles.
struct SourceLine {
  double t_src = 0.0;
  std::size_t n_src = 256;
  double weight() const { return two_pi / double(n_src); }
  double node(std::size_t j) const { return two_pi * double(j) / double(n_src); }
};

struct LayerDensity {
  PlaneWave wave;
  SourceLine line;
  std::vector<cplx> phi;
  double fit_residual = 0.0;
};

LayerDensity solve_layer_density(const std::function<double(double)>& profile,
                                 const PlaneWave& wave, const SourceLine& line,
                                 std::size_t n_coll = 512);

// Convenience: t_src = min profile - 0.5 on a fine scan.
SourceLine default_source_line(const std::function<double(double)>& profile,
                               std::size_t n_src = 256);

std::vector<cplx> line_amplitudes(const LayerDensity& d, const ModeSet& modes);

FieldSamples line_field_at(const LayerDensity& d, double y0, std::size_t nx);

// Literal superposition sum_j w phi_j G(x - s_j, y - t_src); slow reference
// path for checking the mode-sum evaluation.
cplx line_field_direct(const LayerDensity& d, double x, double y);

}  // namespace usim
