#pragma once

#include <functional>

#include "usim/forward.hpp"

namespace usim {

// Boundary-integral solver with the single-layer density collocated at panel
// midpoints directly on the grating curve. Handles Lipschitz (tent) profiles
// that defeat smooth-basis solvers; each tent segment is split into straight
// sub-panels, near interactions use Gauss quadrature and the diagonal uses
// the analytic log integral of the Hankel kernel.
struct PanelMesh {
  std::vector<double> xm, ym;  // midpoints
  std::vector<double> h;       // half-lengths
  std::vector<double> tx, ty;  // unit tangents
  std::size_t size() const { return xm.size(); }
  double max_height() const;
};

PanelMesh build_panels(const std::vector<double>& nodes, int per_segment = 3);
PanelMesh build_panels_fn(const std::function<double(double)>& profile,
                          std::size_t segments, int per_segment = 3);

struct BemSolution {
  PlaneWave wave;
  PanelMesh mesh;
  std::vector<cplx> phi;
  double sys_residual = 0.0;
};

BemSolution bem_solve(const PanelMesh& mesh, const PlaneWave& wave, int near_band = 4);

std::vector<cplx> bem_amplitudes(const BemSolution& s, const ModeSet& modes);

FieldSamples bem_field_at(const BemSolution& s, double y0, std::size_t nx);

// integral_0^a (i/4) H0^(1)(kappa t) dt by the ascending series; exact log
// handling for the self-panel term.
cplx hankel0_integral(double kappa, double a);

}  // namespace usim
