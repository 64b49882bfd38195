#pragma once

#include <vector>

#include "usim/common.hpp"
#include "usim/rayleigh.hpp"

namespace usim {

// Quasi-periodic Helmholtz Green function for period 2 pi,
//   G(x,y;s,t) = (i/2pi) sum_n (1/beta_n) e^{i alpha_n (x-s) + i beta_n |y-t|},
// as a function of X = x-s and D = y-t.

inline cplx incident_field(const PlaneWave& w, double x, double y) {
  return std::exp(iu * (w.alpha * x - w.beta * y));
}

// Direct spectral sum, adaptive truncation. Fast and accurate away from the
// source line; the evanescent tail converges geometrically only for |D| bounded
// away from zero, hence the proximity guard.
cplx quasiperiodic_green(double kappa, double alpha, double X, double D,
                         double tol = 1e-12, double dmin = 1e-3, int cap = 2000);

// Ewald split: absolutely convergent everywhere including D = 0. Workspace
// holds the mode tables for one (kappa, alpha) so matrix assembly can reuse
// them across entries. Grazing (Wood) modes are dropped from the plain sums
// and their finite-limit spectral piece is restored separately.
struct GreenWorkspace {
  double kappa = 0.0;
  double alpha = 0.0;
  double split = 1.0;  // Ewald parameter E
  double kfac = 0.0;   // (kappa / 2E)^2
  int mmax = 1;
  std::vector<double> alphas;
  std::vector<cplx> gammas;  // gamma_n = -i beta_n, Re >= 0
  std::vector<bool> wood;
};

// split_override > 0 replaces the default E = max(0.85, kappa/2); the result
// must not depend on E, which makes the override a direct consistency check.
GreenWorkspace make_green_workspace(double kappa, double alpha, double split_override = 0.0);

cplx ewald_green(const GreenWorkspace& w, double X, double D);

// Finite limit of a grazing mode's spectral-part contribution, exposed for
// direct testing of the Wood handling.
double wood_limit_term(double D, double E);

}  // namespace usim
