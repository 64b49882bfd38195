#pragma once

#include <cmath>
#include <vector>

#include "usim/common.hpp"

namespace usim {

// Wood-anomaly guard: modes with |beta_n| below this fraction of kappa are
// grazing and are dropped from all mode sums (their Green contributions get
// a separate finite limit term).
inline constexpr double wood_rel_tol = 1e-8;

struct PlaneWave {
  double kappa = 0.0;
  double theta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  PlaneWave() = default;
  PlaneWave(double k, double th) : kappa(k), theta(th) {
    if (k <= 0.0) throw ConfigError("wavenumber must be positive");
    if (std::abs(th) >= pi / 2.0) throw ConfigError("incident angle outside (-pi/2, pi/2)");
    alpha = k * std::sin(th);
    beta = k * std::cos(th);
  }
};

// beta_n for alpha_n = alpha + n: real sqrt(k^2-a^2) when propagating,
// i sqrt(a^2-k^2) when evanescent.
inline cplx beta_of(double kappa, double alpha_n) {
  double d = kappa * kappa - alpha_n * alpha_n;
  if (d >= 0.0) return cplx(std::sqrt(d), 0.0);
  return cplx(0.0, std::sqrt(-d));
}

struct ModeSet {
  PlaneWave wave;
  std::vector<int> ns;
  std::vector<double> alphas;
  std::vector<cplx> betas;
  std::vector<bool> propagating;
  std::vector<bool> keep;  // false only for grazing (Wood) modes

  std::size_t size() const { return ns.size(); }
};

inline ModeSet rayleigh_modes(const PlaneWave& wave, int trunc) {
  ModeSet m;
  m.wave = wave;
  for (int n = -trunc; n <= trunc; ++n) {
    double an = wave.alpha + n;
    cplx bn = beta_of(wave.kappa, an);
    m.ns.push_back(n);
    m.alphas.push_back(an);
    m.betas.push_back(bn);
    m.propagating.push_back(wave.kappa > std::abs(an));
    m.keep.push_back(std::abs(bn) > wood_rel_tol * wave.kappa);
  }
  return m;
}

// Energy carried by the propagating amplitudes relative to the incident wave.
// Equals 1 for an exact solve of a lossless Dirichlet grating.
inline double energy_balance(const ModeSet& modes, const std::vector<cplx>& amplitudes) {
  if (amplitudes.size() != modes.size())
    throw DataError("amplitude count does not match mode set");
  double e = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes.propagating[i] && modes.keep[i])
      e += modes.betas[i].real() / modes.wave.beta * std::norm(amplitudes[i]);
  return e;
}

// Smallest symmetric truncation so that every dropped evanescent mode decays
// below tol across a gap dmin, capped to keep Wood-adjacent cases finite.
inline int mode_range(double kappa, double dmin, double tol = 1e-12, int cap = 2000) {
  if (dmin <= 0.0) throw ConfigError("mode_range needs a positive gap");
  double need = -std::log(tol);
  for (int n = int(kappa) + 1; n <= cap; ++n) {
    double a_minus = std::abs(-std::abs(kappa) + double(n));
    double decay = std::sqrt(std::max(a_minus * a_minus - kappa * kappa, 0.0)) * dmin;
    if (decay > need) return n;
  }
  return cap;
}

}  // namespace usim
