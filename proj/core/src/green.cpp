#include "usim/green.hpp"

#include <algorithm>
#include <cmath>

#include "usim/special.hpp"

namespace usim {

namespace {

constexpr double sqrt_pi = 1.7724538509055159;

// e^{+gam D} erfc(gam/2E + DE) + e^{-gam D} erfc(gam/2E - DE), D >= 0,
// computed through w(z) = e^{-z^2} erfc(-iz) so both terms keep the shared
// damping factor e^{-gam^2/4E^2 - D^2 E^2} explicit and never overflow.
cplx erfc_pair_sum(cplx gamma, double D, double E) {
  if (gamma.imag() == 0.0) {
    double g = gamma.real();
    double ex = std::exp(-g * g / (4.0 * E * E) - D * D * E * E);
    double z1 = g / (2.0 * E) + D * E;
    double z2 = g / (2.0 * E) - D * E;
    double t1 = ex * erfcx(z1);
    double t2 = (z2 >= 0.0) ? ex * erfcx(z2) : 2.0 * std::exp(-g * D) - ex * erfcx(-z2);
    return cplx(t1 + t2, 0.0);
  }
  // propagating mode: gamma = -i beta, beta > 0
  double beta = -gamma.imag();
  double x = beta / (2.0 * E), y = D * E;
  double ex = std::exp(x * x - y * y);
  cplx w1 = wofz(cplx(x, y));
  cplx t1 = ex * w1;
  cplx t2 = 2.0 * std::exp(iu * beta * D) - ex * std::conj(w1);
  return t1 + t2;
}

}  // namespace

double wood_limit_term(double D, double E) {
  double Dm = std::abs(D);
  return 2.0 / (sqrt_pi * E) * std::exp(-Dm * Dm * E * E) -
         2.0 * Dm * std::erfc(Dm * E);
}

GreenWorkspace make_green_workspace(double kappa, double alpha, double split_override) {
  if (kappa <= 0.0) throw ConfigError("wavenumber must be positive");
  GreenWorkspace w;
  w.kappa = kappa;
  w.alpha = alpha;
  w.split = split_override > 0.0 ? split_override : std::max(0.85, kappa / 2.0);
  w.kfac = (kappa / (2.0 * w.split)) * (kappa / (2.0 * w.split));
  w.mmax = int(std::ceil(6.5 / (w.split * two_pi))) + 1;
  int nmax = int(std::ceil(2.0 * w.split * 6.5 + kappa + 2.0));
  for (int n = -nmax; n <= nmax; ++n) {
    double an = alpha + n;
    cplx bn = beta_of(kappa, an);
    w.alphas.push_back(an);
    w.gammas.push_back(-iu * bn);
    w.wood.push_back(std::abs(bn) <= wood_rel_tol * kappa);
  }
  return w;
}

cplx ewald_green(const GreenWorkspace& w, double X, double D) {
  const double E = w.split;
  const double Dm = std::abs(D);

  // spectral half: incomplete-gamma-screened mode sum
  cplx g1 = 0.0;
  for (std::size_t k = 0; k < w.alphas.size(); ++k) {
    cplx phase = std::exp(iu * (w.alphas[k] * X));
    if (w.wood[k]) {
      g1 -= phase * wood_limit_term(Dm, E);
      continue;
    }
    g1 += phase * erfc_pair_sum(w.gammas[k], Dm, E) / w.gammas[k];
  }
  g1 *= 1.0 / (4.0 * period);

  // spatial half: exponential-integral series over near image sources
  cplx g2 = 0.0;
  for (int m = -w.mmax; m <= w.mmax; ++m) {
    double xm = X - period * m;
    double arg = E * E * (xm * xm + D * D);
    if (arg > 700.0) continue;
    if (arg <= 0.0) throw NumericError("Ewald sum evaluated at a source point");
    double emx = std::exp(-arg);
    double eq = expint_n(1, arg);
    double coef = 1.0;
    double term = eq;
    for (int q = 1; q < 60; ++q) {
      eq = (emx - arg * eq) / double(q);  // E_{q+1} from E_q
      coef *= w.kfac / double(q);
      term += coef * eq;
      if (coef * eq < 1e-18 && q > 3) break;
    }
    g2 += std::exp(iu * (w.alpha * period * m)) * term;
  }
  g2 *= 1.0 / (4.0 * pi);

  return 2.0 * (g1 + g2);  // i/2pi normalization instead of i/4pi
}

cplx quasiperiodic_green(double kappa, double alpha, double X, double D,
                         double tol, double dmin, int cap) {
  double Dm = std::abs(D);
  if (Dm < dmin)
    throw NumericError("quasiperiodic_green needs |y-t| >= " + std::to_string(dmin));
  cplx sum = 0.0;
  bool converged = false;
  for (int n = 0; n <= cap; ++n) {
    bool tail = true;
    for (int sgn : {1, -1}) {
      if (n == 0 && sgn < 0) continue;
      double an = alpha + sgn * n;
      cplx bn = beta_of(kappa, an);
      if (std::abs(bn) <= wood_rel_tol * kappa) {
        tail = false;  // grazing: term dropped, but the level is not decayed
        continue;
      }
      sum += std::exp(iu * (an * X) + iu * bn * Dm) / bn;
      bool evan = std::abs(an) > kappa;
      if (!evan || std::exp(-bn.imag() * Dm) / std::abs(bn) >= tol) tail = false;
    }
    if (n > 0 && tail) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericError("quasiperiodic_green truncation cap reached");
  return iu / two_pi * sum;
}

}  // namespace usim
