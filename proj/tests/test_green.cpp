#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "usim/green.hpp"

using namespace usim;

TEST_CASE("ewald split agrees with the spectral sum away from the source line") {
  struct Case {
    double kappa, alpha;
  };
  for (Case c : {Case{2.0, 0.0}, Case{2.0, 0.59}, Case{4.0, -1.1}, Case{6.3, 2.0}, Case{0.7, 0.2}}) {
    GreenWorkspace w = make_green_workspace(c.kappa, c.alpha);
    for (double X : {-3.0, -0.4, 0.0, 1.3, 3.1}) {
      for (double D : {-1.6, -0.3, 0.08, 0.9, 2.5}) {
        cplx a = ewald_green(w, X, D);
        cplx b = quasiperiodic_green(c.kappa, c.alpha, X, D);
        CHECK(std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(b)));
      }
    }
  }
}

TEST_CASE("the value does not depend on the ewald split parameter") {
  for (double kappa : {2.0, 5.0}) {
    double alpha = 0.37 * kappa;
    GreenWorkspace w0 = make_green_workspace(kappa, alpha);
    GreenWorkspace wlo = make_green_workspace(kappa, alpha, 0.8 * w0.split);
    GreenWorkspace whi = make_green_workspace(kappa, alpha, 1.3 * w0.split);
    for (double X : {-2.2, 0.7, 2.9}) {
      for (double D : {0.0, 0.02, -0.5, 1.4}) {
        if (X == 0.0 && D == 0.0) continue;
        cplx a = ewald_green(w0, X, D);
        CHECK(std::abs(ewald_green(wlo, X, D) - a) <= 1e-10 * std::max(1.0, std::abs(a)));
        CHECK(std::abs(ewald_green(whi, X, D) - a) <= 1e-10 * std::max(1.0, std::abs(a)));
      }
    }
  }
}

TEST_CASE("ewald evaluation works on the source line where the spectral sum cannot") {
  GreenWorkspace w = make_green_workspace(2.0, 0.4);
  CHECK(std::isfinite(ewald_green(w, 1.0, 0.0).real()));
  CHECK_THROWS_AS(quasiperiodic_green(2.0, 0.4, 1.0, 0.0), NumericError);
  CHECK_THROWS_AS(ewald_green(w, 0.0, 0.0), NumericError);
}

TEST_CASE("green function is quasi-periodic in the horizontal offset") {
  double kappa = 3.1, alpha = 0.83;
  GreenWorkspace w = make_green_workspace(kappa, alpha);
  cplx bloch = std::exp(iu * (alpha * period));
  for (double X : {-1.0, 0.25, 2.0}) {
    for (double D : {0.15, -0.8}) {
      cplx a = ewald_green(w, X + period, D);
      cplx b = bloch * ewald_green(w, X, D);
      CHECK(std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST_CASE("green function is symmetric under vertical reflection") {
  GreenWorkspace w = make_green_workspace(2.4, 0.5);
  for (double X : {0.3, -1.7}) {
    for (double D : {0.2, 1.1}) {
      cplx a = ewald_green(w, X, D);
      cplx b = ewald_green(w, X, -D);
      CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
    }
  }
}

TEST_CASE("green function satisfies the helmholtz equation off the sources") {
  double kappa = 2.0, alpha = 0.6;
  GreenWorkspace w = make_green_workspace(kappa, alpha);
  double h = 1e-3;
  for (double X : {0.9, -2.1}) {
    for (double D : {0.7, -1.2}) {
      cplx c = ewald_green(w, X, D);
      cplx lap = (ewald_green(w, X + h, D) + ewald_green(w, X - h, D) +
                  ewald_green(w, X, D + h) + ewald_green(w, X, D - h) - 4.0 * c) /
                 (h * h);
      cplx res = lap + kappa * kappa * c;
      // O(h^2) stencil error with fourth derivatives of size kappa^4 |G|
      CHECK(std::abs(res) < 20.0 * kappa * kappa * kappa * kappa * h * h * std::abs(c));
    }
  }
}

TEST_CASE("spectral mode amplitudes match the rayleigh expansion of the green function") {
  // For D > 0, G = (i/2pi) sum_n e^{i alpha_n X + i beta_n D} / beta_n; one
  // fourier mode in X on a period isolates a single term.
  double kappa = 2.0, alpha = 0.31;
  GreenWorkspace w = make_green_workspace(kappa, alpha);
  double D = 0.9;
  const std::size_t nx = 256;
  for (int n : {0, 1, -2}) {
    cplx acc = 0.0;
    double an = alpha + n;
    for (std::size_t q = 0; q < nx; ++q) {
      double X = period * double(q) / double(nx);
      acc += ewald_green(w, X, D) * std::exp(-iu * (an * X));
    }
    acc /= double(nx);
    cplx bn = beta_of(kappa, an);
    cplx expected = iu / two_pi * std::exp(iu * bn * D) / bn;
    CHECK(std::abs(acc - expected) <= 1e-10 * std::abs(expected));
  }
}

TEST_CASE("wood limit term matches reference values") {
  CHECK(wood_limit_term(0.0, 0.85) == doctest::Approx(1.327504902465309).epsilon(1e-13));
  CHECK(wood_limit_term(0.2, 0.85) == doctest::Approx(0.9656860658555659).epsilon(1e-13));
  CHECK(wood_limit_term(0.5, 1.3) == doctest::Approx(0.21091145302221792).epsilon(1e-13));
  CHECK(wood_limit_term(0.05, 2.0) == doctest::Approx(0.4698220949962969).epsilon(1e-13));
  // even in D
  CHECK(wood_limit_term(-0.2, 0.85) == doctest::Approx(wood_limit_term(0.2, 0.85)));
}

TEST_CASE("grazing-mode workspaces stay finite at a wood anomaly") {
  // kappa = 2 at normal incidence grazes at n = +-2
  GreenWorkspace w = make_green_workspace(2.0, 0.0);
  int woods = 0;
  for (bool b : w.wood) woods += b;
  CHECK(woods == 2);
  for (double D : {0.0, 0.3, 1.0}) {
    cplx v = ewald_green(w, 0.7, D);
    CHECK(std::isfinite(v.real()));
    CHECK(std::isfinite(v.imag()));
  }
  // the split-parameter consistency still holds with wood modes present
  GreenWorkspace w2 = make_green_workspace(2.0, 0.0, 1.25);
  for (double D : {0.1, 0.8}) {
    cplx a = ewald_green(w, 0.7, D);
    cplx b = ewald_green(w2, 0.7, D);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("proximity guard rejects spectral evaluation too close to the line") {
  CHECK_THROWS_AS(quasiperiodic_green(2.0, 0.3, 0.5, 5e-4), NumericError);
}
