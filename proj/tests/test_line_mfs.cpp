#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>

#include "doctest.h"
#include "usim/green.hpp"
#include "usim/line_mfs.hpp"

using namespace usim;

namespace {

double g_two(double x) { return 1.5 + 0.2 * std::cos(x) + 0.2 * std::cos(2.0 * x); }

}  // namespace

TEST_CASE("flat grating reflects the incident wave with amplitude -1") {
  auto flat = [](double) { return 1.0; };
  for (double theta : {0.0, 0.5}) {
    PlaneWave w(2.0, theta);
    SourceLine line = default_source_line(flat, 128);
    LayerDensity d = solve_layer_density(flat, w, line, 256);
    CHECK(d.fit_residual < 1e-10);
    ModeSet modes = rayleigh_modes(w, 5);
    std::vector<cplx> amps = line_amplitudes(d, modes);
    // image solution: u_s = -e^{i alpha x + i beta (y - 2)}, so A_0 = -e^{-2 i beta}
    CHECK(std::abs(amps[5] - (-std::exp(-2.0 * iu * w.beta))) < 1e-8);
    for (std::size_t k = 0; k < modes.size(); ++k)
      if (k != 5) CHECK(std::abs(amps[k]) < 1e-8);
  }
}

TEST_CASE("flat field at height 2 equals the image wave") {
  auto flat = [](double) { return 1.0; };
  PlaneWave w(2.0, 0.0);
  LayerDensity d = solve_layer_density(flat, w, default_source_line(flat, 128), 256);
  FieldSamples f = line_field_at(d, 2.0, 64);
  // u_s = -e^{i beta (y - 2 f)} at alpha = 0: at y = 2 the phase closes to -1
  for (cplx v : f.values) CHECK(std::abs(v - cplx(-1.0, 0.0)) < 1e-8);
}

TEST_CASE("boundary residual is spectrally small on a smooth grating") {
  PlaneWave w(2.0, 0.3);
  SourceLine line = default_source_line(g_two, 256);
  LayerDensity d = solve_layer_density(g_two, w, line, 512);
  CHECK(d.fit_residual < 5e-5);
  // off-collocation boundary points
  for (double x : {0.123, 1.717, 3.03, 5.5}) {
    cplx total = line_field_direct(d, x, g_two(x)) + incident_field(w, x, g_two(x));
    CHECK(std::abs(total) < 2e-5);
  }
}

TEST_CASE("mode-sum field evaluation matches the direct source superposition") {
  PlaneWave w(2.0, 0.25);
  LayerDensity d = solve_layer_density(g_two, w, default_source_line(g_two, 128), 256);
  FieldSamples f = line_field_at(d, 2.2, 16);
  // the two sums truncate differently; residual scale is the green tail
  // times the density l1 mass
  for (std::size_t q = 0; q < f.xs.size(); ++q) {
    cplx ref = line_field_direct(d, f.xs[q], 2.2);
    CHECK(std::abs(f.values[q] - ref) <= 1e-6);
  }
}

TEST_CASE("scattered energy is conserved on smooth gratings") {
  for (double theta : {-0.4, 0.1}) {
    PlaneWave w(2.0, theta);
    LayerDensity d = solve_layer_density(g_two, w, default_source_line(g_two, 256), 512);
    ModeSet modes = rayleigh_modes(w, 8);
    double e = energy_balance(modes, line_amplitudes(d, modes));
    CHECK(std::abs(e - 1.0) < 1e-6);
  }
}

TEST_CASE("configuration guards reject impossible geometry") {
  auto flat = [](double) { return 1.0; };
  PlaneWave w(2.0, 0.0);
  CHECK_THROWS_AS(solve_layer_density(flat, w, SourceLine{1.5, 64}, 128), ConfigError);
  CHECK_THROWS_AS(solve_layer_density(flat, w, SourceLine{0.5, 128}, 64), ConfigError);
  LayerDensity d = solve_layer_density(flat, w, SourceLine{0.5, 64}, 128);
  CHECK_THROWS_AS(line_field_at(d, 0.4, 8), ConfigError);
}
