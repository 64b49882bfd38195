#include "usim/presets.hpp"

#include <algorithm>
#include <cmath>

namespace usim {

std::vector<double> angle_grid(std::size_t count, double half_span) {
  std::vector<double> th(count);
  if (count == 1) {
    th[0] = 0.0;
    return th;
  }
  for (std::size_t l = 0; l < count; ++l)
    th[l] = -half_span + 2.0 * half_span * double(l) / double(count - 1);
  return th;
}

double default_measurement_height(const SurfaceModel& model) {
  const std::size_t ngrid = 4096;
  double gmax = -1e300, habs = 0.0;
  for (std::size_t k = 0; k < ngrid; ++k) {
    double x = two_pi * double(k) / double(ngrid);
    gmax = std::max(gmax, model.g(x));
    habs = std::max(habs, std::abs(model.h(x)));
  }
  double dx = two_pi / double(model.n0);
  return gmax + 2.0 * habs * std::sqrt(dx) + 0.05;
}

namespace {

double g_two(double x) { return 1.5 + 0.2 * std::cos(x) + 0.2 * std::cos(2.0 * x); }
double g_four(double x) {
  return 1.2 + 0.05 * std::exp(std::cos(2.0 * x)) + 0.04 * std::exp(std::cos(3.0 * x));
}

RunConfig base_config() {
  RunConfig c;
  c.schedule = {{2.0, 2}};
  c.angles = angle_grid(10, pi / 3.0);
  return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"ex1", "ex2", "ex3", "ex4", "ex5"}; }

bool is_preset(const std::string& name) {
  auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

RunConfig make_preset(const std::string& name) {
  RunConfig c = base_config();
  if (name == "ex1") {
    c.model = {"ex1", [](double) { return 0.0; }, [](double x) { return std::cos(x); }, 80};
  } else if (name == "ex2") {
    c.model = {"ex2", g_two, [](double x) { return std::sin(x); }, 110};
  } else if (name == "ex3") {
    c.model = {"ex3", g_two, [](double x) { return std::sin(x) + std::cos(x); }, 110};
  } else if (name == "ex4") {
    c.model = {"ex4", g_four, [](double x) { return std::cos(x); }, 80};
    c.schedule = {{2.0, 2}, {4.0, 4}, {6.0, 6}};
  } else if (name == "ex5") {
    c.model = {"ex5", g_four, [](double x) { return std::cos(x) + std::cos(2.0 * x); }, 80};
    c.schedule = {{2.0, 2}, {4.0, 4}, {6.0, 6}};
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  c.y0 = default_measurement_height(c.model);
  return c;
}

}  // namespace usim
