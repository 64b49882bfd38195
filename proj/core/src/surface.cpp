#include "usim/surface.hpp"

#include <algorithm>
#include <cmath>

#include "usim/rng.hpp"

namespace usim {

double FourierSurface::eval(double x) const {
  double v = coeffs.empty() ? 0.0 : coeffs[0];
  for (int p = 1; p <= kmax; ++p) {
    v += coeffs[2 * p - 1] * std::cos(p * x);
    v += coeffs[2 * p] * std::sin(p * x);
  }
  return v;
}

double FourierSurface::max_value(std::size_t ngrid) const {
  double m = -1e300;
  for (std::size_t k = 0; k < ngrid; ++k)
    m = std::max(m, eval(two_pi * double(k) / double(ngrid)));
  return m;
}

double tent_eval(const std::vector<double>& nodes, double x) {
  const std::size_t n0 = nodes.size();
  const double dx = two_pi / double(n0);
  double t = std::fmod(x, two_pi);
  if (t < 0.0) t += two_pi;
  double u = t / dx;
  std::size_t i = std::min(std::size_t(u), n0 - 1);
  double w = u - double(i);
  return nodes[i] * (1.0 - w) + nodes[(i + 1) % n0] * w;
}

double l2_norm_nodes(const std::vector<double>& v, double dx) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s * dx);
}

namespace {

Realization draw_once(const SurfaceModel& model, GaussGen& gauss) {
  Realization r;
  const std::size_t n0 = model.n0;
  r.dx = two_pi / double(n0);
  r.nodes.resize(n0);
  const double sq = std::sqrt(r.dx);
  for (std::size_t i = 0; i < n0; ++i) {
    double x = double(i) * r.dx;
    r.nodes[i] = model.g(x) + model.h(x) * gauss.next() * sq;
  }
  return r;
}

bool within_band(const SurfaceModel& model, const Realization& r) {
  const std::size_t n0 = model.n0;
  std::vector<double> gv(n0), dev(n0);
  for (std::size_t i = 0; i < n0; ++i) {
    double x = double(i) * r.dx;
    gv[i] = model.g(x);
    dev[i] = r.nodes[i] - gv[i];
  }
  double gn = l2_norm_nodes(gv, r.dx);
  if (gn <= 1e-9) return true;  // zero mean profile, band test is vacuous
  return l2_norm_nodes(dev, r.dx) <= model.rejection_ratio * gn;
}

}  // namespace

Realization sample_realization(const SurfaceModel& model, std::uint64_t seed,
                               std::uint32_t max_resamples) {
  GaussGen gauss(seed);
  for (std::uint32_t attempt = 0;; ++attempt) {
    Realization r = draw_once(model, gauss);
    r.resamples = attempt;
    if (within_band(model, r)) return r;
    if (attempt >= max_resamples)
      throw NumericError("surface rejection loop exceeded " +
                         std::to_string(max_resamples) + " resamples");
  }
}

Realization sample_realization_below(const SurfaceModel& model, std::uint64_t seed,
                                     double ceiling, std::uint32_t max_resamples) {
  GaussGen gauss(seed);
  for (std::uint32_t attempt = 0;; ++attempt) {
    Realization r = draw_once(model, gauss);
    r.resamples = attempt;
    double fmax = *std::max_element(r.nodes.begin(), r.nodes.end());
    if (fmax < ceiling && within_band(model, r)) return r;
    if (attempt >= max_resamples)
      throw NumericError("surface rejection loop exceeded " +
                         std::to_string(max_resamples) + " resamples");
  }
}

FourierSurface fourier_project(const std::function<double(double)>& f, int kmax,
                               std::size_t ngrid) {
  FourierSurface s;
  s.kmax = kmax;
  s.coeffs.assign(2 * std::size_t(kmax) + 1, 0.0);
  const double w = 1.0 / double(ngrid);
  for (std::size_t q = 0; q < ngrid; ++q) {
    double x = two_pi * double(q) / double(ngrid);
    double v = f(x);
    s.coeffs[0] += v * w;
    for (int p = 1; p <= kmax; ++p) {
      s.coeffs[2 * p - 1] += 2.0 * v * std::cos(p * x) * w;
      s.coeffs[2 * p] += 2.0 * v * std::sin(p * x) * w;
    }
  }
  return s;
}

FourierSurface project_nodes(const std::vector<double>& nodes, int kmax,
                             std::size_t ngrid) {
  return fourier_project([&nodes](double x) { return tent_eval(nodes, x); }, kmax, ngrid);
}

FourierSurface zero_pad(const FourierSurface& s, int kmax) {
  if (kmax < s.kmax) throw ConfigError("zero_pad target bandwidth below source");
  FourierSurface out;
  out.kmax = kmax;
  out.coeffs.assign(2 * std::size_t(kmax) + 1, 0.0);
  std::copy(s.coeffs.begin(), s.coeffs.end(), out.coeffs.begin());
  return out;
}

}  // namespace usim
