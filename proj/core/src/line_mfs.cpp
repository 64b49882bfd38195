#include "usim/line_mfs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "usim/green.hpp"

namespace usim {

SourceLine default_source_line(const std::function<double(double)>& profile,
                               std::size_t n_src) {
  double fmin = 1e300;
  for (std::size_t k = 0; k < 2048; ++k)
    fmin = std::min(fmin, profile(two_pi * double(k) / 2048.0));
  return SourceLine{fmin - 0.5, n_src};
}

LayerDensity solve_layer_density(const std::function<double(double)>& profile,
                                 const PlaneWave& wave, const SourceLine& line,
                                 std::size_t n_coll) {
  if (n_coll < line.n_src) throw ConfigError("collocation count below source count");
  const std::size_t nq = n_coll, ns = line.n_src;

  std::vector<double> xq(nq), fq(nq), dq(nq);
  double dmin = 1e300;
  for (std::size_t q = 0; q < nq; ++q) {
    xq[q] = two_pi * double(q) / double(nq);
    fq[q] = profile(xq[q]);
    dq[q] = fq[q] - line.t_src;
    dmin = std::min(dmin, dq[q]);
  }
  if (dmin <= 0.0) throw ConfigError("source line above the surface");

  int nmax = mode_range(wave.kappa, dmin);
  ModeSet modes = rayleigh_modes(wave, nmax);
  const std::size_t nm = modes.size();

  // factorized Green sum: M = w * A * B with A the x-side mode table and
  // B the source-side phases
  Eigen::MatrixXcd A(nq, nm), B(nm, ns);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t k = 0; k < nm; ++k)
      A(q, k) = modes.keep[k]
                    ? iu / two_pi *
                          std::exp(iu * (modes.alphas[k] * xq[q]) + iu * modes.betas[k] * dq[q]) /
                          modes.betas[k]
                    : cplx(0.0);
  for (std::size_t k = 0; k < nm; ++k)
    for (std::size_t j = 0; j < ns; ++j)
      B(k, j) = std::exp(-iu * (modes.alphas[k] * line.node(j)));

  Eigen::MatrixXcd M = line.weight() * (A * B);
  Eigen::VectorXcd rhs(nq);
  for (std::size_t q = 0; q < nq; ++q) rhs(q) = -incident_field(wave, xq[q], fq[q]);

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  if (svd.rank() == 0) throw NumericError("layer system has effective rank 0");
  Eigen::VectorXcd phi = svd.solve(rhs);

  LayerDensity d;
  d.wave = wave;
  d.line = line;
  d.phi.assign(phi.data(), phi.data() + phi.size());
  d.fit_residual = (M * phi - rhs).cwiseAbs().maxCoeff();
  return d;
}

namespace {

// per-mode source sums S_n = sum_j phi_j e^{-i alpha_n s_j}
std::vector<cplx> source_sums(const LayerDensity& d, const ModeSet& modes) {
  std::vector<cplx> s(modes.size(), 0.0);
  for (std::size_t k = 0; k < modes.size(); ++k)
    for (std::size_t j = 0; j < d.phi.size(); ++j)
      s[k] += d.phi[j] * std::exp(-iu * (modes.alphas[k] * d.line.node(j)));
  return s;
}

}  // namespace

std::vector<cplx> line_amplitudes(const LayerDensity& d, const ModeSet& modes) {
  std::vector<cplx> amps = source_sums(d, modes);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (!modes.keep[k]) {
      amps[k] = 0.0;
      continue;
    }
    amps[k] *= iu / two_pi * d.line.weight() *
               std::exp(-iu * modes.betas[k] * d.line.t_src) / modes.betas[k];
  }
  return amps;
}

FieldSamples line_field_at(const LayerDensity& d, double y0, std::size_t nx) {
  double gap = y0 - d.line.t_src;
  if (gap <= 0.0) throw ConfigError("evaluation height below the source line");
  ModeSet modes = rayleigh_modes(d.wave, mode_range(d.wave.kappa, gap));
  std::vector<cplx> s = source_sums(d, modes);

  FieldSamples f;
  f.wave = d.wave;
  f.y0 = y0;
  f.xs = uniform_grid(nx);
  f.values.assign(nx, 0.0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (!modes.keep[k]) continue;
    cplx a = iu / two_pi * d.line.weight() * s[k] *
             std::exp(iu * modes.betas[k] * gap) / modes.betas[k];
    for (std::size_t q = 0; q < nx; ++q)
      f.values[q] += a * std::exp(iu * (modes.alphas[k] * f.xs[q]));
  }
  return f;
}

cplx line_field_direct(const LayerDensity& d, double x, double y) {
  cplx u = 0.0;
  for (std::size_t j = 0; j < d.phi.size(); ++j)
    u += d.line.weight() * d.phi[j] *
         quasiperiodic_green(d.wave.kappa, d.wave.alpha, x - d.line.node(j),
                             y - d.line.t_src);
  return u;
}

}  // namespace usim
