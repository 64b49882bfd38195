#include "usim/forward.hpp"

#include <Eigen/Dense>

#include "usim/green.hpp"

namespace usim {

std::vector<cplx> data_fourier_coeffs(const FieldSamples& f, const ModeSet& modes) {
  const std::size_t nx = f.xs.size();
  if (f.values.size() != nx) throw DataError("field sample size mismatch");
  std::vector<cplx> un(modes.size(), 0.0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    cplx acc = 0.0;
    for (std::size_t q = 0; q < nx; ++q)
      acc += f.values[q] * std::exp(-iu * (modes.alphas[k] * f.xs[q]));
    un[k] = acc / double(nx);
  }
  return un;
}

std::vector<cplx> rayleigh_amplitudes(const FieldSamples& f, const ModeSet& modes) {
  std::vector<cplx> amps = data_fourier_coeffs(f, modes);
  for (std::size_t k = 0; k < modes.size(); ++k)
    amps[k] *= std::exp(-iu * modes.betas[k] * f.y0);
  return amps;
}

std::vector<cplx> rayleigh_lsq_amplitudes(const std::function<double(double)>& profile,
                                          const PlaneWave& wave, const ModeSet& modes,
                                          std::size_t n_coll) {
  const std::size_t nm = modes.size();
  if (n_coll < 2 * nm) throw ConfigError("rayleigh_lsq needs n_coll >= 2 modes");
  Eigen::MatrixXcd A(n_coll, nm);
  Eigen::VectorXcd rhs(n_coll);
  for (std::size_t q = 0; q < n_coll; ++q) {
    double x = two_pi * double(q) / double(n_coll);
    double fx = profile(x);
    for (std::size_t k = 0; k < nm; ++k) {
      if (!modes.keep[k]) {
        A(q, k) = 0.0;
        continue;
      }
      A(q, k) = std::exp(iu * (modes.alphas[k] * x) + iu * modes.betas[k] * fx);
    }
    rhs(q) = -incident_field(wave, x, fx);
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  if (svd.rank() == 0) throw NumericError("rayleigh_lsq system has effective rank 0");
  Eigen::VectorXcd sol = svd.solve(rhs);
  std::vector<cplx> amps(nm, 0.0);
  for (std::size_t k = 0; k < nm; ++k) amps[k] = modes.keep[k] ? sol(k) : cplx(0.0);
  return amps;
}

FieldSamples field_from_amplitudes(const std::vector<cplx>& amps, const ModeSet& modes,
                                   double y0, std::size_t nx) {
  if (amps.size() != modes.size()) throw DataError("amplitude count mismatch");
  FieldSamples f;
  f.wave = modes.wave;
  f.y0 = y0;
  f.xs = uniform_grid(nx);
  f.values.assign(nx, 0.0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (!modes.keep[k]) continue;
    cplx a = amps[k] * std::exp(iu * modes.betas[k] * y0);
    for (std::size_t q = 0; q < nx; ++q)
      f.values[q] += a * std::exp(iu * (modes.alphas[k] * f.xs[q]));
  }
  return f;
}

}  // namespace usim
