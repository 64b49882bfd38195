#pragma once

#include <optional>
#include <vector>

#include "usim/forward.hpp"
#include "usim/presets.hpp"
#include "usim/surface.hpp"

namespace usim {

// Spectral data for one record: data coefficients u_n and the regularized
// boundary coefficients psi_n. Propagating modes are back-propagated exactly;
// evanescent modes pass through a Tikhonov filter with parameter gamma.
struct SpectralData {
  ModeSet modes;
  double y0 = 0.0;
  double gamma = 0.0;
  std::vector<cplx> un;
  std::vector<cplx> psi;
};

// phi_n = -i (2 pi / period) beta_n u_n e^{-i beta_n y0}; unregularized
// density map, exposed to demonstrate the exponential ill-posedness.
std::vector<cplx> density_coeffs(const std::vector<cplx>& un, const ModeSet& modes,
                                 double y0);

std::vector<cplx> psi_coeffs(const std::vector<cplx>& un, const ModeSet& modes,
                             double y0, double gamma);

SpectralData make_spectral_data(const FieldSamples& field, int trunc, double gamma);

// Precomputed tables for one incident angle at one stage: psi coefficients,
// mode phases on the quadrature grid, and the trig basis for the surface.
struct AngleContext {
  PlaneWave wave;
  std::vector<cplx> psi;        // kept modes only
  std::vector<double> alphas;   // kept modes
  std::vector<cplx> betas;      // kept modes
  std::vector<double> xq;       // quadrature grid, N_q points
  std::vector<cplx> mode_phase; // [mode * nq + q] = e^{i alpha_n x_q}
  std::vector<cplx> inc_phase;  // e^{i alpha x_q}
};

AngleContext make_angle_context(const SpectralData& sd, std::size_t nq);

// Trig basis values b_p(x_q) for p = 0..2k: 1, cos x, sin x, cos 2x, ...
std::vector<double> basis_table(int kmax, const std::vector<double>& xq);

std::vector<cplx> boundary_residual(const FourierSurface& c, const AngleContext& ctx);

double objective(const FourierSurface& c, const AngleContext& ctx);

double objective_total(const FourierSurface& c, const std::vector<AngleContext>& ctxs);

// Analytic gradient of the total objective in the coefficients of c;
// per-angle objective values optionally reported for the weighted update.
std::vector<double> objective_gradient(const FourierSurface& c,
                                       const std::vector<AngleContext>& ctxs,
                                       std::vector<double>* per_angle = nullptr);

struct LandweberOptions {
  double eta = 5e-4;
  int iterations = 50;
  bool weighted = false;       // scale each angle's gradient by its J_l
  bool early_stop = false;     // stop when the gradient sup-norm < 1e-10
  double divergence_bound = 50.0;
};

struct LandweberResult {
  FourierSurface c;
  std::vector<double> history;  // total objective, length iterations + 1
};

LandweberResult landweber_run(const FourierSurface& c_init,
                              const std::vector<AngleContext>& ctxs,
                              const LandweberOptions& opt);

// All records of one sample, grouped per continuation stage. Stage order and
// wavenumbers must match the schedule.
struct StageRecords {
  double kappa = 0.0;
  std::vector<FieldSamples> fields;  // one per incident angle
};

struct ContinuationParams {
  double gamma = 1e-2;
  int trunc = 8;
  std::size_t nq = 256;
  int iterations = 50;
  double eta_scale = 1e-3;
  bool weighted = false;
  bool early_stop = false;
};

struct ContinuationTrace {
  std::vector<std::vector<double>> stage_history;
};

FourierSurface continuation_invert(const std::vector<StageRecords>& stages,
                                   const FourierSurface& c_init,
                                   const Schedule& schedule,
                                   const ContinuationParams& params,
                                   ContinuationTrace* trace = nullptr,
                                   std::size_t first_stage = 0);

}  // namespace usim
