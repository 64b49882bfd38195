#include "usim/inversion.hpp"

#include <algorithm>
#include <cmath>

namespace usim {

std::vector<cplx> density_coeffs(const std::vector<cplx>& un, const ModeSet& modes,
                                 double y0) {
  if (un.size() != modes.size()) throw DataError("coefficient count mismatch");
  std::vector<cplx> phi(un.size(), 0.0);
  for (std::size_t k = 0; k < un.size(); ++k) {
    if (!modes.keep[k]) continue;
    phi[k] = -iu * (two_pi / period) * modes.betas[k] * un[k] *
             std::exp(-iu * modes.betas[k] * y0);
  }
  return phi;
}

std::vector<cplx> psi_coeffs(const std::vector<cplx>& un, const ModeSet& modes,
                             double y0, double gamma) {
  if (gamma <= 0.0) throw ConfigError("regularization parameter must be positive");
  if (un.size() != modes.size()) throw DataError("coefficient count mismatch");
  std::vector<cplx> psi(un.size(), 0.0);
  for (std::size_t k = 0; k < un.size(); ++k) {
    if (!modes.keep[k]) continue;
    cplx b = modes.betas[k];
    if (modes.propagating[k]) {
      psi[k] = un[k] * std::exp(-iu * b * y0);
    } else {
      psi[k] = un[k] * std::exp(iu * b * y0) / (std::exp(2.0 * iu * b * y0) + gamma);
    }
  }
  return psi;
}

SpectralData make_spectral_data(const FieldSamples& field, int trunc, double gamma) {
  SpectralData sd;
  sd.modes = rayleigh_modes(field.wave, trunc);
  if (field.xs.size() < 4 * std::size_t(trunc))
    throw DataError("record grid too coarse for the requested truncation");
  sd.y0 = field.y0;
  sd.gamma = gamma;
  sd.un = data_fourier_coeffs(field, sd.modes);
  sd.psi = psi_coeffs(sd.un, sd.modes, field.y0, gamma);
  return sd;
}

AngleContext make_angle_context(const SpectralData& sd, std::size_t nq) {
  AngleContext ctx;
  ctx.wave = sd.modes.wave;
  ctx.xq = uniform_grid(nq);
  for (std::size_t k = 0; k < sd.modes.size(); ++k) {
    if (!sd.modes.keep[k]) continue;
    ctx.psi.push_back(sd.psi[k]);
    ctx.alphas.push_back(sd.modes.alphas[k]);
    ctx.betas.push_back(sd.modes.betas[k]);
  }
  const std::size_t nm = ctx.psi.size();
  ctx.mode_phase.resize(nm * nq);
  for (std::size_t k = 0; k < nm; ++k)
    for (std::size_t q = 0; q < nq; ++q)
      ctx.mode_phase[k * nq + q] = std::exp(iu * (ctx.alphas[k] * ctx.xq[q]));
  ctx.inc_phase.resize(nq);
  for (std::size_t q = 0; q < nq; ++q)
    ctx.inc_phase[q] = std::exp(iu * (ctx.wave.alpha * ctx.xq[q]));
  return ctx;
}

std::vector<double> basis_table(int kmax, const std::vector<double>& xq) {
  const std::size_t nq = xq.size(), nb = 2 * std::size_t(kmax) + 1;
  std::vector<double> b(nb * nq);
  for (std::size_t q = 0; q < nq; ++q) b[q] = 1.0;
  for (int p = 1; p <= kmax; ++p)
    for (std::size_t q = 0; q < nq; ++q) {
      b[std::size_t(2 * p - 1) * nq + q] = std::cos(p * xq[q]);
      b[std::size_t(2 * p) * nq + q] = std::sin(p * xq[q]);
    }
  return b;
}

namespace {

struct EvalScratch {
  std::vector<double> f;
  std::vector<cplx> r, s;
};

// residual r and its height derivative s on the quadrature grid
void eval_residual(const FourierSurface& c, const AngleContext& ctx, bool need_s,
                   EvalScratch& sc) {
  const std::size_t nq = ctx.xq.size(), nm = ctx.psi.size();
  sc.f.assign(nq, 0.0);
  for (std::size_t q = 0; q < nq; ++q) sc.f[q] = c.eval(ctx.xq[q]);
  sc.r.assign(nq, 0.0);
  if (need_s) sc.s.assign(nq, 0.0);
  const double beta = ctx.wave.beta;
  for (std::size_t k = 0; k < nm; ++k) {
    const cplx bk = ctx.betas[k];
    const cplx* ph = &ctx.mode_phase[k * nq];
    for (std::size_t q = 0; q < nq; ++q) {
      cplx t = ctx.psi[k] * ph[q] * std::exp(iu * bk * sc.f[q]);
      sc.r[q] += t;
      if (need_s) sc.s[q] += bk * t;
    }
  }
  for (std::size_t q = 0; q < nq; ++q) {
    cplx inc = ctx.inc_phase[q] * std::exp(-iu * beta * sc.f[q]);
    sc.r[q] += inc;
    if (need_s) sc.s[q] -= beta * inc;
  }
}

}  // namespace

std::vector<cplx> boundary_residual(const FourierSurface& c, const AngleContext& ctx) {
  EvalScratch sc;
  eval_residual(c, ctx, false, sc);
  return sc.r;
}

double objective(const FourierSurface& c, const AngleContext& ctx) {
  EvalScratch sc;
  eval_residual(c, ctx, false, sc);
  double j = 0.0;
  for (const cplx& v : sc.r) j += std::norm(v);
  return j * two_pi / double(ctx.xq.size());
}

double objective_total(const FourierSurface& c, const std::vector<AngleContext>& ctxs) {
  double j = 0.0;
  for (const auto& ctx : ctxs) j += objective(c, ctx);
  return j;
}

std::vector<double> objective_gradient(const FourierSurface& c,
                                       const std::vector<AngleContext>& ctxs,
                                       std::vector<double>* per_angle) {
  const std::size_t nb = c.coeffs.size();
  std::vector<double> grad(nb, 0.0);
  if (per_angle) per_angle->assign(ctxs.size(), 0.0);
  EvalScratch sc;
  for (std::size_t l = 0; l < ctxs.size(); ++l) {
    const AngleContext& ctx = ctxs[l];
    const std::size_t nq = ctx.xq.size();
    const double dx = two_pi / double(nq);
    eval_residual(c, ctx, true, sc);
    if (per_angle) {
      double j = 0.0;
      for (const cplx& v : sc.r) j += std::norm(v);
      (*per_angle)[l] = j * dx;
    }
    std::vector<double> w(nq);
    for (std::size_t q = 0; q < nq; ++q)
      w[q] = -std::imag(sc.s[q] * std::conj(sc.r[q]));
    std::vector<double> btab = basis_table(c.kmax, ctx.xq);
    for (std::size_t p = 0; p < nb; ++p) {
      double g = 0.0;
      const double* bp = &btab[p * nq];
      for (std::size_t q = 0; q < nq; ++q) g += bp[q] * w[q];
      grad[p] += 2.0 * dx * g;
    }
  }
  return grad;
}

LandweberResult landweber_run(const FourierSurface& c_init,
                              const std::vector<AngleContext>& ctxs,
                              const LandweberOptions& opt) {
  if (opt.eta < 0.0) throw ConfigError("step size must be non-negative");
  LandweberResult res;
  res.c = c_init;
  res.history.reserve(opt.iterations + 1);
  std::vector<double> per_angle;
  for (int t = 0; t < opt.iterations; ++t) {
    std::vector<double> grad = objective_gradient(res.c, ctxs, &per_angle);
    double jtot = 0.0;
    for (double j : per_angle) jtot += j;
    res.history.push_back(jtot);
    if (!std::isfinite(jtot))
      throw NumericError("objective diverged at iteration " + std::to_string(t));
    if (opt.early_stop) {
      double gmax = 0.0;
      for (double g : grad) gmax = std::max(gmax, std::abs(g));
      if (gmax < 1e-10) break;
    }
    if (opt.weighted) {
      // composite DJ^T J form: per-angle gradients scaled by residual values
      std::vector<double> wg(grad.size(), 0.0);
      for (std::size_t l = 0; l < ctxs.size(); ++l) {
        std::vector<AngleContext> one{ctxs[l]};
        std::vector<double> gl = objective_gradient(res.c, one, nullptr);
        for (std::size_t p = 0; p < gl.size(); ++p) wg[p] += per_angle[l] * gl[p];
      }
      grad = wg;
    }
    for (std::size_t p = 0; p < grad.size(); ++p) res.c.coeffs[p] -= opt.eta * grad[p];
    for (double v : res.c.coeffs)
      if (!std::isfinite(v) || std::abs(v) > opt.divergence_bound)
        throw NumericError("iterate diverged at iteration " + std::to_string(t));
  }
  res.history.push_back(objective_total(res.c, ctxs));
  return res;
}

FourierSurface continuation_invert(const std::vector<StageRecords>& stages,
                                   const FourierSurface& c_init,
                                   const Schedule& schedule,
                                   const ContinuationParams& params,
                                   ContinuationTrace* trace,
                                   std::size_t first_stage) {
  if (stages.size() != schedule.size()) throw DataError("stage data does not cover the schedule");
  FourierSurface c = c_init;
  for (std::size_t j = first_stage; j < schedule.size(); ++j) {
    const Stage& st = schedule[j];
    if (std::abs(stages[j].kappa - st.kappa) > 1e-12)
      throw DataError("stage wavenumber mismatch against the schedule");
    if (stages[j].fields.empty()) throw DataError("stage has no angle records");
    std::vector<AngleContext> ctxs;
    for (const FieldSamples& f : stages[j].fields) {
      SpectralData sd = make_spectral_data(f, params.trunc, params.gamma);
      ctxs.push_back(make_angle_context(sd, params.nq));
    }
    c = zero_pad(c, st.kmax);
    LandweberOptions opt;
    opt.eta = params.eta_scale / st.kappa;
    opt.iterations = params.iterations;
    opt.weighted = params.weighted;
    opt.early_stop = params.early_stop;
    LandweberResult r = landweber_run(c, ctxs, opt);
    c = r.c;
    if (trace) trace->stage_history.push_back(std::move(r.history));
  }
  return c;
}

}  // namespace usim
