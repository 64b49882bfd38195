#include "usim/mcstats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "usim/parallel.hpp"

namespace usim {

namespace {

constexpr double max_failure_fraction = 0.05;

std::vector<double> resized_coeffs(const std::vector<double>& c, int kmax) {
  std::vector<double> out(2 * static_cast<std::size_t>(kmax) + 1, 0.0);
  std::size_t n = std::min(out.size(), c.size());
  std::copy(c.begin(), c.begin() + n, out.begin());
  return out;
}

int sgn(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

std::size_t CoefficientEnsemble::converged() const {
  std::size_t n = 0;
  for (const auto& s : samples) n += s.ok ? 1 : 0;
  return n;
}

CoefficientEnsemble mcch_invert(const Dataset& ds, const RunConfig& cfg,
                                std::size_t workers, bool warm_all_stages,
                                std::vector<ContinuationTrace>* traces) {
  const DatasetHeader& h = ds.header;
  if (h.samples == 0) throw DataError("dataset has no samples");
  if (cfg.init_samples == 0) throw ConfigError("cold-start sample count is zero");
  if (cfg.gamma <= 0.0)
    throw ConfigError("regularization parameter must be positive");

  ContinuationParams params;
  params.gamma = cfg.gamma;
  params.trunc = cfg.truncation;
  params.nq = cfg.nq;
  params.iterations = cfg.iterations;
  params.eta_scale = cfg.eta_scale;
  params.weighted = cfg.weighted_update;

  CoefficientEnsemble ens;
  ens.kmax = h.schedule.back().kmax;
  ens.n0 = h.n0;
  ens.y0 = h.y0;
  ens.dx = period / static_cast<double>(h.n0);
  ens.init_count = std::min<std::size_t>(cfg.init_samples, h.samples);
  ens.samples.resize(h.samples);
  if (traces) traces->assign(h.samples, {});

  auto run_sample = [&](std::size_t m, const FourierSurface& c0,
                        std::size_t first_stage) {
    McSampleResult& slot = ens.samples[m];
    try {
      auto stages = sample_stages(ds, m);
      ContinuationTrace* tr = traces ? &(*traces)[m] : nullptr;
      FourierSurface c =
          continuation_invert(stages, c0, h.schedule, params, tr, first_stage);
      slot.coeffs = c.coeffs;
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.ok = false;
      slot.error = e.what();
    }
  };

  FourierSurface flat{0, {h.y0}};
  parallel_for(ens.init_count, workers,
               [&](std::size_t m) { run_sample(m, flat, 0); });

  std::vector<double> mean(2 * static_cast<std::size_t>(ens.kmax) + 1, 0.0);
  std::size_t cold_ok = 0;
  for (std::size_t m = 0; m < ens.init_count; ++m) {
    if (!ens.samples[m].ok) continue;
    ++cold_ok;
    for (std::size_t p = 0; p < mean.size(); ++p)
      mean[p] += ens.samples[m].coeffs[p];
  }
  if (cold_ok == 0)
    throw NumericError("every cold-start sample failed to converge");
  for (double& v : mean) v /= static_cast<double>(cold_ok);
  ens.warm_start = mean;

  if (ens.init_count < h.samples) {
    std::size_t first_stage = warm_all_stages ? 0 : h.schedule.size() - 1;
    int start_kmax =
        warm_all_stages ? h.schedule.front().kmax : h.schedule.back().kmax;
    FourierSurface warm{start_kmax, resized_coeffs(mean, start_kmax)};
    std::size_t rest = h.samples - ens.init_count;
    parallel_for(rest, workers, [&](std::size_t i) {
      run_sample(ens.init_count + i, warm, first_stage);
    });
  }

  std::size_t failed = h.samples - ens.converged();
  if (static_cast<double>(failed) >
      max_failure_fraction * static_cast<double>(h.samples)) {
    std::ostringstream msg;
    msg << failed << " of " << h.samples << " samples failed to converge";
    throw NumericError(msg.str());
  }
  return ens;
}

SignReport sign_recovery(const std::vector<std::vector<double>>& node_values,
                         double corr_threshold, std::size_t anchor) {
  std::size_t mcount = node_values.size();
  if (mcount < 2) throw DataError("sign recovery needs at least two samples");
  std::size_t n = node_values.front().size();
  if (n == 0) throw DataError("sign recovery got empty rows");
  for (const auto& row : node_values)
    if (row.size() != n) throw DataError("sign recovery rows differ in length");
  if (anchor >= n) throw ConfigError("anchor node index out of range");

  std::vector<double> fbar(n, 0.0);
  for (const auto& row : node_values)
    for (std::size_t i = 0; i < n; ++i) fbar[i] += row[i];
  for (double& v : fbar) v /= static_cast<double>(mcount);

  std::vector<std::vector<int>> sigma(mcount, std::vector<int>(n));
  std::vector<double> dev_norm(mcount, 0.0);
  for (std::size_t m = 0; m < mcount; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      double d = node_values[m][i] - fbar[i];
      sigma[m][i] = sgn(d);
      dev_norm[m] += d * d;
    }
  }

  std::size_t ref = static_cast<std::size_t>(
      std::max_element(dev_norm.begin(), dev_norm.end()) - dev_norm.begin());

  std::vector<double> running(sigma[ref].begin(), sigma[ref].end());
  for (std::size_t m = 0; m < mcount; ++m) {
    if (m == ref) continue;
    double ip = 0.0;
    for (std::size_t i = 0; i < n; ++i) ip += sigma[m][i] * running[i];
    double flip = ip < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) running[i] += flip * sigma[m][i];
  }

  std::vector<int> consensus(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    consensus[i] = sgn(running[i]);
    any = any || consensus[i] != 0;
  }
  if (!any) throw NumericError("sign consensus is ambiguous");

  std::size_t a = anchor;
  while (consensus[a] == 0) {
    a = (a + 1) % n;
    if (a == anchor) break;
  }
  if (consensus[a] < 0)
    for (int& v : consensus) v = -v;

  double cons_norm = 0.0;
  for (int v : consensus) cons_norm += v * v;
  cons_norm = std::sqrt(cons_norm);

  SignReport rep;
  for (std::size_t m = 0; m < mcount; ++m) {
    double ip = 0.0, sn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ip += sigma[m][i] * consensus[i];
      sn += sigma[m][i] * sigma[m][i];
    }
    sn = std::sqrt(sn);
    if (sn == 0.0 || cons_norm == 0.0) {
      ++rep.other;
      continue;
    }
    double corr = ip / (sn * cons_norm);
    if (corr >= corr_threshold)
      ++rep.plus;
    else if (corr <= -corr_threshold)
      ++rep.minus;
    else
      ++rep.other;
  }

  rep.sign = std::move(consensus);
  rep.sign.push_back(rep.sign.front());
  return rep;
}

ReconstructionStats compute_stats(const CoefficientEnsemble& ens,
                                  double corr_threshold, std::size_t anchor) {
  std::size_t mcount = ens.converged();
  if (mcount == 0) throw NumericError("no converged samples to average");
  if (ens.n0 == 0) throw DataError("ensemble has no node grid");

  std::size_t dim = 2 * static_cast<std::size_t>(ens.kmax) + 1;
  ReconstructionStats st;
  st.mean_coeffs.assign(dim, 0.0);
  for (const auto& s : ens.samples) {
    if (!s.ok) continue;
    for (std::size_t p = 0; p < dim; ++p) st.mean_coeffs[p] += s.coeffs[p];
  }
  for (double& v : st.mean_coeffs) v /= static_cast<double>(mcount);

  std::size_t n = ens.n0;
  st.xs.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    st.xs[i] = ens.dx * static_cast<double>(i);

  std::vector<std::vector<double>> values;
  values.reserve(mcount);
  for (const auto& s : ens.samples) {
    if (!s.ok) continue;
    FourierSurface c{ens.kmax, s.coeffs};
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = c.eval(st.xs[i]);
    values.push_back(std::move(row));
  }

  FourierSurface cbar{ens.kmax, st.mean_coeffs};
  st.fbar.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) st.fbar[i] = cbar.eval(st.xs[i]);
  st.fbar[n] = st.fbar[0];

  st.cov_diag.assign(n + 1, 0.0);
  for (const auto& row : values)
    for (std::size_t i = 0; i < n; ++i) {
      double d = row[i] - st.fbar[i];
      st.cov_diag[i] += d * d;
    }
  for (std::size_t i = 0; i < n; ++i)
    st.cov_diag[i] /= static_cast<double>(mcount);
  st.cov_diag[n] = st.cov_diag[0];

  st.h2.resize(n + 1);
  st.habs.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    st.h2[i] = st.cov_diag[i] / ens.dx;
    st.habs[i] = std::sqrt(std::max(st.h2[i], 0.0));
  }

  if (mcount >= 2)
    st.sign = sign_recovery(values, corr_threshold, anchor);
  else
    st.sign.sign.assign(n + 1, 0);
  return st;
}

}  // namespace usim
