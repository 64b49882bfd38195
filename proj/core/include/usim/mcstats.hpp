#pragma once

#include <string>
#include <vector>

#include "usim/dataset.hpp"
#include "usim/inversion.hpp"

namespace usim {

struct McSampleResult {
  bool ok = false;
  std::vector<double> coeffs;  // final-stage coefficients, 2 kmax + 1
  std::string error;           // failure reason when not ok
};

// Per-sample inversion results for a whole dataset. The first init_count
// samples run the full continuation from the flat profile at y0; the mean of
// their solutions seeds the remaining samples, which by default run only the
// final stage.
struct CoefficientEnsemble {
  int kmax = 0;
  std::size_t n0 = 0;
  double y0 = 0.0;
  double dx = 0.0;
  std::size_t init_count = 0;
  std::vector<double> warm_start;
  std::vector<McSampleResult> samples;

  std::size_t converged() const;
};

CoefficientEnsemble mcch_invert(const Dataset& ds, const RunConfig& cfg,
                                std::size_t workers = 1,
                                bool warm_all_stages = false,
                                std::vector<ContinuationTrace>* traces = nullptr);

struct SignReport {
  std::vector<int> sign;  // n0 + 1 entries, last duplicates the first
  std::size_t plus = 0, minus = 0, other = 0;
};

// Recovers the common sign pattern of the per-sample deviations from the
// ensemble mean. Each row holds one sample's profile at the n0 surface nodes.
// Rows are reduced to sign vectors, aligned by flipping against a running
// consensus seeded from the largest-deviation sample, and clustered by
// correlation with the final consensus. The result is oriented so the anchor
// node carries a positive sign.
SignReport sign_recovery(const std::vector<std::vector<double>>& node_values,
                         double corr_threshold = 0.5, std::size_t anchor = 0);

struct ReconstructionStats {
  std::vector<double> mean_coeffs;
  std::vector<double> xs;        // n0 + 1 node positions, wrap included
  std::vector<double> fbar;      // mean profile at the nodes
  std::vector<double> cov_diag;  // c_ii, population covariance diagonal
  std::vector<double> h2;        // c_ii / dx
  std::vector<double> habs;      // sqrt of h2
  SignReport sign;
};

// Mean and covariance-diagonal estimators over the converged samples, plus
// the recovered sign pattern of the deviations.
ReconstructionStats compute_stats(const CoefficientEnsemble& ens,
                                  double corr_threshold = 0.5,
                                  std::size_t anchor = 0);

}  // namespace usim
