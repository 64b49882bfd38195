#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "usim/common.hpp"
#include "usim/dataset.hpp"
#include "usim/mcstats.hpp"
#include "usim/presets.hpp"

using namespace usim;

namespace {

McSampleResult ok_sample(std::vector<double> c) {
  McSampleResult s;
  s.ok = true;
  s.coeffs = std::move(c);
  return s;
}

McSampleResult bad_sample() {
  McSampleResult s;
  s.ok = false;
  s.error = "synthetic failure";
  return s;
}

// Rows proportional to a fixed pattern with per-row sign and magnitude; the
// row mean cancels when signed magnitudes sum to zero.
std::vector<std::vector<double>> signed_rows(const std::vector<double>& pattern,
                                             const std::vector<double>& scales) {
  std::vector<std::vector<double>> rows;
  for (double s : scales) {
    std::vector<double> r(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) r[i] = s * pattern[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

TEST_CASE("compute_stats averages converged samples only") {
  CoefficientEnsemble ens;
  ens.kmax = 1;
  ens.n0 = 4;
  ens.dx = two_pi / 4.0;
  ens.samples = {ok_sample({1.0, 0.5, 0.0}), bad_sample(),
                 ok_sample({3.0, -0.5, 0.0})};

  ReconstructionStats st = compute_stats(ens);
  REQUIRE(st.mean_coeffs.size() == 3);
  CHECK(st.mean_coeffs[0] == doctest::Approx(2.0));
  CHECK(st.mean_coeffs[1] == doctest::Approx(0.0));
  CHECK(st.mean_coeffs[2] == doctest::Approx(0.0));

  REQUIRE(st.xs.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(st.xs[i] == doctest::Approx(i * two_pi / 4.0));

  // fbar is the mean surface at the nodes, wrap row duplicated.
  for (std::size_t i = 0; i < 5; ++i) CHECK(st.fbar[i] == doctest::Approx(2.0));

  // Population covariance over the 2 converged samples. At x = 0 the two
  // profiles sit at 1.5 and 2.5, so c_00 = (0.5^2 + 0.5^2) / 2 = 0.25; at
  // x = pi/2 they sit at 1 and 3 (c = 1), at x = pi at 0.5 and 3.5 (c = 2.25).
  CHECK(st.cov_diag[0] == doctest::Approx(0.25));
  CHECK(st.cov_diag[1] == doctest::Approx(1.0));
  CHECK(st.cov_diag[2] == doctest::Approx(2.25));
  CHECK(st.cov_diag[3] == doctest::Approx(1.0));
  CHECK(st.cov_diag[4] == doctest::Approx(st.cov_diag[0]));

  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(st.h2[i] == doctest::Approx(st.cov_diag[i] / ens.dx));
    CHECK(st.habs[i] == doctest::Approx(std::sqrt(st.h2[i])));
  }
}

TEST_CASE("compute_stats guards degenerate ensembles") {
  CoefficientEnsemble ens;
  ens.kmax = 1;
  ens.n0 = 4;
  ens.dx = two_pi / 4.0;
  ens.samples = {bad_sample(), bad_sample()};
  CHECK_THROWS_AS(compute_stats(ens), NumericError);

  ens.samples = {ok_sample({1.0, 0.0, 0.0})};
  ens.n0 = 0;
  CHECK_THROWS_AS(compute_stats(ens), DataError);

  // A single converged sample yields no sign information.
  ens.n0 = 4;
  ReconstructionStats st = compute_stats(ens);
  REQUIRE(st.sign.sign.size() == 5);
  for (int v : st.sign.sign) CHECK(v == 0);
  for (std::size_t i = 0; i < 5; ++i) CHECK(st.cov_diag[i] == doctest::Approx(0.0));
}

TEST_CASE("sign recovery splits clean clusters and orients the anchor") {
  std::vector<double> pattern = {1.0, 0.5, -0.3, -1.0, 0.2, -0.6};
  std::vector<std::vector<double>> rows =
      signed_rows(pattern, {1.0, 2.0, 3.0, -1.0, -2.0, -3.0});

  SignReport rep = sign_recovery(rows);
  REQUIRE(rep.sign.size() == pattern.size() + 1);
  CHECK(rep.sign.back() == rep.sign.front());
  CHECK(rep.plus + rep.minus == 6);
  CHECK(rep.other == 0);
  CHECK(rep.plus == 3);
  CHECK(rep.minus == 3);

  // Anchor node 0 must come out positive, fixing the global flip.
  CHECK(rep.sign[0] == 1);
  for (std::size_t i = 0; i < pattern.size(); ++i)
    CHECK(rep.sign[i] == (pattern[i] > 0 ? 1 : -1));

  // Negating every row leaves the consensus and the cluster sizes unchanged.
  for (auto& r : rows)
    for (double& v : r) v = -v;
  SignReport neg = sign_recovery(rows);
  for (std::size_t i = 0; i < rep.sign.size(); ++i) CHECK(neg.sign[i] == rep.sign[i]);
  CHECK(neg.plus == 3);
  CHECK(neg.minus == 3);
}

TEST_CASE("sign recovery re-orients when the anchor pattern is negative") {
  std::vector<double> pattern = {-1.0, 0.5, -0.3, 0.8};
  std::vector<std::vector<double>> rows =
      signed_rows(pattern, {1.0, 1.5, -1.0, -1.5});
  SignReport rep = sign_recovery(rows, 0.5, 0);
  CHECK(rep.sign[0] == 1);
  for (std::size_t i = 0; i < pattern.size(); ++i)
    CHECK(rep.sign[i] == (pattern[i] < 0 ? 1 : -1));
}

TEST_CASE("rows uncorrelated with the consensus land in the other bucket") {
  std::vector<double> pattern = {1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0};
  std::vector<std::vector<double>> rows =
      signed_rows(pattern, {1.0, 2.0, -1.0, -2.0});
  // Half-agreeing row: matches the pattern on one half, flips on the other.
  rows.push_back({1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0});
  SignReport rep = sign_recovery(rows, 0.9);
  CHECK(rep.plus == 2);
  CHECK(rep.minus == 2);
  CHECK(rep.other == 1);
}

TEST_CASE("sign recovery validates its inputs") {
  CHECK_THROWS_AS(sign_recovery({{1.0, 2.0}}), DataError);
  CHECK_THROWS_AS(sign_recovery({{}, {}}), DataError);
  CHECK_THROWS_AS(sign_recovery({{1.0, 2.0}, {1.0}}), DataError);
  CHECK_THROWS_AS(sign_recovery({{1.0, 2.0}, {1.0, 2.0}}, 0.5, 2), ConfigError);

  // Identical rows have zero deviation everywhere: no sign survives.
  std::vector<std::vector<double>> flat = {{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
  bool threw = false;
  try {
    sign_recovery(flat);
  } catch (const NumericError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("ambiguous") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("monte carlo inversion over a small generated dataset") {
  RunConfig cfg = make_preset("ex1");
  cfg.samples = 6;
  cfg.init_samples = 3;
  cfg.schedule = {{2.0, 1}, {2.5, 2}};
  cfg.angles = angle_grid(3, pi / 3);
  cfg.nx = 64;
  cfg.iterations = 40;
  cfg.seed = 11;

  Dataset ds = generate_dataset(cfg);
  REQUIRE(ds.records.size() == 6 * 2 * 3);

  std::vector<ContinuationTrace> traces;
  CoefficientEnsemble ens = mcch_invert(ds, cfg, 1, false, &traces);
  CHECK(ens.kmax == 2);
  CHECK(ens.n0 == cfg.model.n0);
  CHECK(ens.init_count == 3);
  CHECK(ens.dx == doctest::Approx(two_pi / double(cfg.model.n0)));
  REQUIRE(ens.samples.size() == 6);
  CHECK(ens.converged() == 6);
  REQUIRE(ens.warm_start.size() == 5);
  for (const auto& s : ens.samples) REQUIRE(s.coeffs.size() == 5);

  // Cold samples run both stages, warm ones only the last.
  REQUIRE(traces.size() == 6);
  for (std::size_t m = 0; m < 3; ++m) CHECK(traces[m].stage_history.size() == 2);
  for (std::size_t m = 3; m < 6; ++m) CHECK(traces[m].stage_history.size() == 1);

  // The warm start is the mean of the cold solutions, padded to final kmax.
  double c0 = 0.0;
  for (std::size_t m = 0; m < 3; ++m) c0 += ens.samples[m].coeffs[0];
  c0 /= 3.0;
  CHECK(ens.warm_start[0] == doctest::Approx(c0).epsilon(1e-14));

  // warm_all_stages runs the full continuation for every sample.
  std::vector<ContinuationTrace> traces_all;
  CoefficientEnsemble all = mcch_invert(ds, cfg, 1, true, &traces_all);
  for (std::size_t m = 0; m < 6; ++m)
    CHECK(traces_all[m].stage_history.size() == 2);
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t p = 0; p < 5; ++p)
      CHECK(all.samples[m].coeffs[p] == ens.samples[m].coeffs[p]);

  // Deterministic and worker-count independent.
  CoefficientEnsemble again = mcch_invert(ds, cfg, 3, false);
  for (std::size_t m = 0; m < 6; ++m)
    for (std::size_t p = 0; p < 5; ++p)
      CHECK(again.samples[m].coeffs[p] == ens.samples[m].coeffs[p]);

  ReconstructionStats st = compute_stats(ens);
  CHECK(st.mean_coeffs.size() == 5);
  CHECK(st.xs.size() == cfg.model.n0 + 1);
  CHECK(st.sign.plus + st.sign.minus + st.sign.other == 6);
}

TEST_CASE("monte carlo inversion rejects broken configurations") {
  RunConfig cfg = make_preset("ex1");
  cfg.samples = 2;
  cfg.init_samples = 2;
  cfg.angles = angle_grid(2, pi / 3);
  cfg.nx = 64;
  cfg.iterations = 5;
  Dataset ds = generate_dataset(cfg);

  RunConfig broken = cfg;
  broken.init_samples = 0;
  CHECK_THROWS_AS(mcch_invert(ds, broken), ConfigError);

  Dataset empty;
  empty.header = ds.header;
  empty.header.samples = 0;
  empty.records.clear();
  CHECK_THROWS_AS(mcch_invert(empty, cfg), DataError);

  // A runaway step makes every cold sample diverge.
  RunConfig runaway = cfg;
  runaway.eta_scale = 1e6;
  bool threw = false;
  try {
    mcch_invert(ds, runaway);
  } catch (const NumericError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("failed to converge") != std::string::npos);
  }
  CHECK(threw);
}
