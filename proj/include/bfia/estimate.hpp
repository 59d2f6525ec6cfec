// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bfia/channel.hpp"
#include "bfia/detect.hpp"
#include "bfia/rng.hpp"
#include "bfia/types.hpp"

namespace bfia {

enum class VarianceMode { KnownSigma, EstimatedShared };

struct EmConfig {
  int components = 1;
  int max_iters = 200;
  double loglik_tol = 1e-8;  // relative improvement threshold
  VarianceMode variance_mode = VarianceMode::KnownSigma;
  double sigma2 = 1.0;  // component variance when KnownSigma
  int restarts = 5;
  std::uint64_t seed = 0;
};

/// Farthest-point seeding plus a few Lloyd refinement passes; deterministic
/// for a given rng state.
std::vector<cplx> cluster_init(std::span<const cplx> samples, int k, Rng& rng);

struct EmResult {
  GmmPdf pdf;
  std::vector<double> loglik;  // one entry per E step of the winning restart
  int iters = 0;
  bool clamped_variance = false;
};

/// Equal-weight complex GMM fit: means always re-estimated, the shared
/// variance either pinned to sigma2 or re-estimated. Best of `restarts`
/// independently initialized runs wins.
EmResult em_fit_gmm(std::span<const cplx> samples, const EmConfig& cfg);

/// Picks a component count by BIC over k = 1..k_max (the cluster-count
/// heuristic used when the interferer alphabets are not assumed known).
int choose_component_count(std::span<const cplx> samples, int k_max, const EmConfig& base);

/// Composite interference-plus-noise density for one receiver, estimated
/// entirely from received samples: each interferer's mixture is fitted on the
/// dimension only it occupies, then the per-interferer mixtures are combined
/// by the mean set-sum with the single shared noise variance. SISO layouts
/// only. Component count per interferer is |alphabet|^d, or BIC-chosen when
/// auto_components is set.
GmmPdf estimate_interference_pdf(const std::vector<ReceivedBlock>& blocks, int receiver,
                                 const Scenario& s, const PrecoderSet& p,
                                 const Constellation& alphabet,
                                 std::optional<double> sigma2, const EmConfig& base,
                                 int min_samples = 100, bool auto_components = false,
                                 std::size_t cap = kDefaultMixtureCap);

/// Genie counterpart of estimate_interference_pdf built from the true channel
/// gains and unitaries; the reference the blind estimate converges to.
GmmPdf exact_interference_pdf(const ChannelRealization& ch, const PrecoderSet& p,
                              int receiver, const Constellation& alphabet,
                              std::size_t cap = kDefaultMixtureCap);

/// Hausdorff distance between two mean sets (max over nearest-neighbor
/// distances, both directions).
double mean_set_hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b);

struct CovEstimate {
  CMat cov;
  int sample_count = 0;
  double regularization = 0.0;
};

/// Interference-plus-noise covariance from received samples. The dimensions
/// where the desired signal is absent are averaged as outer products; the
/// remaining entries follow from the known selection layout (unitary rows
/// have unit norm, so a mixed dimension carries sigma2 plus the sum of the
/// measured per-interferer powers) and block stationarity. Hermitian by
/// construction and diagonally regularized.
CovEstimate estimate_covariance(const std::vector<ReceivedBlock>& blocks, int receiver,
                                const Scenario& s, const PrecoderSet& p, double sigma2);

}  // namespace bfia
