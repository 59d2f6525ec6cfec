// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bfia/channel.hpp"
#include "bfia/constellation.hpp"
#include "bfia/precoder.hpp"
#include "bfia/types.hpp"

namespace bfia {

inline constexpr std::size_t kDefaultMixtureCap = std::size_t{1} << 20;

/// Equal-weight complex Gaussian mixture with one shared component variance;
/// models interference-plus-noise on a single receive dimension. A pure-noise
/// density is the single-component mixture with mean zero.
struct GmmPdf {
  std::vector<cplx> means;
  double variance = 1.0;

  double log_eval(cplx z) const;
  double eval(cplx z) const;
};

/// Mixture of the sum of two independent mixture-distributed terms that share
/// one noise realization: means are all pairwise sums, variance stays at the
/// single shared noise variance.
GmmPdf gmm_sum(const GmmPdf& a, const GmmPdf& b, std::size_t cap = kDefaultMixtureCap);

enum class DetectorKind { MdKnown, MdEstimated, MlFullCsir, MlBlindMarginal };
inline constexpr int kDetectorCount = 4;

std::string detector_name(DetectorKind k);
DetectorKind parse_detector(const std::string& name);
std::vector<DetectorKind> parse_detector_list(const std::string& csv);

/// Minimum-distance detection under a colored-Gaussian interference model:
/// argmin over candidates of (y - A x)^H R^{-1} (y - A x), where A is the
/// desired-signal matrix H_ii Q_i. R is factorized once; ties break to the
/// lowest candidate index.
class MdDetector {
 public:
  MdDetector(const CMat& desired, const CMat& cov, const std::vector<CVec>& candidates);
  int detect(const CVec& y) const;

 private:
  Eigen::LLT<CMat> llt_;
  std::vector<CVec> images_;  // whitened A x per candidate
};

std::pair<CVec, int> md_detect(const CVec& y, const CMat& desired, const CMat& cov,
                               const std::vector<CVec>& candidates);

/// Genie ML detection with full CSIR: the likelihood of each desired
/// candidate is marginalized over all interferer symbol combinations
/// (uniform priors), accumulated in the log domain.
class MlFullDetector {
 public:
  MlFullDetector(const ChannelRealization& ch, const PrecoderSet& p,
                 const std::vector<Constellation>& alphabets, int receiver,
                 std::size_t cap = kDefaultEnumCap);
  int detect(const CVec& y) const;
  const std::vector<CVec>& candidates() const { return candidates_; }

 private:
  double sigma2_ = 1.0;
  std::vector<CVec> candidates_;         // desired user's symbol vectors
  std::vector<CVec> desired_images_;     // A x per candidate
  std::vector<CVec> interference_sums_;  // one per joint interferer combination
};

std::pair<CVec, int> ml_detect_full(const CVec& y, const ChannelRealization& ch,
                                    const PrecoderSet& p,
                                    const std::vector<Constellation>& alphabets,
                                    int receiver, std::size_t cap = kDefaultEnumCap);

/// One scored dimension of the marginal-product detector: the receive index
/// and the density of whatever rides on top of the desired signal there.
struct DimPdf {
  int dim = 0;
  const GmmPdf* pdf = nullptr;
};

/// Builds the dim map for the completely blind detector: the receiver's own
/// group-1 dimension is scored against the noise density, every shared
/// group-2 dimension against the composite interference density. Dimensions
/// carrying only foreign interference are skipped (their precoders are
/// unknown without I-CSIR).
std::vector<DimPdf> blind_dim_map(const ReceiverDims& dims, const GmmPdf& noise,
                                  const GmmPdf& interference);

/// Completely blind ML: argmax over candidates of the product of per-dim
/// marginal densities of the residual y[dim] - (A x)[dim]. With more than one
/// mixed dimension the product is the independence approximation, flagged via
/// approximate().
class MarginalProductDetector {
 public:
  MarginalProductDetector(const CMat& desired, std::vector<DimPdf> dims,
                          const std::vector<CVec>& candidates);
  int detect(const CVec& y) const;
  bool approximate() const { return approximate_; }

 private:
  std::vector<DimPdf> dims_;
  std::vector<std::vector<cplx>> proj_;  // [candidate][dim] desired projection
  bool approximate_ = false;
};

std::pair<CVec, int> ml_detect_blind_marginal(const CVec& y, const CMat& desired,
                                              const std::vector<DimPdf>& dims,
                                              const std::vector<CVec>& candidates);

}  // namespace bfia
