// SPDX-License-Identifier: Apache-2.0

#include "bfia/detect.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bfia/errors.hpp"

namespace bfia {

double GmmPdf::log_eval(cplx z) const {
  if (means.empty()) throw param_error("mixture with no components");
  if (!(variance > 0.0)) throw param_error("mixture variance must be > 0");
  // Streaming max-shifted log-sum-exp keeps every input finite.
  double mx = -std::numeric_limits<double>::infinity();
  double s = 0.0;
  const double inv = 1.0 / variance;
  for (const cplx& m : means) {
    const double t = -std::norm(z - m) * inv;
    if (t <= mx) {
      s += std::exp(t - mx);
    } else {
      s = s * std::exp(mx - t) + 1.0;
      mx = t;
    }
  }
  return mx + std::log(s) - std::log(static_cast<double>(means.size())) -
         std::log(kPi * variance);
}

double GmmPdf::eval(cplx z) const { return std::exp(log_eval(z)); }

GmmPdf gmm_sum(const GmmPdf& a, const GmmPdf& b, std::size_t cap) {
  if (a.means.empty() || b.means.empty()) throw param_error("mixture with no components");
  const double rel =
      std::abs(a.variance - b.variance) / std::max({a.variance, b.variance, 1e-300});
  if (rel > 1e-6)
    throw param_error("set-sum requires matching component variances (one shared noise)");
  if (b.means.size() == 0 || a.means.size() > cap / b.means.size())
    throw search_space_error("mixture set-sum size " + std::to_string(a.means.size()) + "*" +
                             std::to_string(b.means.size()) + " exceeds cap " +
                             std::to_string(cap));
  GmmPdf out;
  out.variance = a.variance;
  out.means.reserve(a.means.size() * b.means.size());
  for (const cplx& x : a.means)
    for (const cplx& y : b.means) out.means.push_back(x + y);
  return out;
}

std::string detector_name(DetectorKind k) {
  switch (k) {
    case DetectorKind::MdKnown: return "md-known";
    case DetectorKind::MdEstimated: return "md-est";
    case DetectorKind::MlFullCsir: return "ml-known";
    case DetectorKind::MlBlindMarginal: return "ml-blind";
  }
  return "?";
}

DetectorKind parse_detector(const std::string& name) {
  if (name == "md-known") return DetectorKind::MdKnown;
  if (name == "md-est") return DetectorKind::MdEstimated;
  if (name == "ml-known") return DetectorKind::MlFullCsir;
  if (name == "ml-blind") return DetectorKind::MlBlindMarginal;
  throw param_error("unknown detector '" + name +
                    "' (expected md-known|md-est|ml-known|ml-blind)");
}

std::vector<DetectorKind> parse_detector_list(const std::string& csv) {
  std::vector<DetectorKind> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const DetectorKind k = parse_detector(tok);
    bool dup = false;
    for (DetectorKind seen : out) dup = dup || seen == k;
    if (!dup) out.push_back(k);
  }
  if (out.empty()) throw param_error("empty detector list");
  return out;
}

MdDetector::MdDetector(const CMat& desired, const CMat& cov,
                       const std::vector<CVec>& candidates) {
  if (cov.rows() != cov.cols() || cov.rows() != desired.rows())
    throw param_error("covariance/desired dimension mismatch");
  if (candidates.empty()) throw param_error("empty candidate list");
  llt_.compute(cov);
  if (llt_.info() != Eigen::Success)
    throw numeric_error("interference covariance is not positive definite; "
                        "keep a noise floor (sigma2 > 0)");
  images_.reserve(candidates.size());
  for (const CVec& x : candidates)
    images_.push_back(llt_.matrixL().solve(desired * x));
}

int MdDetector::detect(const CVec& y) const {
  const CVec w = llt_.matrixL().solve(y);
  int best = 0;
  double best_d = (w - images_[0]).squaredNorm();
  for (std::size_t c = 1; c < images_.size(); ++c) {
    const double dd = (w - images_[c]).squaredNorm();
    if (dd < best_d) {
      best_d = dd;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::pair<CVec, int> md_detect(const CVec& y, const CMat& desired, const CMat& cov,
                               const std::vector<CVec>& candidates) {
  MdDetector det(desired, cov, candidates);
  const int idx = det.detect(y);
  return {candidates[idx], idx};
}

MlFullDetector::MlFullDetector(const ChannelRealization& ch, const PrecoderSet& p,
                               const std::vector<Constellation>& alphabets, int receiver,
                               std::size_t cap) {
  const Scenario& s = ch.scenario;
  if (static_cast<int>(alphabets.size()) != s.users)
    throw param_error("need one alphabet per user");
  if (receiver < 0 || receiver >= s.users) throw param_error("receiver index out of range");
  sigma2_ = ch.sigma2;
  const int d = p.streams();
  candidates_ = enumerate_vectors(alphabets[receiver], d, cap);
  const CMat a = effective_matrix(ch, p, receiver, receiver);
  desired_images_.reserve(candidates_.size());
  for (const CVec& x : candidates_) desired_images_.push_back(a * x);

  interference_sums_.assign(1, CVec(CVec::Zero(s.rx_dims())));
  for (int tx = 0; tx < s.users; ++tx) {
    if (tx == receiver) continue;
    const CMat b = effective_matrix(ch, p, receiver, tx);
    const auto vecs = enumerate_vectors(alphabets[tx], d, cap);
    if (interference_sums_.size() > cap / vecs.size())
      throw search_space_error("ML joint hypothesis count exceeds cap " +
                               std::to_string(cap));
    std::vector<CVec> grown;
    grown.reserve(interference_sums_.size() * vecs.size());
    for (const CVec& base : interference_sums_)
      for (const CVec& x : vecs) grown.push_back(base + b * x);
    interference_sums_ = std::move(grown);
  }
}

int MlFullDetector::detect(const CVec& y) const {
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  const double inv = 1.0 / sigma2_;
  for (std::size_t c = 0; c < desired_images_.size(); ++c) {
    const CVec r = y - desired_images_[c];
    double mx = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (const CVec& z : interference_sums_) {
      const double t = -(r - z).squaredNorm() * inv;
      if (t <= mx) {
        s += std::exp(t - mx);
      } else {
        s = s * std::exp(mx - t) + 1.0;
        mx = t;
      }
    }
    const double ll = mx + std::log(s);
    if (ll > best_ll) {
      best_ll = ll;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::pair<CVec, int> ml_detect_full(const CVec& y, const ChannelRealization& ch,
                                    const PrecoderSet& p,
                                    const std::vector<Constellation>& alphabets,
                                    int receiver, std::size_t cap) {
  MlFullDetector det(ch, p, alphabets, receiver, cap);
  const int idx = det.detect(y);
  return {det.candidates()[idx], idx};
}

std::vector<DimPdf> blind_dim_map(const ReceiverDims& dims, const GmmPdf& noise,
                                  const GmmPdf& interference) {
  std::vector<DimPdf> map;
  map.push_back({dims.own, &noise});
  for (int g : dims.mixed) map.push_back({g, &interference});
  return map;
}

MarginalProductDetector::MarginalProductDetector(const CMat& desired,
                                                 std::vector<DimPdf> dims,
                                                 const std::vector<CVec>& candidates)
    : dims_(std::move(dims)) {
  if (dims_.empty()) throw param_error("marginal-product detector needs at least one dim");
  if (candidates.empty()) throw param_error("empty candidate list");
  int multi = 0;
  for (const DimPdf& dp : dims_) {
    if (dp.pdf == nullptr)
      throw param_error("missing pdf for dimension " + std::to_string(dp.dim));
    if (dp.dim < 0 || dp.dim >= desired.rows())
      throw param_error("dim map index out of range");
    if (dp.pdf->means.size() > 1) ++multi;
  }
  // Interference spread over several scored dims makes the product a
  // marginal-independence approximation.
  approximate_ = multi > 1;
  proj_.resize(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    proj_[c].resize(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k)
      proj_[c][k] = desired.row(dims_[k].dim) * candidates[c];
  }
}

int MarginalProductDetector::detect(const CVec& y) const {
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < proj_.size(); ++c) {
    double ll = 0.0;
    for (std::size_t k = 0; k < dims_.size(); ++k)
      ll += dims_[k].pdf->log_eval(y(dims_[k].dim) - proj_[c][k]);
    if (ll > best_ll) {
      best_ll = ll;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::pair<CVec, int> ml_detect_blind_marginal(const CVec& y, const CMat& desired,
                                              const std::vector<DimPdf>& dims,
                                              const std::vector<CVec>& candidates) {
  MarginalProductDetector det(desired, dims, candidates);
  const int idx = det.detect(y);
  return {candidates[idx], idx};
}

}  // namespace bfia
