// SPDX-License-Identifier: Apache-2.0

#include "bfia/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bfia/errors.hpp"
#include "bfia/rotations.hpp"

namespace bfia {

std::vector<cplx> cluster_init(std::span<const cplx> samples, int k, Rng& rng) {
  const int n = static_cast<int>(samples.size());
  if (k < 1) throw param_error("cluster count must be >= 1");
  if (n < k) throw estimation_error("fewer samples (" + std::to_string(n) +
                                    ") than clusters (" + std::to_string(k) + ")");
  std::vector<cplx> centers;
  centers.reserve(k);
  centers.push_back(samples[rng.below(static_cast<std::uint32_t>(n))]);
  std::vector<double> dist(n);
  for (int t = 0; t < n; ++t) dist[t] = std::norm(samples[t] - centers[0]);
  while (static_cast<int>(centers.size()) < k) {
    const int far =
        static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    centers.push_back(samples[far]);
    for (int t = 0; t < n; ++t)
      dist[t] = std::min(dist[t], std::norm(samples[t] - centers.back()));
  }
  // Lloyd refinement; empty clusters keep their center.
  std::vector<cplx> sum(k);
  std::vector<int> cnt(k);
  for (int pass = 0; pass < 5; ++pass) {
    std::fill(sum.begin(), sum.end(), cplx{});
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int t = 0; t < n; ++t) {
      int best = 0;
      double bd = std::norm(samples[t] - centers[0]);
      for (int m = 1; m < k; ++m) {
        const double dd = std::norm(samples[t] - centers[m]);
        if (dd < bd) {
          bd = dd;
          best = m;
        }
      }
      sum[best] += samples[t];
      cnt[best] += 1;
    }
    for (int m = 0; m < k; ++m)
      if (cnt[m] > 0) centers[m] = sum[m] / static_cast<double>(cnt[m]);
  }
  return centers;
}

namespace {

constexpr double kVarianceFloor = 1e-12;

struct EmRun {
  std::vector<cplx> means;
  double variance = 1.0;
  std::vector<double> loglik;
  int iters = 0;
  bool clamped = false;
};

EmRun run_em_once(std::span<const cplx> samples, const EmConfig& cfg, Rng& rng) {
  const int n = static_cast<int>(samples.size());
  const int k = cfg.components;
  EmRun run;
  run.means = cluster_init(samples, k, rng);
  if (cfg.variance_mode == VarianceMode::KnownSigma) {
    run.variance = cfg.sigma2;
  } else {
    // Start from the scatter about the nearest initial mean.
    double acc = 0.0;
    for (int t = 0; t < n; ++t) {
      double bd = std::numeric_limits<double>::infinity();
      for (int m = 0; m < k; ++m) bd = std::min(bd, std::norm(samples[t] - run.means[m]));
      acc += bd;
    }
    run.variance = std::max(acc / n, kVarianceFloor);
  }

  std::vector<double> resp(static_cast<std::size_t>(n) * k);
  std::vector<double> wsum(k);
  std::vector<cplx> msum(k);
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iters; ++it) {
    // E step and log-likelihood at the current parameters.
    double ll = 0.0;
    const double inv = 1.0 / run.variance;
    for (int t = 0; t < n; ++t) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int m = 0; m < k; ++m) {
        const double e = -std::norm(samples[t] - run.means[m]) * inv;
        resp[static_cast<std::size_t>(t) * k + m] = e;
        mx = std::max(mx, e);
      }
      double s = 0.0;
      for (int m = 0; m < k; ++m)
        s += std::exp(resp[static_cast<std::size_t>(t) * k + m] - mx);
      ll += mx + std::log(s);
      const double norm = 1.0 / s;
      for (int m = 0; m < k; ++m) {
        auto& r = resp[static_cast<std::size_t>(t) * k + m];
        r = std::exp(r - mx) * norm;
      }
    }
    ll += n * (-std::log(static_cast<double>(k)) - std::log(kPi * run.variance));
    run.loglik.push_back(ll);
    run.iters = it + 1;
    if (it > 0 && ll - prev <= cfg.loglik_tol * std::max(1.0, std::abs(prev))) break;
    prev = ll;

    // M step: means, then the shared variance if requested.
    std::fill(wsum.begin(), wsum.end(), 0.0);
    std::fill(msum.begin(), msum.end(), cplx{});
    for (int t = 0; t < n; ++t)
      for (int m = 0; m < k; ++m) {
        const double w = resp[static_cast<std::size_t>(t) * k + m];
        wsum[m] += w;
        msum[m] += w * samples[t];
      }
    for (int m = 0; m < k; ++m)
      if (wsum[m] > 1e-300) run.means[m] = msum[m] / wsum[m];
    if (cfg.variance_mode == VarianceMode::EstimatedShared) {
      double acc = 0.0;
      for (int t = 0; t < n; ++t)
        for (int m = 0; m < k; ++m)
          acc += resp[static_cast<std::size_t>(t) * k + m] *
                 std::norm(samples[t] - run.means[m]);
      run.variance = acc / n;
      if (run.variance < kVarianceFloor) {
        run.variance = kVarianceFloor;
        run.clamped = true;
      }
    }
  }
  return run;
}

}  // namespace

EmResult em_fit_gmm(std::span<const cplx> samples, const EmConfig& cfg) {
  if (cfg.components < 1) throw param_error("EM needs at least one component");
  if (static_cast<int>(samples.size()) < cfg.components)
    throw estimation_error("EM needs at least as many samples as components");
  if (cfg.variance_mode == VarianceMode::KnownSigma && !(cfg.sigma2 > 0.0))
    throw param_error("known sigma2 must be > 0");
  EmResult best;
  double best_ll = -std::numeric_limits<double>::infinity();
  const int restarts = std::max(1, cfg.restarts);
  for (int rs = 0; rs < restarts; ++rs) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(rs));
    EmRun run = run_em_once(samples, cfg, rng);
    if (run.loglik.back() > best_ll) {
      best_ll = run.loglik.back();
      best.pdf = GmmPdf{run.means, run.variance};
      best.loglik = std::move(run.loglik);
      best.iters = run.iters;
      best.clamped_variance = run.clamped;
    }
  }
  return best;
}

int choose_component_count(std::span<const cplx> samples, int k_max, const EmConfig& base) {
  const int n = static_cast<int>(samples.size());
  k_max = std::min(k_max, n);
  if (k_max < 1) throw estimation_error("no samples for component-count selection");
  int best_k = 1;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    EmConfig cfg = base;
    cfg.components = k;
    cfg.restarts = 1;
    cfg.max_iters = std::min(base.max_iters, 60);
    const EmResult fit = em_fit_gmm(samples, cfg);
    const double params =
        2.0 * k + (cfg.variance_mode == VarianceMode::EstimatedShared ? 1.0 : 0.0);
    const double bic = -2.0 * fit.loglik.back() + params * std::log(double(n));
    if (bic < best_bic) {
      best_bic = bic;
      best_k = k;
    }
  }
  return best_k;
}

namespace {

// gmm_sum requires one shared variance; fitted variances differ by sampling
// noise, so pin them all to a common value first.
GmmPdf combine_pdfs(std::vector<GmmPdf> parts, double variance, std::size_t cap) {
  for (auto& p : parts) p.variance = variance;
  GmmPdf out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = gmm_sum(out, parts[i], cap);
  return out;
}

}  // namespace

GmmPdf estimate_interference_pdf(const std::vector<ReceivedBlock>& blocks, int receiver,
                                 const Scenario& s, const PrecoderSet& p,
                                 const Constellation& alphabet,
                                 std::optional<double> sigma2, const EmConfig& base,
                                 int min_samples, bool auto_components, std::size_t cap) {
  const ReceiverDims dims = classify_dims(s, p, receiver);
  const int t_count = static_cast<int>(blocks.size());
  if (t_count < std::max(1, min_samples))
    throw estimation_error("insufficient samples for interference pdf: have " +
                           std::to_string(t_count) + ", need >= " +
                           std::to_string(std::max(1, min_samples)));
  if (dims.interference_only.empty()) {
    if (!sigma2) throw estimation_error("no interference-only dimension and no sigma2");
    return GmmPdf{{cplx{0.0, 0.0}}, *sigma2};
  }

  const int full_components =
      static_cast<int>(vector_count(alphabet, p.streams(), cap));
  std::vector<GmmPdf> parts;
  double var_acc = 0.0;
  for (auto [dim, user] : dims.interference_only) {
    std::vector<cplx> samp(t_count);
    for (int t = 0; t < t_count; ++t) samp[t] = blocks[t].received[receiver](dim);
    EmConfig cfg = base;
    cfg.variance_mode = sigma2 ? VarianceMode::KnownSigma : VarianceMode::EstimatedShared;
    if (sigma2) cfg.sigma2 = *sigma2;
    cfg.seed = substream_seed(base.seed, 0x9d0f00d0ULL + static_cast<std::uint64_t>(user));
    cfg.components = auto_components
                         ? choose_component_count(samp, std::min(2 * full_components, 64), cfg)
                         : full_components;
    const EmResult fit = em_fit_gmm(samp, cfg);
    var_acc += fit.pdf.variance;
    parts.push_back(fit.pdf);
  }
  const double variance = sigma2 ? *sigma2 : var_acc / parts.size();
  return combine_pdfs(std::move(parts), variance, cap);
}

GmmPdf exact_interference_pdf(const ChannelRealization& ch, const PrecoderSet& p,
                              int receiver, const Constellation& alphabet,
                              std::size_t cap) {
  const Scenario& s = ch.scenario;
  if (!s.siso()) throw param_error("exact marginal pdf is defined for SISO links only");
  std::vector<GmmPdf> parts;
  for (int tx = 0; tx < s.users; ++tx) {
    if (tx == receiver) continue;
    const Eigen::RowVectorXcd row = ch.gain(receiver, tx)(0, 0) * p.unitaries[tx].row(0);
    parts.push_back(GmmPdf{projection_multiset(row, alphabet, cap), ch.sigma2});
  }
  if (parts.empty()) return GmmPdf{{cplx{0.0, 0.0}}, ch.sigma2};
  return combine_pdfs(std::move(parts), ch.sigma2, cap);
}

double mean_set_hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.empty() || b.empty()) throw param_error("Hausdorff distance of an empty set");
  auto directed = [](const std::vector<cplx>& from, const std::vector<cplx>& to) {
    double worst = 0.0;
    for (const cplx& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const cplx& y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

CovEstimate estimate_covariance(const std::vector<ReceivedBlock>& blocks, int receiver,
                                const Scenario& s, const PrecoderSet& p, double sigma2) {
  if (blocks.empty()) throw estimation_error("no blocks to estimate a covariance from");
  if (!(sigma2 > 0.0)) throw param_error("sigma2 must be > 0");
  const ReceiverDims dims = classify_dims(s, p, receiver);
  const int nl = s.rx_dims();
  const int t_count = static_cast<int>(blocks.size());
  const auto& d0 = dims.interference_only;

  CMat cov = CMat::Zero(nl, nl);
  cov(dims.own, dims.own) = sigma2;
  for (int idle : dims.idle) cov(idle, idle) = sigma2;

  // Sample outer products on the desired-free dimensions.
  CMat sub = CMat::Zero(d0.size(), d0.size());
  if (!d0.empty()) {
    CVec r(d0.size());
    for (int t = 0; t < t_count; ++t) {
      for (std::size_t a = 0; a < d0.size(); ++a)
        r(a) = blocks[t].received[receiver](d0[a].first);
      sub += r * r.adjoint();
    }
    sub /= static_cast<double>(t_count);
    for (std::size_t a = 0; a < d0.size(); ++a)
      for (std::size_t b = 0; b < d0.size(); ++b)
        cov(d0[a].first, d0[b].first) = sub(a, b);
  }

  // Mixed dimensions: sigma2 plus every interferer's measured power. Unitary
  // rows have unit norm, so the group-1 power transfers unchanged.
  double interf_power = 0.0;
  for (std::size_t a = 0; a < d0.size(); ++a)
    interf_power += std::max(sub(a, a).real() - sigma2, 0.0);
  for (int g : dims.mixed) cov(g, g) = sigma2 + interf_power;

  CovEstimate est;
  est.cov = (cov + cov.adjoint()) / 2.0;
  est.sample_count = t_count;
  est.regularization = 1e-9 * est.cov.trace().real() / nl;
  est.cov += est.regularization * CMat::Identity(nl, nl);
  return est;
}

}  // namespace bfia
