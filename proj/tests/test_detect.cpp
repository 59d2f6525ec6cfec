// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bfia/channel.hpp"
#include "bfia/detect.hpp"
#include "bfia/errors.hpp"
#include "bfia/estimate.hpp"
#include "bfia/precoder.hpp"
#include "bfia/rng.hpp"
#include "bfia/rotations.hpp"

using namespace bfia;

namespace {

Scenario siso_ic(int k, int l) {
  Scenario s;
  s.kind = ChannelType::IC;
  s.users = k;
  s.extension = l;
  return s;
}

std::vector<CMat> random_useful(int k, int d, Rng& rng) {
  std::vector<CMat> us;
  for (int u = 0; u < k; ++u) {
    if (d == 1) {
      us.push_back(CMat::Identity(1, 1));
      continue;
    }
    std::vector<double> angles(d - 1);
    for (double& a : angles) a = rng.uniform(-kPi, kPi);
    us.push_back(useful_unitary(d, angles).matrix.cast<cplx>());
  }
  return us;
}

}  // namespace

TEST_CASE("gmm density values") {
  const GmmPdf point{{cplx{0, 0}}, 1.0};
  CHECK(point.eval({0, 0}) == doctest::Approx(1.0 / kPi));

  const GmmPdf pair{{cplx{1, 0}, cplx{-1, 0}}, 1.0};
  CHECK(pair.eval({0, 0}) == doctest::Approx(std::exp(-1.0) / kPi));

  // Quadrature sanity: the density integrates to ~1.
  const double h = 0.02;
  double integral = 0.0;
  for (double x = -6.0; x <= 6.0; x += h)
    for (double y = -6.0; y <= 6.0; y += h) integral += pair.eval({x, y}) * h * h;
  CHECK(std::abs(integral - 1.0) < 1e-3);
}

TEST_CASE("gmm log density stays finite in the tails") {
  const GmmPdf pair{{cplx{1, 0}, cplx{-1, 0}}, 0.01};
  CHECK(std::isfinite(pair.log_eval({300.0, -400.0})));
  CHECK(std::isfinite(pair.log_eval({0.0, 0.0})));
  CHECK(pair.eval({300.0, -400.0}) == 0.0);  // underflows as a density, fine in log form
}

TEST_CASE("gmm_sum composes mean sets") {
  const GmmPdf a{{cplx{1, 0}, cplx{-1, 0}}, 0.5};
  const GmmPdf b{{cplx{2, 0}, cplx{-2, 0}}, 0.5};
  const GmmPdf s = gmm_sum(a, b);
  REQUIRE(s.means.size() == 4);
  std::vector<double> re;
  for (const cplx& m : s.means) re.push_back(m.real());
  std::sort(re.begin(), re.end());
  CHECK(re == std::vector<double>{-3, -1, 1, 3});
  CHECK(s.variance == 0.5);

  // Identity element and cardinality.
  const GmmPdf zero{{cplx{0, 0}}, 0.5};
  const GmmPdf same = gmm_sum(zero, a);
  REQUIRE(same.means.size() == 2);
  CHECK(std::abs(same.means[0] - a.means[0]) < 1e-15);

  // Commutative as a multiset.
  const GmmPdf ab = gmm_sum(a, b);
  const GmmPdf ba = gmm_sum(b, a);
  auto key = [](std::vector<cplx> v) {
    std::sort(v.begin(), v.end(), [](const cplx& x, const cplx& y) {
      if (x.real() != y.real()) return x.real() < y.real();
      return x.imag() < y.imag();
    });
    return v;
  };
  const auto ka = key(ab.means);
  const auto kb = key(ba.means);
  for (std::size_t i = 0; i < ka.size(); ++i) CHECK(std::abs(ka[i] - kb[i]) < 1e-15);

  CHECK_THROWS_AS(gmm_sum(a, GmmPdf{{cplx{0, 0}}, 0.9}), param_error);
  CHECK_THROWS_AS(gmm_sum(a, b, 3), search_space_error);
}

TEST_CASE("md detector finds the sent vector without noise") {
  const Scenario s = siso_ic(1, 3);
  Rng rng(51, 0);
  auto ch = draw_channel(s, uniform_alphas(1, 1.0, 1.0), 1.0, rng);
  ch.sigma2 = 1e-12;
  const Constellation qpsk = parse_constellation("qpsk");
  Rng urng(51, 1);
  const PrecoderSet p = build_precoders(s, 2, random_useful(1, 2, urng));
  const auto candidates = enumerate_vectors(qpsk, 2);
  const CMat desired = effective_matrix(ch, p, 0, 0);
  const CMat cov = exact_interference_cov(ch, p, 0);
  for (std::size_t truth = 0; truth < candidates.size(); ++truth) {
    const CVec y = desired * candidates[truth];
    const auto [vec, idx] = md_detect(y, desired, cov, candidates);
    CHECK(idx == static_cast<int>(truth));
  }
}

TEST_CASE("md with white covariance is nearest neighbor and scale invariant") {
  const Scenario s = siso_ic(2, 3);
  Rng rng(52, 0);
  const double sigma2 = 0.2;
  const auto ch = draw_channel(s, uniform_alphas(2, 1.0, 1.0), sigma2, rng);
  const Constellation qpsk = parse_constellation("qpsk");
  Rng urng(52, 1);
  const PrecoderSet p = build_precoders(s, 2, random_useful(2, 2, urng));
  const auto candidates = enumerate_vectors(qpsk, 2);
  const CMat desired = effective_matrix(ch, p, 0, 0);
  const CMat white = sigma2 * CMat::Identity(3, 3);
  const CMat cov = exact_interference_cov(ch, p, 0);

  MdDetector nn(desired, white, candidates);
  MdDetector nn_scaled(desired, 7.5 * white, candidates);
  MdDetector md(desired, cov, candidates);
  MdDetector md_scaled(desired, 3.0 * cov, candidates);

  Rng tx(52, 2);
  std::vector<std::vector<int>> labels(2, std::vector<int>(2));
  for (int t = 0; t < 200; ++t) {
    for (auto& u : labels)
      for (auto& v : u) v = static_cast<int>(tx.below(4));
    const ReceivedBlock blk = transmit(ch, p, labels, qpsk, tx);
    const CVec& y = blk.received[0];
    // Whitening by a scalar matrix cannot change the argmin.
    CHECK(nn.detect(y) == nn_scaled.detect(y));
    // Positive scaling of R never changes the decision.
    CHECK(md.detect(y) == md_scaled.detect(y));
    // Plain nearest neighbor against the same metric, computed directly.
    int best = 0;
    double bd = 1e300;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double dd = (y - desired * candidates[c]).squaredNorm();
      if (dd < bd) {
        bd = dd;
        best = static_cast<int>(c);
      }
    }
    CHECK(nn.detect(y) == best);
  }
}

TEST_CASE("md rejects a singular covariance") {
  const auto candidates = enumerate_vectors(parse_constellation("bpsk"), 1);
  CMat desired = CMat::Identity(2, 1);
  CMat singular = CMat::Zero(2, 2);
  singular(0, 0) = 1.0;  // rank 1
  CHECK_THROWS_AS(MdDetector(desired, singular, candidates), numeric_error);
}

TEST_CASE("ml full detector equals md under pure noise") {
  const Scenario s = siso_ic(1, 3);
  Rng rng(53, 0);
  const double sigma2 = 0.3;
  const auto ch = draw_channel(s, uniform_alphas(1, 1.0, 1.0), sigma2, rng);
  const Constellation qpsk = parse_constellation("qpsk");
  Rng urng(53, 1);
  const PrecoderSet p = build_precoders(s, 2, random_useful(1, 2, urng));
  const auto candidates = enumerate_vectors(qpsk, 2);
  const CMat desired = effective_matrix(ch, p, 0, 0);

  MdDetector md(desired, sigma2 * CMat::Identity(3, 3), candidates);
  MlFullDetector ml(ch, p, {qpsk}, 0);

  Rng tx(53, 2);
  std::vector<std::vector<int>> labels(1, std::vector<int>(2));
  for (int t = 0; t < 300; ++t) {
    for (auto& v : labels[0]) v = static_cast<int>(tx.below(4));
    const ReceivedBlock blk = transmit(ch, p, labels, qpsk, tx);
    CHECK(md.detect(blk.received[0]) == ml.detect(blk.received[0]));
  }
}

TEST_CASE("ml full equals md when the interference power is zero") {
  // An interferer that is present in the layout but received at zero power.
  const Scenario s = siso_ic(2, 3);
  Rng rng(58, 0);
  const double sigma2 = 0.25;
  const auto ch = draw_channel(s, uniform_alphas(2, 1.0, 0.0), sigma2, rng);
  const Constellation qpsk = parse_constellation("qpsk");
  Rng urng(58, 1);
  const PrecoderSet p = build_precoders(s, 2, random_useful(2, 2, urng));
  const auto candidates = enumerate_vectors(qpsk, 2);
  MdDetector md(effective_matrix(ch, p, 0, 0), sigma2 * CMat::Identity(3, 3), candidates);
  MlFullDetector ml(ch, p, {qpsk, qpsk}, 0);
  Rng tx(58, 2);
  std::vector<std::vector<int>> labels(2, std::vector<int>(2));
  for (int t = 0; t < 300; ++t) {
    for (auto& u : labels)
      for (auto& v : u) v = static_cast<int>(tx.below(4));
    const ReceivedBlock blk = transmit(ch, p, labels, qpsk, tx);
    CHECK(md.detect(blk.received[0]) == ml.detect(blk.received[0]));
  }
}

TEST_CASE("ml full agrees with the joint brute-force oracle") {
  // Independent oracle: joint argmax over (desired, interferer), then project.
  const Scenario s = siso_ic(2, 3);
  const Constellation qpsk = parse_constellation("qpsk");
  const double sigma2 = 0.01;  // 20 dB
  int agree = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Rng chan_rng(54, 3 * t);
    Rng urng(54, 3 * t + 1);
    Rng tx(54, 3 * t + 2);
    const auto ch = draw_channel(s, uniform_alphas(2, 1.0, 1.0), sigma2, chan_rng);
    const PrecoderSet p = build_precoders(s, 2, random_useful(2, 2, urng));
    std::vector<std::vector<int>> labels(2, std::vector<int>(2));
    for (auto& u : labels)
      for (auto& v : u) v = static_cast<int>(tx.below(4));
    const ReceivedBlock blk = transmit(ch, p, labels, qpsk, tx);

    MlFullDetector ml(ch, p, {qpsk, qpsk}, 0);
    const int got = ml.detect(blk.received[0]);

    const auto candidates = enumerate_vectors(qpsk, 2);
    const CMat a = effective_matrix(ch, p, 0, 0);
    const CMat b = effective_matrix(ch, p, 0, 1);
    int best = -1;
    double bd = 1e300;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci)
      for (std::size_t cj = 0; cj < candidates.size(); ++cj) {
        const double dd =
            (blk.received[0] - a * candidates[ci] - b * candidates[cj]).squaredNorm();
        if (dd < bd) {
          bd = dd;
          best = static_cast<int>(ci);
        }
      }
    if (got == best) ++agree;
  }
  CHECK(agree >= trials * 97 / 100);
}

TEST_CASE("blind marginal with a pure-noise interference pdf is nearest neighbor") {
  const Scenario s = siso_ic(2, 3);
  Rng rng(55, 0);
  const double sigma2 = 0.15;
  const auto ch = draw_channel(s, uniform_alphas(2, 1.0, 1.0), sigma2, rng);
  const Constellation qpsk = parse_constellation("qpsk");
  Rng urng(55, 1);
  const PrecoderSet p = build_precoders(s, 2, random_useful(2, 2, urng));
  const auto candidates = enumerate_vectors(qpsk, 2);
  const CMat desired = effective_matrix(ch, p, 0, 0);

  const GmmPdf noise{{cplx{0, 0}}, sigma2};
  const ReceiverDims dims = classify_dims(s, p, 0);
  MarginalProductDetector blind(desired, blind_dim_map(dims, noise, noise), candidates);
  CHECK_FALSE(blind.approximate());

  Rng tx(55, 2);
  std::vector<std::vector<int>> labels(2, std::vector<int>(2));
  for (int t = 0; t < 200; ++t) {
    for (auto& u : labels)
      for (auto& v : u) v = static_cast<int>(tx.below(4));
    const ReceivedBlock blk = transmit(ch, p, labels, qpsk, tx);
    const CVec& y = blk.received[0];
    // Nearest neighbor on the scored dims only.
    int best = 0;
    double bd = 1e300;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      double dd = 0.0;
      dd += std::norm(y(dims.own) - (desired.row(dims.own) * candidates[c])(0));
      for (int g : dims.mixed)
        dd += std::norm(y(g) - (desired.row(g) * candidates[c])(0));
      if (dd < bd) {
        bd = dd;
        best = static_cast<int>(c);
      }
    }
    CHECK(blind.detect(y) == best);
  }
}

TEST_CASE("blind marginal composite matches the analytic mean set") {
  const Scenario s = siso_ic(3, 4);
  Rng rng(56, 0);
  const double sigma2 = 0.05;
  const auto ch = draw_channel(s, uniform_alphas(3, 1.0, 1.0), sigma2, rng);
  const Constellation qpsk = parse_constellation("qpsk");
  Rng urng(56, 1);
  const PrecoderSet p = build_precoders(s, 2, random_useful(3, 2, urng));

  // Set-sum of the two per-interferer mean sets equals the composite pdf.
  const GmmPdf composite = exact_interference_pdf(ch, p, 0, qpsk);
  REQUIRE(composite.means.size() == 256);
  std::vector<cplx> manual;
  const auto m1 =
      projection_multiset(ch.gain(0, 1)(0, 0) * p.unitaries[1].row(0), qpsk);
  const auto m2 =
      projection_multiset(ch.gain(0, 2)(0, 0) * p.unitaries[2].row(0), qpsk);
  for (const cplx& a : m1)
    for (const cplx& b : m2) manual.push_back(a + b);
  CHECK(mean_set_hausdorff(composite.means, manual) < 1e-12);
}

TEST_CASE("detectors always return an in-alphabet candidate") {
  const Scenario s = siso_ic(2, 3);
  Rng rng(57, 0);
  const auto ch = draw_channel(s, uniform_alphas(2, 1.0, 1.0), 0.5, rng);
  const Constellation qpsk = parse_constellation("qpsk");
  Rng urng(57, 1);
  const PrecoderSet p = build_precoders(s, 2, random_useful(2, 2, urng));
  const auto candidates = enumerate_vectors(qpsk, 2);
  const CMat desired = effective_matrix(ch, p, 0, 0);
  MdDetector md(desired, exact_interference_cov(ch, p, 0), candidates);
  MlFullDetector ml(ch, p, {qpsk, qpsk}, 0);
  Rng tx(57, 2);
  for (int t = 0; t < 50; ++t) {
    CVec y(3);
    for (int i = 0; i < 3; ++i) y(i) = tx.cnormal(100.0);  // far outside the lattice
    const int a = md.detect(y);
    const int b = ml.detect(y);
    CHECK(a >= 0);
    CHECK(a < static_cast<int>(candidates.size()));
    CHECK(b >= 0);
    CHECK(b < static_cast<int>(candidates.size()));
  }
}

TEST_CASE("dim map validation") {
  const auto candidates = enumerate_vectors(parse_constellation("bpsk"), 1);
  const CMat desired = CMat::Identity(2, 1);
  std::vector<DimPdf> missing{{0, nullptr}};
  CHECK_THROWS_AS(MarginalProductDetector(desired, missing, candidates), param_error);
  const GmmPdf noise{{cplx{0, 0}}, 1.0};
  std::vector<DimPdf> oob{{5, &noise}};
  CHECK_THROWS_AS(MarginalProductDetector(desired, oob, candidates), param_error);
}

TEST_CASE("detector name round trip") {
  for (DetectorKind k : {DetectorKind::MdKnown, DetectorKind::MdEstimated,
                         DetectorKind::MlFullCsir, DetectorKind::MlBlindMarginal})
    CHECK(parse_detector(detector_name(k)) == k);
  const auto list = parse_detector_list("md-known,ml-blind,md-known");
  CHECK(list.size() == 2);
  CHECK_THROWS_AS(parse_detector("zf"), param_error);
}
