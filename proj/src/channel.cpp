// SPDX-License-Identifier: Apache-2.0

#include "bfia/channel.hpp"

#include "bfia/errors.hpp"

namespace bfia {

const CMat& ChannelRealization::gain(int rx, int tx) const {
  const int k = scenario.users;
  if (rx < 0 || rx >= k || tx < 0 || tx >= k) throw param_error("gain index out of range");
  if (scenario.kind == ChannelType::BC) tx = 0;
  return gains[static_cast<std::size_t>(rx) * k + tx];
}

CMat ChannelRealization::block_gain(int rx, int tx) const {
  const CMat& g = gain(rx, tx);
  const int l = scenario.extension;
  CMat h = CMat::Zero(scenario.rx_dims(), scenario.tx_dims());
  for (int b = 0; b < l; ++b)
    h.block(b * scenario.rx_antennas, b * scenario.tx_antennas, scenario.rx_antennas,
            scenario.tx_antennas) = g;
  return h;
}

RMat uniform_alphas(int users, double desired, double interf) {
  RMat a = RMat::Constant(users, users, interf);
  a.diagonal().setConstant(desired);
  return a;
}

ChannelRealization draw_channel(const Scenario& s, const RMat& alphas, double sigma2,
                                Rng& rng) {
  s.validate();
  if (alphas.rows() != s.users || alphas.cols() != s.users)
    throw param_error("alpha map must be K x K");
  if (alphas.minCoeff() < 0.0) throw param_error("received powers must be >= 0");
  if (!(sigma2 > 0.0)) throw param_error("noise variance must be > 0");

  ChannelRealization ch;
  ch.scenario = s;
  ch.alphas = alphas;
  ch.sigma2 = sigma2;
  ch.gains.assign(static_cast<std::size_t>(s.users) * s.users,
                  CMat(CMat::Zero(s.rx_antennas, s.tx_antennas)));
  for (int rx = 0; rx < s.users; ++rx) {
    for (int tx = 0; tx < s.users; ++tx) {
      if (s.kind == ChannelType::BC && tx != 0) continue;
      // BC stores the single transmitter's gain under (rx, 0) at power alpha_rr.
      const double a =
          s.kind == ChannelType::BC ? alphas(rx, rx) : alphas(rx, tx);
      CMat& g = ch.gains[static_cast<std::size_t>(rx) * s.users + tx];
      for (int r = 0; r < s.rx_antennas; ++r)
        for (int c = 0; c < s.tx_antennas; ++c) g(r, c) = rng.cnormal(a);
    }
  }
  return ch;
}

CMat effective_matrix(const ChannelRealization& ch, const PrecoderSet& p, int rx, int tx) {
  if (ch.scenario.siso()) return ch.gain(rx, tx)(0, 0) * p.precoders[tx];
  return ch.block_gain(rx, tx) * p.precoders[tx];
}

ReceivedBlock transmit(const ChannelRealization& ch, const PrecoderSet& p,
                       const std::vector<std::vector<int>>& symbol_labels,
                       const Constellation& c, Rng& rng) {
  const Scenario& s = ch.scenario;
  const int d = p.streams();
  if (p.users() != s.users) throw param_error("precoder/channel user count mismatch");
  if (static_cast<int>(symbol_labels.size()) != s.users)
    throw param_error("need one symbol vector per user");

  std::vector<CVec> sent(s.users);
  for (int u = 0; u < s.users; ++u) {
    if (static_cast<int>(symbol_labels[u].size()) != d)
      throw param_error("user " + std::to_string(u) + " must send d=" + std::to_string(d) +
                        " symbols");
    CVec x(d);
    for (int t = 0; t < d; ++t) {
      const int lab = symbol_labels[u][t];
      if (lab < 0 || lab >= c.size()) throw param_error("symbol label out of range");
      x(t) = c.points[lab];
    }
    sent[u] = p.precoders[u] * x;  // ML-dim transmit vector
  }

  ReceivedBlock blk;
  blk.sent = symbol_labels;
  blk.received.resize(s.users);
  const bool siso = s.siso();
  for (int rx = 0; rx < s.users; ++rx) {
    CVec y = CVec::Zero(s.rx_dims());
    for (int tx = 0; tx < s.users; ++tx) {
      if (siso)
        y += ch.gain(rx, tx)(0, 0) * sent[tx];
      else
        y += ch.block_gain(rx, tx) * sent[tx];
    }
    for (int t = 0; t < s.rx_dims(); ++t) y(t) += rng.cnormal(ch.sigma2);
    blk.received[rx] = std::move(y);
  }
  return blk;
}

CMat exact_interference_cov(const ChannelRealization& ch, const PrecoderSet& p,
                            int receiver) {
  const Scenario& s = ch.scenario;
  const int nl = s.rx_dims();
  CMat r = ch.sigma2 * CMat::Identity(nl, nl);
  for (int tx = 0; tx < s.users; ++tx) {
    if (tx == receiver) continue;
    const CMat b = effective_matrix(ch, p, receiver, tx);
    r += b * b.adjoint();
  }
  return (r + r.adjoint()) / 2.0;
}

}  // namespace bfia
