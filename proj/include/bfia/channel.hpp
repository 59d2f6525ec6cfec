// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "bfia/constellation.hpp"
#include "bfia/precoder.hpp"
#include "bfia/rng.hpp"
#include "bfia/types.hpp"

namespace bfia {

/// One block-fading draw: the N x M gain of every (receiver, transmitter)
/// pair, constant across the L-extension, plus the noise variance per complex
/// receive dimension. A broadcast channel has a single transmitter, so only
/// the gains (i, 0) are populated and gain(i, j) maps every j onto it.
struct ChannelRealization {
  Scenario scenario;
  std::vector<CMat> gains;  // users*users entries, index rx*users + tx
  RMat alphas;              // received-power map E|h|^2
  double sigma2 = 1.0;

  const CMat& gain(int rx, int tx) const;
  /// NL x ML block-diagonal extension kron(I_L, gain(rx, tx)).
  CMat block_gain(int rx, int tx) const;
};

/// K x K power map with `desired` on the diagonal and `interf` elsewhere.
RMat uniform_alphas(int users, double desired, double interf);

/// Gains drawn i.i.d. CN(0, alpha_ij), block-constant. sigma2 > 0.
ChannelRealization draw_channel(const Scenario& s, const RMat& alphas, double sigma2,
                                Rng& rng);

/// What one receiver sees from one transmitter: H_{rx,tx} Q_tx (both indices
/// equal gives the desired-signal matrix).
CMat effective_matrix(const ChannelRealization& ch, const PrecoderSet& p, int rx, int tx);

/// One precoded block: the received vector of every receiver plus the
/// ground-truth symbol labels (kept for scoring, never shown to detectors).
struct ReceivedBlock {
  std::vector<CVec> received;          // per receiver, length NL
  std::vector<std::vector<int>> sent;  // per user, d symbol labels
};

/// y_i = sum_j H_{i,j} Q_j x_j + n_i with n ~ CN(0, sigma2 I).
ReceivedBlock transmit(const ChannelRealization& ch, const PrecoderSet& p,
                       const std::vector<std::vector<int>>& symbol_labels,
                       const Constellation& c, Rng& rng);

/// R_i = sum_{j != i} H_{i,j} Q_j Q_j^H H_{i,j}^H + sigma2 I for unit-energy
/// uniform symbols.
CMat exact_interference_cov(const ChannelRealization& ch, const PrecoderSet& p, int receiver);

}  // namespace bfia
