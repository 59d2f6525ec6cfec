// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bfia/types.hpp"

namespace bfia {

struct ChannelRealization;  // channel.hpp

enum class ChannelType { BC, IC };

/// One simulated link configuration: K users, M transmit and N receive
/// antennas per node, symbol extension factor L. M > N is rejected (the
/// maximum stream count for that case is an open problem).
struct Scenario {
  ChannelType kind = ChannelType::IC;
  int users = 1;        // K
  int tx_antennas = 1;  // M
  int rx_antennas = 1;  // N
  int extension = 1;    // L

  int tx_dims() const { return tx_antennas * extension; }  // ML
  int rx_dims() const { return rx_antennas * extension; }  // NL
  bool siso() const { return tx_antennas == 1 && rx_antennas == 1; }
  void validate() const;
  std::string str() const;
};

struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d);  // reduced, den > 0
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct SpacResult {
  int d_max = 0;
  Rational spac;
  std::string formula;
};

/// Largest per-user stream count d (and d/(ML) as a fraction) for which the
/// CSIT-free selection precoder keeps the desired subspace out of the
/// interference at every receiver. Non-divisible K*M/N rounds up, which is
/// the conservative choice. Throws when infeasible (suggests the minimum L).
SpacResult max_spac(const Scenario& s);

/// K selection matrices S_i plus K unitaries U_i, composed as Q_i = S_i U_i.
/// Group-1 cells grant each user an interference-free dimension at its
/// receiver; group-2 cells are shared by everyone.
struct PrecoderSet {
  std::vector<RMat> selections;  // ML x d, one 1 per column
  std::vector<CMat> unitaries;   // d x d
  std::vector<CMat> precoders;   // ML x d
  std::vector<int> group1;       // per-user group-1 cell
  std::vector<int> group2;       // shared group-2 cells (may be empty)

  int users() const { return static_cast<int>(precoders.size()); }
  int streams() const { return precoders.empty() ? 0 : static_cast<int>(precoders[0].cols()); }
};

/// Two-group selection layout: user i transmits on its own group-1 cell plus
/// the lowest-index d-1 shared group-2 cells. Supported grids: any BC with
/// M <= N, IC with M == 1 or M == N (on the ML-extended grid). With
/// `allow_infeasible` the layout falls back to cyclic cell reuse so that
/// over-capacity stream counts (the error-floor experiment) can be simulated.
PrecoderSet build_precoders(const Scenario& s, int d, const std::vector<CMat>& unitaries,
                            bool allow_infeasible = false);

/// Receiver-side classification of the SISO resource dimensions.
struct ReceiverDims {
  int own = 0;                                          // desired-only dimension
  std::vector<std::pair<int, int>> interference_only;   // (dimension, interferer)
  std::vector<int> mixed;                               // desired + all interferers
  std::vector<int> idle;                                // unused group-2 cells
};

ReceiverDims classify_dims(const Scenario& s, const PrecoderSet& p, int receiver);

/// Count of singular values above tol * sigma_max.
int numeric_rank(const CMat& a, double tol = 1e-8);

struct ReceiverAlignment {
  int receiver = 0;
  int rank_desired = 0;
  int rank_interference = 0;
  int rank_joint = 0;
  int intersection_dim = 0;
  bool ok_interference = false;  // interference rank < NL
  bool ok_union = false;         // joint rank fills the reachable space
  bool ok_intersection = false;  // desired-interference overlap < d
};

struct AlignmentReport {
  std::vector<ReceiverAlignment> per_receiver;
  bool pass = false;
  double tol = 1e-8;
  std::string str() const;
};

/// Numeric verification of the subspace constraints at every receiver:
/// the interference union must not fill the receive space, the full union
/// must, and the desired/interference intersection must stay below d.
AlignmentReport check_alignment(const ChannelRealization& ch, const PrecoderSet& p,
                                double tol = 1e-8);

}  // namespace bfia
