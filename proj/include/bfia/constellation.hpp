// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bfia/types.hpp"

namespace bfia {

inline constexpr std::size_t kDefaultEnumCap = std::size_t{1} << 20;

enum class ConstellationKind { PSK, QAM };

/// Unit-average-energy signal set with the +/- symmetry that marginal sharing
/// across precoder dimensions relies on: for every point a, -a is also a
/// point. `points` is indexed by the bit label, so Gray adjacency of labels
/// is a geometric property of the layout.
struct Constellation {
  ConstellationKind kind = ConstellationKind::PSK;
  int bits_per_symbol = 1;
  std::vector<cplx> points;

  int size() const { return static_cast<int>(points.size()); }
  std::string name() const;
};

/// Builds a Gray-labeled P-PSK (P a power of two) or square QAM (order the
/// square of an even integer). QPSK is anchored at exp(i*pi/4) so that its
/// real/imaginary parts are +-1/sqrt(2) and it nests inside square QAM.
Constellation make_constellation(ConstellationKind kind, int order);

/// Accepts "bpsk", "qpsk", "16qam", "psk:<P>", "qam:<P*P>".
Constellation parse_constellation(const std::string& spec);

std::vector<int> symbols_to_bits(const Constellation& c, const std::vector<int>& indices);
std::vector<int> bits_to_symbols(const Constellation& c, const std::vector<int>& bits);

/// Number of differing bits between two symbol labels.
int bit_distance(int a, int b);

/// All |c|^d transmit vectors in lexicographic index order; the first vector
/// element is the most significant digit of the index.
std::vector<CVec> enumerate_vectors(const Constellation& c, int d,
                                    std::size_t cap = kDefaultEnumCap);

/// |c|^d, or search_space_error beyond `cap`.
std::size_t vector_count(const Constellation& c, int d, std::size_t cap = kDefaultEnumCap);

/// Per-symbol labels of joint candidate index `v` (inverse of the
/// enumerate_vectors ordering).
std::vector<int> vector_labels(const Constellation& c, int d, std::size_t v);

}  // namespace bfia
