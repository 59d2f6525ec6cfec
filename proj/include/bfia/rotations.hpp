// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "bfia/constellation.hpp"
#include "bfia/types.hpp"

namespace bfia {

struct GivensFactor {
  int dim = 2;
  int i = 0;
  int j = 1;
  double angle = 0.0;
};

/// Plane rotation: identity everywhere except rows/columns (i, j), which
/// carry [[cos, sin], [-sin, cos]]. Requires 0 <= i < j < m.
RMat givens(int m, int i, int j, double theta);
RMat givens(const GivensFactor& f);

/// The m-1 disjoint plane sets whose rotations share one angle each; set k
/// contains the plane (0, k+1) and the sets together cover all m(m-1)/2
/// planes exactly once (round-robin one-factorization). For m=4 this is
/// {(0,1),(2,3)}, {(0,2),(1,3)}, {(0,3),(1,2)}.
std::vector<std::vector<std::pair<int, int>>> plane_pairings(int m);

/// Real orthogonal matrix built as a product of tied-angle Givens factors,
/// parameterized by m-1 angles. For m = 2 and m = 4 every row then projects
/// a +/- symmetric alphabet onto the same value multiset (m = 4 is the
/// quaternion rotation family). Larger even m uses the same mechanical
/// pairing but has no validated tied-angle family; verify_theorem3 is the
/// arbiter either way.
struct UsefulUnitary {
  int dim = 2;
  std::vector<double> angles;
  RMat matrix;
};

UsefulUnitary useful_unitary(int m, const std::vector<double>& angles);

/// Multiset {u . x : x in X^len(u)} for a projection row u.
std::vector<cplx> projection_multiset(const Eigen::RowVectorXcd& u, const Constellation& c,
                                      std::size_t cap = kDefaultEnumCap);

std::vector<cplx> mean_set(const RMat& u, int row, const Constellation& c,
                           std::size_t cap = kDefaultEnumCap);
std::vector<cplx> mean_set(const CMat& u, int row, const Constellation& c,
                           std::size_t cap = kDefaultEnumCap);

struct Theorem3Report {
  bool pass = false;
  double max_mismatch = 0.0;
  int worst_row = 0;
  double tol = 1e-9;
};

/// True iff all rows of u.matrix see the same projection multiset over the
/// alphabet (sorted by real then imaginary part, elementwise distance <= tol).
Theorem3Report verify_theorem3(const UsefulUnitary& u, const Constellation& c,
                               double tol = 1e-9, std::size_t cap = kDefaultEnumCap);

/// Same row-multiset comparison for an arbitrary square matrix; used to
/// exhibit counterexamples for untied-angle orthogonal matrices.
Theorem3Report verify_row_multisets(const RMat& u, const Constellation& c, double tol = 1e-9,
                                    std::size_t cap = kDefaultEnumCap);

}  // namespace bfia
