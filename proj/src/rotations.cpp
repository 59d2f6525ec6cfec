// SPDX-License-Identifier: Apache-2.0

#include "bfia/rotations.hpp"

#include <algorithm>
#include <cmath>

#include "bfia/errors.hpp"

namespace bfia {

RMat givens(int m, int i, int j, double theta) {
  if (m < 2 || i < 0 || j <= i || j >= m)
    throw param_error("givens plane requires 0 <= i < j < m");
  if (!std::isfinite(theta)) throw param_error("givens angle must be finite");
  RMat g = RMat::Identity(m, m);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  g(i, i) = c;
  g(i, j) = s;
  g(j, i) = -s;
  g(j, j) = c;
  return g;
}

RMat givens(const GivensFactor& f) { return givens(f.dim, f.i, f.j, f.angle); }

std::vector<std::vector<std::pair<int, int>>> plane_pairings(int m) {
  if (m < 2 || m % 2 != 0) throw param_error("plane pairings need even m >= 2");
  // Round-robin schedule: vertex m-1 fixed, the rest on a rotating circle.
  const int n = m - 1;
  std::vector<std::vector<std::pair<int, int>>> rounds(n);
  for (int r = 0; r < n; ++r) {
    rounds[r].emplace_back(std::min(r, m - 1), std::max(r, m - 1));
    for (int i = 1; i <= m / 2 - 1; ++i) {
      const int a = (r + i) % n;
      const int b = (r - i + n) % n;
      rounds[r].emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  // Order such that set k-1 holds plane (0, k).
  std::vector<std::vector<std::pair<int, int>>> ordered(n);
  for (int k = 1; k < m; ++k) {
    for (const auto& mt : rounds) {
      if (std::find(mt.begin(), mt.end(), std::make_pair(0, k)) != mt.end()) {
        ordered[k - 1] = mt;
        break;
      }
    }
  }
  return ordered;
}

UsefulUnitary useful_unitary(int m, const std::vector<double>& angles) {
  if (m < 2 || m % 2 != 0)
    throw param_error("useful unitary dimension must be even, got " + std::to_string(m));
  if (static_cast<int>(angles.size()) != m - 1)
    throw param_error("useful unitary of dimension " + std::to_string(m) + " needs " +
                      std::to_string(m - 1) + " angles, got " +
                      std::to_string(angles.size()));
  UsefulUnitary u;
  u.dim = m;
  u.angles = angles;
  u.matrix = RMat::Identity(m, m);
  const auto pairings = plane_pairings(m);
  for (int k = 0; k < m - 1; ++k) {
    RMat factor = RMat::Identity(m, m);
    for (std::size_t pi = 0; pi < pairings[k].size(); ++pi) {
      auto [i, j] = pairings[k][pi];
      // Tied magnitudes, with the middle factor of m=4 anti-tied: that makes
      // the product a quaternion left multiplication, whose rows are signed
      // permutations of each other, which is exactly what equal row marginals
      // over a +- symmetric alphabet need. A plain equal-sign tie leaves rows
      // {0,2} and {1,3} with different marginals.
      const double sign = (m == 4 && k == 1 && pi > 0) ? -1.0 : 1.0;
      factor = factor * givens(m, i, j, sign * angles[k]);
    }
    u.matrix = u.matrix * factor;
  }
  return u;
}

std::vector<cplx> projection_multiset(const Eigen::RowVectorXcd& u, const Constellation& c,
                                      std::size_t cap) {
  const int m = static_cast<int>(u.size());
  const std::size_t n = vector_count(c, m, cap);
  const auto q = static_cast<std::size_t>(c.size());
  std::vector<cplx> out(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t t = v;
    cplx acc = 0;
    for (int k = m - 1; k >= 0; --k) {
      acc += u(k) * c.points[t % q];
      t /= q;
    }
    out[v] = acc;
  }
  return out;
}

std::vector<cplx> mean_set(const RMat& u, int row, const Constellation& c, std::size_t cap) {
  if (row < 0 || row >= u.rows()) throw param_error("mean_set row index out of range");
  return projection_multiset(u.row(row).cast<cplx>(), c, cap);
}

std::vector<cplx> mean_set(const CMat& u, int row, const Constellation& c, std::size_t cap) {
  if (row < 0 || row >= u.rows()) throw param_error("mean_set row index out of range");
  return projection_multiset(u.row(row), c, cap);
}

namespace {

void canonical_sort(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

// Elementwise distance of two canonically sorted multisets. Runs of
// nearly-equal real parts are re-paired by imaginary part first: distinct
// values often share a real part exactly in theory but only to rounding in
// floating point, which would otherwise scramble the sort order between the
// two sets.
double sorted_multiset_distance(std::vector<cplx> a, std::vector<cplx> b, double gap) {
  canonical_sort(a);
  canonical_sort(b);
  const std::size_t n = a.size();
  double worst = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && (a[j].real() - a[j - 1].real() <= gap ||
                     b[j].real() - b[j - 1].real() <= gap))
      ++j;
    auto by_imag = [](const cplx& x, const cplx& y) {
      if (x.imag() != y.imag()) return x.imag() < y.imag();
      return x.real() < y.real();
    };
    std::sort(a.begin() + i, a.begin() + j, by_imag);
    std::sort(b.begin() + i, b.begin() + j, by_imag);
    for (std::size_t t = i; t < j; ++t) worst = std::max(worst, std::abs(a[t] - b[t]));
    i = j;
  }
  return worst;
}

}  // namespace

Theorem3Report verify_row_multisets(const RMat& u, const Constellation& c, double tol,
                                    std::size_t cap) {
  Theorem3Report rep;
  rep.tol = tol;
  const std::vector<cplx> ref = mean_set(u, 0, c, cap);
  const double gap = std::max(tol, 1e-12);
  for (int r = 1; r < u.rows(); ++r) {
    const double dist = sorted_multiset_distance(ref, mean_set(u, r, c, cap), gap);
    if (dist > rep.max_mismatch) {
      rep.max_mismatch = dist;
      rep.worst_row = r;
    }
  }
  rep.pass = rep.max_mismatch <= tol;
  return rep;
}

Theorem3Report verify_theorem3(const UsefulUnitary& u, const Constellation& c, double tol,
                               std::size_t cap) {
  return verify_row_multisets(u.matrix, c, tol, cap);
}

}  // namespace bfia
