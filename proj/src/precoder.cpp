// SPDX-License-Identifier: Apache-2.0

#include "bfia/precoder.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "bfia/channel.hpp"
#include "bfia/errors.hpp"

namespace bfia {

void Scenario::validate() const {
  if (users < 1 || tx_antennas < 1 || rx_antennas < 1 || extension < 1)
    throw param_error("scenario requires K, M, N, L >= 1");
  if (tx_antennas > rx_antennas)
    throw param_error("M > N (MISO-like) is unsupported: the achievable stream count "
                      "for that case is an open problem; require M <= N");
}

std::string Scenario::str() const {
  std::ostringstream os;
  os << (kind == ChannelType::BC ? "bc" : "ic") << " K=" << users << " M=" << tx_antennas
     << " N=" << rx_antennas << " L=" << extension;
  return os.str();
}

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw param_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

SpacResult max_spac(const Scenario& s) {
  s.validate();
  const long long ml = s.tx_dims();
  SpacResult r;
  long long need = 0;  // group-1 cells consumed by the K users
  if (s.kind == ChannelType::BC) {
    need = s.users;
    r.formula = "BC: d_max = M*L - K + 1";
  } else {
    need = (static_cast<long long>(s.users) * s.tx_antennas + s.rx_antennas - 1) /
           s.rx_antennas;  // ceil(K*M/N)
    r.formula = "IC: d_max = M*L - ceil(K*M/N) + 1";
  }
  r.d_max = static_cast<int>(ml - need + 1);
  if (r.d_max <= 0) {
    const long long lmin = (need + s.tx_antennas - 1) / s.tx_antennas;
    throw param_error("infeasible: d_max <= 0 for " + s.str() + "; need L >= " +
                      std::to_string(lmin));
  }
  r.spac = Rational(r.d_max, ml);
  return r;
}

namespace {

constexpr double kUnitaryTol = 1e-8;

void check_unitaries(const std::vector<CMat>& us, int users, int d) {
  if (static_cast<int>(us.size()) != users)
    throw param_error("need one unitary per user: got " + std::to_string(us.size()) +
                      " for K=" + std::to_string(users));
  for (int i = 0; i < users; ++i) {
    if (us[i].rows() != d || us[i].cols() != d)
      throw param_error("unitary " + std::to_string(i) + " is not " + std::to_string(d) +
                        "x" + std::to_string(d));
    const double resid =
        (us[i].adjoint() * us[i] - CMat::Identity(d, d)).cwiseAbs().maxCoeff();
    if (resid > kUnitaryTol)
      throw param_error("matrix " + std::to_string(i) +
                        " is not unitary (residual " + std::to_string(resid) + ")");
  }
}

}  // namespace

PrecoderSet build_precoders(const Scenario& s, int d, const std::vector<CMat>& unitaries,
                            bool allow_infeasible) {
  s.validate();
  const int ml = s.tx_dims();
  if (d < 1 || d > ml)
    throw param_error("stream count d must satisfy 1 <= d <= M*L, got " + std::to_string(d));
  check_unitaries(unitaries, s.users, d);

  // Users that may share one group-1 cell thanks to receive antennas.
  const int share = s.kind == ChannelType::IC ? s.rx_antennas / s.tx_antennas : 1;
  bool standard = true;
  int g1_cells = 0;
  if (s.kind == ChannelType::IC && s.tx_antennas != 1 && s.tx_antennas != s.rx_antennas) {
    throw param_error("IC precoder construction is implemented for M=1 or M=N "
                      "(max_spac still covers the general formula)");
  }
  g1_cells = (s.users + share - 1) / share;
  if (g1_cells + d - 1 > ml) {
    if (!allow_infeasible)
      throw param_error("d=" + std::to_string(d) + " does not fit the two-group layout for " +
                        s.str() + " (d_max exceeded); pass allow_infeasible to force");
    standard = false;
  }

  PrecoderSet p;
  p.unitaries = unitaries;
  p.selections.reserve(s.users);
  p.precoders.reserve(s.users);
  p.group1.resize(s.users);
  if (standard) {
    for (int t = 0; t < d - 1; ++t) p.group2.push_back(g1_cells + t);
  }
  for (int u = 0; u < s.users; ++u) {
    RMat sel = RMat::Zero(ml, d);
    if (standard) {
      p.group1[u] = u / share;
      sel(p.group1[u], 0) = 1.0;
      for (int t = 0; t < d - 1; ++t) sel(p.group2[t], t + 1) = 1.0;
    } else {
      // Over-capacity layout: cyclic cell reuse, every alignment guarantee off.
      p.group1[u] = u % ml;
      for (int t = 0; t < d; ++t) sel((p.group1[u] + t) % ml, t) = 1.0;
    }
    p.selections.push_back(sel);
    p.precoders.push_back(sel * unitaries[u]);
  }
  return p;
}

ReceiverDims classify_dims(const Scenario& s, const PrecoderSet& p, int receiver) {
  if (!s.siso())
    throw param_error("resource-dimension classification (blind estimation) is "
                      "implemented for SISO links only");
  if (receiver < 0 || receiver >= p.users()) throw param_error("receiver index out of range");
  for (int a = 0; a < p.users(); ++a)
    for (int b = a + 1; b < p.users(); ++b)
      if (p.group1[a] == p.group1[b])
        throw param_error("blind estimation needs a dedicated group-1 cell per user; "
                          "the layout reuses cell " + std::to_string(p.group1[a]));
  ReceiverDims dims;
  dims.own = p.group1[receiver];
  for (int u = 0; u < p.users(); ++u)
    if (u != receiver) dims.interference_only.emplace_back(p.group1[u], u);
  dims.mixed = p.group2;
  std::vector<bool> used(s.tx_dims(), false);
  used[dims.own] = true;
  for (auto [dim, u] : dims.interference_only) used[dim] = true;
  for (int g : dims.mixed) used[g] = true;
  for (int t = 0; t < s.tx_dims(); ++t)
    if (!used[t]) dims.idle.push_back(t);
  return dims;
}

int numeric_rank(const CMat& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double thresh = tol * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++r;
  return r;
}

std::string AlignmentReport::str() const {
  std::ostringstream os;
  os << "alignment tol=" << tol << " verdict=" << (pass ? "PASS" : "FAIL") << "\n";
  for (const auto& r : per_receiver) {
    os << "rx " << r.receiver << ": desired_rank=" << r.rank_desired
       << " interference_rank=" << r.rank_interference << " joint_rank=" << r.rank_joint
       << " intersection_dim=" << r.intersection_dim
       << " interference_below_full=" << (r.ok_interference ? "ok" : "FAIL")
       << " union_full=" << (r.ok_union ? "ok" : "FAIL")
       << " intersection_below_d=" << (r.ok_intersection ? "ok" : "FAIL") << "\n";
  }
  return os.str();
}

AlignmentReport check_alignment(const ChannelRealization& ch, const PrecoderSet& p,
                                double tol) {
  const Scenario& s = ch.scenario;
  if (p.users() != s.users) throw param_error("precoder/channel user count mismatch");
  const int nl = s.rx_dims();
  const int d = p.streams();
  // Through a shared broadcast channel the union can only reach rank ML.
  const int union_target = s.kind == ChannelType::BC ? std::min(nl, s.tx_dims()) : nl;

  AlignmentReport rep;
  rep.tol = tol;
  rep.pass = true;
  for (int rx = 0; rx < s.users; ++rx) {
    ReceiverAlignment ra;
    ra.receiver = rx;
    const CMat desired = effective_matrix(ch, p, rx, rx);
    CMat interf(nl, static_cast<Eigen::Index>(d) * (s.users - 1));
    int col = 0;
    for (int tx = 0; tx < s.users; ++tx) {
      if (tx == rx) continue;
      interf.middleCols(col, d) = effective_matrix(ch, p, rx, tx);
      col += d;
    }
    CMat joint(nl, interf.cols() + d);
    joint << desired, interf;
    ra.rank_desired = numeric_rank(desired, tol);
    ra.rank_interference = numeric_rank(interf, tol);
    ra.rank_joint = numeric_rank(joint, tol);
    ra.intersection_dim = ra.rank_desired + ra.rank_interference - ra.rank_joint;
    ra.ok_interference = ra.rank_interference < nl;
    ra.ok_union = ra.rank_joint == union_target;
    ra.ok_intersection = ra.intersection_dim < d;
    rep.pass = rep.pass && ra.ok_interference && ra.ok_union && ra.ok_intersection;
    rep.per_receiver.push_back(ra);
  }
  return rep;
}

}  // namespace bfia
