// SPDX-License-Identifier: Apache-2.0

#include "bfia/constellation.hpp"

#include <bit>
#include <cctype>
#include <cmath>

#include "bfia/errors.hpp"

namespace bfia {
namespace {

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

int int_log2(long long v) {
  int b = 0;
  while ((1LL << b) < v) ++b;
  return b;
}

int gray_encode(int k) { return k ^ (k >> 1); }

}  // namespace

std::string Constellation::name() const {
  const int n = size();
  if (kind == ConstellationKind::PSK) {
    if (n == 2) return "bpsk";
    if (n == 4) return "qpsk";
    return "psk:" + std::to_string(n);
  }
  if (n == 16) return "16qam";
  return "qam:" + std::to_string(n);
}

Constellation make_constellation(ConstellationKind kind, int order) {
  if (order < 2 || !is_power_of_two(order))
    throw param_error("constellation order must be a power of two >= 2, got " +
                      std::to_string(order));
  Constellation c;
  c.kind = kind;
  c.bits_per_symbol = int_log2(order);
  c.points.assign(order, cplx{});
  if (kind == ConstellationKind::PSK) {
    // Powers of two >= 2 are even, which is what the +- symmetry needs.
    // Antipodal points are constructed by exact negation so the symmetry
    // holds bitwise, not merely to rounding.
    const double phase0 = order == 2 ? 0.0 : kPi / order;
    const int half = order / 2;
    for (int k = 0; k < half; ++k) {
      const double a = 2.0 * kPi * k / order + phase0;
      const cplx p{std::cos(a), std::sin(a)};
      c.points[gray_encode(k)] = p;
      c.points[gray_encode(k + half)] = -p;
    }
  } else {
    const int side = static_cast<int>(std::lround(std::sqrt(double(order))));
    if (side * side != order || side % 2 != 0)
      throw param_error("QAM order must be the square of an even integer, got " +
                        std::to_string(order));
    const int half_bits = c.bits_per_symbol / 2;
    // Average energy of the unscaled {..,-3,-1,1,3,..}^2 grid is 2(S^2-1)/3.
    const double scale = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
    for (int a = 0; a < side; ++a) {
      for (int b = 0; b < side; ++b) {
        const int label = (gray_encode(a) << half_bits) | gray_encode(b);
        c.points[label] =
            scale * cplx{double(2 * a - side + 1), double(2 * b - side + 1)};
      }
    }
  }
  return c;
}

Constellation parse_constellation(const std::string& spec) {
  std::string s;
  s.reserve(spec.size());
  for (char ch : spec)
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (s == "bpsk") return make_constellation(ConstellationKind::PSK, 2);
  if (s == "qpsk") return make_constellation(ConstellationKind::PSK, 4);
  if (s == "16qam") return make_constellation(ConstellationKind::QAM, 16);
  auto parse_order = [&](const std::string& tail) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(tail, &pos);
    } catch (const std::exception&) {
      throw param_error("bad constellation order in '" + spec + "'");
    }
    if (pos != tail.size()) throw param_error("bad constellation order in '" + spec + "'");
    return v;
  };
  if (s.rfind("psk:", 0) == 0)
    return make_constellation(ConstellationKind::PSK, parse_order(s.substr(4)));
  if (s.rfind("qam:", 0) == 0)
    return make_constellation(ConstellationKind::QAM, parse_order(s.substr(4)));
  throw param_error("unknown constellation '" + spec +
                    "' (expected bpsk|qpsk|16qam|psk:<P>|qam:<P*P>)");
}

std::vector<int> symbols_to_bits(const Constellation& c, const std::vector<int>& indices) {
  std::vector<int> bits;
  bits.reserve(indices.size() * c.bits_per_symbol);
  for (int idx : indices) {
    if (idx < 0 || idx >= c.size())
      throw param_error("symbol index " + std::to_string(idx) + " out of range for " +
                        c.name());
    for (int b = c.bits_per_symbol - 1; b >= 0; --b) bits.push_back((idx >> b) & 1);
  }
  return bits;
}

std::vector<int> bits_to_symbols(const Constellation& c, const std::vector<int>& bits) {
  if (bits.size() % static_cast<std::size_t>(c.bits_per_symbol) != 0)
    throw param_error("bitstream length " + std::to_string(bits.size()) +
                      " not divisible by bits per symbol");
  std::vector<int> out;
  out.reserve(bits.size() / c.bits_per_symbol);
  for (std::size_t i = 0; i < bits.size(); i += c.bits_per_symbol) {
    int idx = 0;
    for (int b = 0; b < c.bits_per_symbol; ++b) idx = (idx << 1) | (bits[i + b] ? 1 : 0);
    out.push_back(idx);
  }
  return out;
}

int bit_distance(int a, int b) {
  return std::popcount(static_cast<unsigned>(a ^ b));
}

std::size_t vector_count(const Constellation& c, int d, std::size_t cap) {
  if (d < 1) throw param_error("vector length must be >= 1");
  const auto q = static_cast<std::size_t>(c.size());
  std::size_t n = 1;
  for (int k = 0; k < d; ++k) {
    if (n > cap / q)
      throw search_space_error("|X|^d = " + std::to_string(c.size()) + "^" +
                               std::to_string(d) + " exceeds cap " + std::to_string(cap));
    n *= q;
  }
  return n;
}

std::vector<CVec> enumerate_vectors(const Constellation& c, int d, std::size_t cap) {
  const std::size_t n = vector_count(c, d, cap);
  const auto q = static_cast<std::size_t>(c.size());
  std::vector<CVec> out(n, CVec(d));
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t t = v;
    for (int k = d - 1; k >= 0; --k) {
      out[v](k) = c.points[t % q];
      t /= q;
    }
  }
  return out;
}

std::vector<int> vector_labels(const Constellation& c, int d, std::size_t v) {
  const auto q = static_cast<std::size_t>(c.size());
  std::vector<int> lab(d);
  for (int k = d - 1; k >= 0; --k) {
    lab[k] = static_cast<int>(v % q);
    v /= q;
  }
  return lab;
}

}  // namespace bfia
