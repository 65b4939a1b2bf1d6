// Exhaustive d-separation comparison against the chain oracle.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "contagion/dsep.hpp"
#include "support/fixtures.hpp"

namespace fixtures {

inline std::vector<int> members(std::uint32_t mask, int n) {
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if ((mask >> v) & 1U) out.push_back(v);
  return out;
}

/// Off-diagonal adjacency bits of an n-vertex digraph, row-major.
inline Digraph digraph_from_mask(int n, std::uint32_t mask) {
  Digraph g(n);
  int bit = 0;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      if ((mask >> bit) & 1U) g.add_edge(u, v);
      ++bit;
    }
  return g;
}

/// Compares every disjoint (v1, v2, v0) with non-empty v1 and v2 against
/// the oracle; set separation holds iff every cross pair is separated.
/// Returns a description of the first disagreement, if any.
inline std::optional<std::string> dsep_mismatch(const Digraph& g) {
  const int n = g.num_vertices();
  const auto N = static_cast<std::size_t>(n);
  const ChainOracle oracle(g);
  const DSeparator sep(g);
  // open[a][b][z]
  std::vector<std::vector<std::vector<std::uint8_t>>> open(N, std::vector<std::vector<std::uint8_t>>(N));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
      open[ua][ub] = oracle.open_given(a, b);
      open[ub][ua] = open[ua][ub];
    }
  int labels_total = 1;
  for (int k = 0; k < n; ++k) labels_total *= 4;
  for (int code = 0; code < labels_total; ++code) {
    std::uint32_t m1 = 0, m2 = 0, m0 = 0;
    int c = code;
    for (int v = 0; v < n; ++v, c /= 4) {
      if (c % 4 == 1) m1 |= 1U << v;
      if (c % 4 == 2) m2 |= 1U << v;
      if (c % 4 == 3) m0 |= 1U << v;
    }
    if (!m1 || !m2) continue;
    bool expected = true;
    for (int a : members(m1, n))
      for (int b : members(m2, n))
        if (open[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][m0]) expected = false;
    if (sep.separated({members(m1, n), members(m2, n), members(m0, n)}) != expected) {
      std::ostringstream os;
      os << n << " vertices, " << g.edges().size() << " edges, v1=" << m1 << " v2=" << m2 << " v0=" << m0;
      return os.str();
    }
  }
  return std::nullopt;
}

/// Calls `visit` on every labelled digraph with n vertices.
template <class Visit>
void for_each_digraph(int n, Visit&& visit) {
  const auto bits = static_cast<std::uint32_t>(n * (n - 1));
  for (std::uint32_t mask = 0; mask < (1U << bits); ++mask) visit(digraph_from_mask(n, mask));
}

/// Calls `visit` on one representative (the smallest adjacency mask) of
/// every isomorphism class of 5-vertex digraphs; returns the class count.
template <class Visit>
int for_each_unlabelled_5(Visit&& visit) {
  constexpr int n = 5;
  std::vector<std::array<int, n>> perms;
  std::array<int, n> p{0, 1, 2, 3, 4};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));

  std::array<std::array<int, n>, n> bit{};
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v) bit[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = u * (n - 1) + (v < u ? v : v - 1);

  int classes = 0;
  for (std::uint32_t mask = 0; mask < (1U << 20); ++mask) {
    bool canonical = true;
    for (const auto& perm : perms) {
      std::uint32_t image = 0;
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
          if (u != v && ((mask >> bit[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) & 1U))
            image |= 1U << bit[static_cast<std::size_t>(perm[static_cast<std::size_t>(u)])]
                              [static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])];
      if (image < mask) {
        canonical = false;
        break;
      }
    }
    if (!canonical) continue;
    ++classes;
    visit(digraph_from_mask(n, mask));
  }
  return classes;
}

}  // namespace fixtures
