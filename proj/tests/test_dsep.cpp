#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "contagion/dsep.hpp"
#include "contagion/inference.hpp"
#include "support/exhaustive.hpp"
#include "support/fixtures.hpp"

using namespace contagion;

namespace {

void compare_all_queries(const Digraph& g) {
  const auto mismatch = fixtures::dsep_mismatch(g);
  if (mismatch) FAIL_CHECK("mismatch on " << *mismatch);
}

}  // namespace

TEST_CASE("chain and collider") {
  Digraph chain(3);
  chain.add_edge(0, 1);
  chain.add_edge(1, 2);
  CHECK(d_separated(chain, {{0}, {2}, {1}}));
  CHECK_FALSE(d_separated(chain, {{0}, {2}, {}}));

  Digraph collider(3);
  collider.add_edge(0, 2);
  collider.add_edge(1, 2);
  CHECK(d_separated(collider, {{0}, {1}, {}}));
  CHECK_FALSE(d_separated(collider, {{0}, {1}, {2}}));

  // Observing a descendant of the collider also opens it.
  Digraph tail(4);
  tail.add_edge(0, 2);
  tail.add_edge(1, 2);
  tail.add_edge(2, 3);
  CHECK_FALSE(d_separated(tail, {{0}, {1}, {3}}));

  CHECK(d_separated(Digraph(2), {{0}, {1}, {}}));
  CHECK(d_separated(chain, {{}, {2}, {}}));
}

TEST_CASE("malformed queries are rejected") {
  const Digraph g(3);
  CHECK_THROWS_AS(d_separated(g, {{0}, {0}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(d_separated(g, {{0}, {1}, {1}}), std::invalid_argument);
  CHECK_THROWS_AS(d_separated(g, {{0}, {3}, {}}), std::invalid_argument);
}

TEST_CASE("local Markov property on DAGs") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 10);
    const RedemptionGraph g(fixtures::random_digraph(rng, n, 0.3, true));
    for (int i = 0; i < n; ++i) {
      std::vector<int> pa(g.parents(i).begin(), g.parents(i).end());
      std::vector<int> rest;
      for (int j : g.non_descendants(i))
        if (std::find(pa.begin(), pa.end(), j) == pa.end()) rest.push_back(j);
      CHECK(d_separated(g.digraph(), {{i}, rest, pa}));
    }
  }
}

TEST_CASE("exhaustive agreement with chain enumeration up to 4 vertices") {
  for (int n = 1; n <= 4; ++n) fixtures::for_each_digraph(n, compare_all_queries);
}

TEST_CASE("exhaustive agreement on 5-vertex digraphs up to isomorphism") {
  // Number of unlabelled digraphs on five vertices.
  CHECK(fixtures::for_each_unlabelled_5(compare_all_queries) == 9608);
}

TEST_CASE("random graphs up to 12 vertices agree with chain enumeration") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 11);
    const auto g = fixtures::random_digraph(rng, n, 0.1 + 0.1 * static_cast<double>(rng() % 2), trial % 4 == 0);
    const fixtures::ChainOracle oracle(g);
    const DSeparator sep(g);
    for (int q = 0; q < 5; ++q) {
      std::vector<int> v1, v2, v0;
      for (int v = 0; v < n; ++v) {
        switch (rng() % 5) {
          case 0: v1.push_back(v); break;
          case 1: v2.push_back(v); break;
          case 2: v0.push_back(v); break;
          default: break;
        }
      }
      if (v1.empty() || v2.empty()) continue;
      CHECK(sep.separated({v1, v2, v0}) == oracle.separated(v1, v2, v0));
    }
  }
}

TEST_CASE("unconditional separation transfers to the augmentation both ways") {
  std::mt19937_64 rng(43);
  int separated = 0, connected = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const RedemptionGraph g(fixtures::random_digraph(rng, n, 0.15, false));
    const auto a = acyclic_augmentation(g, scc_decompose(g));
    const int i = static_cast<int>(rng() % static_cast<unsigned>(n));
    int j = static_cast<int>(rng() % static_cast<unsigned>(n - 1));
    if (j >= i) ++j;
    const auto verdict = firm_independence(g, a, {i}, {j}, {});
    CHECK(verdict.separated_in_graph == verdict.independent);
    CHECK(verdict.separated_in_graph == verdict.separated_given_all_copies);
    (verdict.separated_in_graph ? separated : connected)++;
  }
  CHECK(separated > 50);
  CHECK(connected > 50);
}

TEST_CASE("conditional separation in G implies the all-copies statement") {
  std::mt19937_64 rng(44);
  int hits = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 8);
    const RedemptionGraph g(fixtures::random_digraph(rng, n, 0.2, false));
    const auto a = acyclic_augmentation(g, scc_decompose(g));
    std::vector<int> v1, v2, v0;
    for (int v = 0; v < n; ++v) {
      switch (rng() % 4) {
        case 0: v1.push_back(v); break;
        case 1: v2.push_back(v); break;
        case 2: v0.push_back(v); break;
        default: break;
      }
    }
    if (v1.empty() || v2.empty() || v0.empty()) continue;
    const auto verdict = firm_independence(g, a, v1, v2, v0);
    if (verdict.separated_in_graph) {
      ++hits;
      CHECK(verdict.separated_given_all_copies);
    }
  }
  CHECK(hits > 50);
}

TEST_CASE("firm-level verdict on the mutual pair and a disconnected pair") {
  const RedemptionGraph pair(Digraph(2, std::vector<std::pair<int, int>>{{0, 1}, {1, 0}}));
  const auto a = acyclic_augmentation(pair, scc_decompose(pair));
  const auto v = firm_independence(pair, a, {0}, {1}, {});
  CHECK_FALSE(v.independent);
  CHECK(v.augmented_query.v1 == std::vector<int>{a.final_copy(0)});

  const RedemptionGraph apart(Digraph(2));
  const auto b = acyclic_augmentation(apart, scc_decompose(apart));
  CHECK(firm_independence(apart, b, {0}, {1}, {}).independent);
}

namespace {

// Conditional mutual information (nats) of x and y given the stratum z,
// from per-sample labels.
double conditional_mi(const std::vector<int>& x, const std::vector<int>& y, const std::vector<int>& z,
                      int zcount) {
  std::vector<double> nxyz(static_cast<std::size_t>(4 * zcount), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k)
    nxyz[static_cast<std::size_t>(z[k] * 4 + x[k] * 2 + y[k])] += 1.0;
  const double total = static_cast<double>(x.size());
  double mi = 0.0;
  for (int s = 0; s < zcount; ++s) {
    const double* c = &nxyz[static_cast<std::size_t>(s * 4)];
    const double nz = c[0] + c[1] + c[2] + c[3];
    if (nz == 0.0) continue;
    for (int xv = 0; xv < 2; ++xv)
      for (int yv = 0; yv < 2; ++yv) {
        const double nxy = c[xv * 2 + yv];
        if (nxy == 0.0) continue;
        const double nx = c[xv * 2] + c[xv * 2 + 1];
        const double ny = c[yv] + c[2 + yv];
        mi += nxy / total * std::log(nxy * nz / (nx * ny));
      }
  }
  return mi;
}

}  // namespace

TEST_CASE("certified independence shows no mutual information") {
  std::mt19937_64 rng(45);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const auto net = fixtures::random_network(rng, n, 0.35, trial % 2 == 0);
    const auto g = build_redemption_graph(net);
    const auto a = acyclic_augmentation(g, scc_decompose(g));
    const int i = 0, j = n - 1;
    std::vector<int> v0;
    for (int k = 1; k < n - 1; ++k)
      if (rng() % 2) v0.push_back(k);
    if (!firm_independence(g, a, {i}, {j}, v0).independent) continue;
    // Skip pairs that are trivially disconnected in G.
    if (d_separated(g.digraph(), {{i}, {j}, {}})) continue;
    ++checked;

    std::vector<int> firms = {i, j};
    firms.insert(firms.end(), v0.begin(), v0.end());
    const std::uint64_t samples = 20000;
    const auto counts = mc_joint_counts(net, Rule::Mild, firms, samples, rng(), 1);
    std::vector<int> x, y, z;
    const int zbits = static_cast<int>(v0.size());
    for (std::size_t idx = 0; idx < counts.size(); ++idx)
      for (std::uint64_t c = 0; c < counts[idx]; ++c) {
        x.push_back(static_cast<int>((idx >> (zbits + 1)) & 1U));
        y.push_back(static_cast<int>((idx >> zbits) & 1U));
        z.push_back(static_cast<int>(idx & ((1U << zbits) - 1U)));
      }
    const double observed = conditional_mi(x, y, z, 1 << zbits);

    // Permutation null: shuffle y within each stratum of z.
    std::vector<std::vector<std::size_t>> strata(static_cast<std::size_t>(1) << zbits);
    for (std::size_t k = 0; k < z.size(); ++k) strata[static_cast<std::size_t>(z[k])].push_back(k);
    std::vector<double> null;
    std::vector<int> yp = y;
    for (int perm = 0; perm < 200; ++perm) {
      for (const auto& s : strata) {
        std::vector<int> vals;
        for (auto k : s) vals.push_back(y[k]);
        std::shuffle(vals.begin(), vals.end(), rng);
        for (std::size_t t = 0; t < s.size(); ++t) yp[s[t]] = vals[t];
      }
      null.push_back(conditional_mi(x, yp, z, 1 << zbits));
    }
    std::sort(null.begin(), null.end());
    const double q99 = null[static_cast<std::size_t>(0.99 * static_cast<double>(null.size() - 1))];
    CHECK_MESSAGE(observed <= q99, "trial " << trial << " mi " << observed << " q99 " << q99);
  }
  CHECK(checked == 20);
}
