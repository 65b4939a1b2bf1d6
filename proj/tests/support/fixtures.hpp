// Networks and independent oracles shared by the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "contagion/bayesnet.hpp"
#include "contagion/graph.hpp"
#include "contagion/network.hpp"

namespace fixtures {

using namespace contagion;

inline FirmParams firm(double x0, double sigma, double mu = 0.0, double f = 0.0, double k0 = 0.0) {
  FirmParams p;
  p.operating_assets_0 = x0;
  p.volatility = sigma;
  p.drift = mu;
  p.external_liability = f;
  p.cash_0 = k0;
  return p;
}

/// Two firms owing each other $10, no cash, no external debt.
inline FinancialNetwork mutual_debt_pair() {
  return FinancialNetwork({firm(5.0, 0.2), firm(5.0, 0.2)}, {{0, 1, 10.0, 0.0}, {1, 0, 10.0, 0.0}}, 0.0, 0.0, 1.0);
}

/// Redemption edges as (debtor, creditor) pairs, turned into loans.
inline FinancialNetwork network_from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                           double amount = 5.0) {
  std::vector<FirmParams> firms(static_cast<std::size_t>(n), firm(20.0, 0.3, 0.0, 10.0));
  std::vector<Loan> loans;
  for (const auto& [debtor, creditor] : edges) loans.push_back({creditor, debtor, amount, 0.0});
  return FinancialNetwork(std::move(firms), std::move(loans), 0.0, 0.0, 1.0);
}

/// 4-cycle 1 -> 2 -> 3 -> 4 -> 1 with pendants 1 -> 5, 6 -> 1, 2 -> 7,
/// 3 -> 8, 4 -> 9 (0-based below).
inline std::vector<std::pair<int, int>> four_cycle_with_pendants() {
  return {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 4}, {5, 0}, {1, 6}, {2, 7}, {3, 8}};
}

/// Five firms: 1 and 2 strong and alike, 3 and 4 with collapsing assets
/// living off their claims, 5 the common creditor of 3 and 4.
inline FinancialNetwork source_monotonicity_network() {
  std::vector<FirmParams> firms = {
      firm(15.0, 0.3, 2.0, 0.0), firm(15.0, 0.3, 2.0, 20.0), firm(1.0, 0.1, -3.0),
      firm(1.0, 0.1, -3.0),      firm(10.0, 0.2, 0.05, 1.0),
  };
  std::vector<Loan> loans = {
      {3, 0, 20.0, 0.0}, {2, 0, 10.0, 0.0}, {2, 1, 10.0, 0.0}, {4, 2, 15.0, 0.0}, {4, 3, 15.0, 0.0},
  };
  return FinancialNetwork(std::move(firms), std::move(loans), 0.0, 0.0, 1.0);
}

inline Digraph random_digraph(std::mt19937_64& rng, int n, double p, bool acyclic) {
  std::bernoulli_distribution edge(p);
  Digraph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && (!acyclic || u < v) && edge(rng)) g.add_edge(u, v);
  return g;
}

/// Random valid network whose firms default with moderate probability.
inline FinancialNetwork random_network(std::mt19937_64& rng, int n, double p, bool acyclic) {
  std::uniform_real_distribution<double> x0(6.0, 12.0), sigma(0.15, 0.4), mu(-0.05, 0.05), f(3.0, 7.0),
      amount(2.0, 6.0), k0(0.0, 1.0);
  std::vector<FirmParams> firms;
  for (int i = 0; i < n; ++i) firms.push_back(firm(x0(rng), sigma(rng), mu(rng), f(rng), k0(rng)));
  const Digraph g = random_digraph(rng, n, p, acyclic);
  std::vector<Loan> loans;
  for (const auto& [debtor, creditor] : g.edges()) loans.push_back({creditor, debtor, amount(rng), 0.0});
  return FinancialNetwork(std::move(firms), std::move(loans), 0.0, 0.0, 1.0);
}

/// Random network whose redemption graph has at least one cycle.
inline FinancialNetwork random_cyclic_network(std::mt19937_64& rng, int n, double p) {
  for (;;) {
    auto net = random_network(rng, n, p, false);
    if (!is_dag(build_redemption_graph(net))) return net;
  }
}

/// Is `count` out of `samples` Bernoulli(p) draws within `z` standard
/// errors of p? Decided by the normal band when it contains the
/// frequency, otherwise by the exact binomial tail at the same two-sided
/// level (the normal band is far too narrow when samples * p is small).
inline bool within_standard_errors(std::uint64_t count, std::uint64_t samples, double p, double z = 4.0) {
  const double m = static_cast<double>(samples);
  const double k = static_cast<double>(count);
  const double se = std::sqrt(p * (1.0 - p) / m);
  if (std::abs(k / m - p) <= z * se) return true;
  if (p <= 0.0 || p >= 1.0) return false;
  const double one_sided = 0.5 * std::erfc(z / std::sqrt(2.0));
  const double log_p = std::log(p), log_q = std::log1p(-p);
  auto log_pmf = [&](double j) {
    return std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0) + j * log_p + (m - j) * log_q;
  };
  // Sum the tail beyond the observation, walking away from the mean.
  const double step = k > m * p ? 1.0 : -1.0;
  double tail = 0.0;
  for (double j = k; j >= 0.0 && j <= m; j += step) {
    const double term = std::exp(log_pmf(j));
    tail += term;
    if (tail >= one_sided) return true;
    if (term < tail * 1e-17) break;
  }
  return tail >= one_sided;
}

/// Joint law of the final copies by summing the product of all CPTs over
/// every configuration of the augmented nodes. Feasible up to ~22 nodes.
inline std::vector<double> brute_force_joint(const DiscreteBayesNet& bn) {
  const int m = bn.num_nodes();
  const int n = bn.num_firms();
  std::vector<double> law(std::size_t{1} << n, 0.0);
  for (std::uint64_t cfg = 0; cfg < (std::uint64_t{1} << m); ++cfg) {
    double p = 1.0;
    for (int v = 0; v < m && p > 0.0; ++v) {
      const auto& node = bn.node(v);
      std::size_t row = 0;
      for (int parent : node.parents) row = (row << 1) | ((cfg >> parent) & 1U);
      const double one = node.cpt[row];
      p *= ((cfg >> v) & 1U) ? one : 1.0 - one;
    }
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) idx = (idx << 1) | ((cfg >> bn.final_node(i)) & 1U);
    law[idx] += p;
  }
  return law;
}

/// Literal chain-blocking d-separation: enumerate every chain (sequence of
/// distinct vertices, consecutive ones joined by an edge of either
/// orientation; both orientations count separately on a 2-cycle) and test
/// each inner vertex against the four blocking structures.
class ChainOracle {
 public:
  explicit ChainOracle(const Digraph& g) : g_(g), n_(g.num_vertices()) {
    desc_.assign(static_cast<std::size_t>(n_), 0);
    for (int v = 0; v < n_; ++v)
      for (int w : g.reachable_from(v)) desc_[static_cast<std::size_t>(v)] |= 1U << w;
  }

  /// For the pair (a, b): a bitmask over all 2^n observed sets `z`
  /// (indexed by z itself) telling whether some chain is open given z.
  /// Only sets z excluding a and b are meaningful.
  std::vector<std::uint8_t> open_given(int a, int b) const {
    std::vector<std::uint8_t> open(std::size_t{1} << n_, 0);
    std::vector<int> path{a};
    std::vector<int> dirs;  // +1: edge path[k] -> path[k+1]; -1: reverse
    std::function<void(int)> extend = [&](int v) {
      if (v == b) {
        mark(path, dirs, open);
        return;
      }
      for (int w = 0; w < n_; ++w) {
        if (std::find(path.begin(), path.end(), w) != path.end()) continue;
        for (int d : {+1, -1}) {
          if (d > 0 ? !g_.has_edge(v, w) : !g_.has_edge(w, v)) continue;
          path.push_back(w);
          dirs.push_back(d);
          extend(w);
          path.pop_back();
          dirs.pop_back();
        }
      }
    };
    extend(a);
    return open;
  }

  /// Chain search for one observed set; a partial chain is abandoned as
  /// soon as one of its inner vertices is blocking.
  bool separated(const std::vector<int>& v1, const std::vector<int>& v2, const std::vector<int>& v0) const {
    std::uint32_t z = 0, targets = 0;
    for (int v : v0) z |= 1U << v;
    for (int v : v2) targets |= 1U << v;
    std::uint32_t on_path = 0;
    std::function<bool(int, int)> open_from = [&](int v, int came) {  // came: direction into v, 0 at start
      if ((targets >> v) & 1U) return true;
      for (int w = 0; w < n_; ++w) {
        if ((on_path >> w) & 1U) continue;
        for (int d : {+1, -1}) {
          if (d > 0 ? !g_.has_edge(v, w) : !g_.has_edge(w, v)) continue;
          if (came != 0 && blocks(v, came, d, z)) continue;
          on_path |= 1U << w;
          const bool open = open_from(w, d);
          on_path &= ~(1U << w);
          if (open) return true;
        }
      }
      return false;
    };
    for (int a : v1) {
      on_path = 1U << a;
      if (open_from(a, 0)) return false;
    }
    return true;
  }

 private:
  bool blocks(int v, int in_dir, int out_dir, std::uint32_t z) const {
    const bool in_z = (z >> v) & 1U;
    if (in_dir > 0 && out_dir < 0) return !in_z && (desc_[static_cast<std::size_t>(v)] & z) == 0;
    return in_z;
  }

  void mark(const std::vector<int>& path, const std::vector<int>& dirs, std::vector<std::uint8_t>& open) const {
    for (std::uint32_t z = 0; z < open.size(); ++z) {
      if (open[z]) continue;
      bool blocked = false;
      for (std::size_t k = 1; k + 1 < path.size() && !blocked; ++k) blocked = blocks(path[k], dirs[k - 1], dirs[k], z);
      if (!blocked) open[z] = 1;
    }
  }

  Digraph g_;
  int n_;
  std::vector<std::uint32_t> desc_;
};

}  // namespace fixtures
