#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "contagion/network.hpp"

namespace contagion {

/// Simple directed graph on vertices 0..n-1 without self-loops or parallel
/// edges. Parent and child lists are sorted ascending.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(int num_vertices);
  Digraph(int num_vertices, std::span<const std::pair<int, int>> edges);

  /// Adds u -> v; ignores duplicates. Throws on self-loops or bad indices.
  void add_edge(int u, int v);

  int num_vertices() const { return static_cast<int>(children_.size()); }
  std::size_t num_edges() const { return num_edges_; }
  bool has_edge(int u, int v) const;
  std::span<const int> parents(int v) const { return parents_[static_cast<std::size_t>(v)]; }
  std::span<const int> children(int v) const { return children_[static_cast<std::size_t>(v)]; }

  /// All edges sorted lexicographically.
  std::vector<std::pair<int, int>> edges() const;

  /// Vertices reachable from `v` by a directed path of length >= 1.
  std::vector<int> reachable_from(int v) const;

 private:
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::size_t num_edges_ = 0;
};

/// Outcome of a topological sort: an order, or a witness cycle.
struct TopologicalResult {
  std::vector<int> order;   ///< complete order when is_dag
  std::vector<int> cycle;   ///< v0 -> v1 -> ... -> v0 when not a DAG
  bool is_dag = false;
};

/// Kahn peeling; among ready vertices the smallest index goes first.
TopologicalResult topological_sort(const Digraph& g);

/// Redemption graph: edge i -> j exactly when L_ji > 0 (i owes j). Carries
/// descendant/ancestor indexes.
class RedemptionGraph {
 public:
  RedemptionGraph() = default;
  explicit RedemptionGraph(Digraph g);

  const Digraph& digraph() const { return graph_; }
  int num_vertices() const { return graph_.num_vertices(); }
  std::span<const int> parents(int v) const { return graph_.parents(v); }
  std::span<const int> children(int v) const { return graph_.children(v); }
  bool has_edge(int u, int v) const { return graph_.has_edge(u, v); }

  /// j in de_G(i): a directed path i -> ... -> j exists (j may equal i on a cycle).
  bool is_descendant(int j, int of) const {
    return reach_[static_cast<std::size_t>(of) * static_cast<std::size_t>(n_) +
                  static_cast<std::size_t>(j)] != 0;
  }
  bool is_ancestor(int j, int of) const { return is_descendant(of, j); }
  std::vector<int> descendants(int i) const;
  std::vector<int> ancestors(int i) const;
  /// V \ ({i} u de(i)).
  std::vector<int> non_descendants(int i) const;

 private:
  Digraph graph_;
  int n_ = 0;
  std::vector<std::uint8_t> reach_;
};

RedemptionGraph build_redemption_graph(const FinancialNetwork& net);

/// Strongly connected components in an order where every parent of a vertex
/// of component k lies in a component with index <= k.
struct SccDecomposition {
  std::vector<std::vector<int>> components;  ///< each sorted ascending
  std::vector<int> component_of;
  std::vector<int> component_size_of;  ///< N_i

  int max_size() const;
};

/// Tarjan's algorithm followed by a smallest-vertex-first topological
/// ordering of the condensation.
SccDecomposition scc_decompose(const Digraph& g);
inline SccDecomposition scc_decompose(const RedemptionGraph& g) {
  return scc_decompose(g.digraph());
}

/// True iff every strongly connected component is a singleton.
bool is_dag(const RedemptionGraph& g);

}  // namespace contagion
