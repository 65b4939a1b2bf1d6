#pragma once

#include <string>
#include <vector>

#include "contagion/graph.hpp"

namespace contagion {

/// A vertex of the acyclic augmentation: copy `copy` (1-based) of `firm`.
struct CopyVertex {
  int firm = 0;
  int copy = 1;
  friend bool operator==(const CopyVertex&, const CopyVertex&) = default;
};

/// Which family of the augmentation produced an edge.
enum class EdgeFamily {
  CrossComponent,  ///< (j, N_j) -> (i, n), j a parent of i in another component
  OwnChain,        ///< (i, n) -> (i, n+1)
  SameOffsetOne,   ///< (j, n) -> (i, n+1), j a same-component parent
  SameOffsetTwo,   ///< (j, n) -> (i, n+2), j a same-component parent
};

/// The acyclic augmentation: firm i is replicated N_i times (N_i the size of
/// its strongly connected component). Vertex ids are dense:
/// id(i, n) = offset(i) + n - 1 with offsets the prefix sums of N_i.
class AugmentedGraph {
 public:
  AugmentedGraph() = default;

  int num_vertices() const { return graph_.num_vertices(); }
  int num_firms() const { return static_cast<int>(copies_.size()); }
  const Digraph& digraph() const { return graph_; }
  std::span<const int> parents(int v) const { return graph_.parents(v); }
  std::span<const int> children(int v) const { return graph_.children(v); }

  int copies(int firm) const { return copies_[static_cast<std::size_t>(firm)]; }
  int id(int firm, int copy) const { return offset_[static_cast<std::size_t>(firm)] + copy - 1; }
  int id(CopyVertex v) const { return id(v.firm, v.copy); }
  int final_copy(int firm) const { return id(firm, copies(firm)); }
  CopyVertex vertex(int id) const { return vertices_[static_cast<std::size_t>(id)]; }
  /// "i.n" with a 1-based firm index.
  std::string label(int id) const;

  const std::vector<int>& topological_order() const { return order_; }

  /// Parents of `v` in canonical order: cross-component parents by firm,
  /// then the own previous copy, then same-component offset-one parents by
  /// firm, then offset-two parents by firm.
  const std::vector<int>& canonical_parents(int v) const {
    return canonical_parents_[static_cast<std::size_t>(v)];
  }
  EdgeFamily family(int parent, int child) const;

  friend AugmentedGraph acyclic_augmentation(const RedemptionGraph& g,
                                             const SccDecomposition& scc);

 private:
  Digraph graph_;
  std::vector<int> copies_;
  std::vector<int> offset_;
  std::vector<CopyVertex> vertices_;
  std::vector<int> order_;
  std::vector<std::vector<int>> canonical_parents_;
  std::vector<int> component_of_;  // per firm
};

/// Builds the four edge families and a smallest-index-first topological order.
/// Throws std::logic_error if the result is not acyclic.
AugmentedGraph acyclic_augmentation(const RedemptionGraph& g, const SccDecomposition& scc);

struct DagCheck {
  bool is_dag = false;
  std::vector<int> order;
  std::vector<int> witness_cycle;
};

DagCheck verify_dag(const Digraph& g);
inline DagCheck verify_dag(const AugmentedGraph& g) { return verify_dag(g.digraph()); }

/// DOT rendering with vertices labelled "i.n".
std::string to_dot(const AugmentedGraph& g);

}  // namespace contagion
