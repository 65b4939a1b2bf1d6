#pragma once

#include <cstdint>
#include <vector>

#include "contagion/augment.hpp"
#include "contagion/graph.hpp"

namespace contagion {

/// Three pairwise-disjoint vertex sets: are v1 and v2 d-separated by v0?
struct SeparationQuery {
  std::vector<int> v1;
  std::vector<int> v2;
  std::vector<int> v0;
};

/// d-separation on a directed graph, cycles allowed.
///
/// A chain between v1 and v2 is a sequence of distinct vertices joined by
/// edges of either orientation. It is blocked when some inner vertex is a
/// non-collider in v0, or a collider that is neither in v0 nor has a
/// descendant in v0. The check itself is a linear-time reachability pass
/// over (vertex, direction) states, using descendant sets computed once at
/// construction.
class DSeparator {
 public:
  explicit DSeparator(const Digraph& g);

  const Digraph& graph() const { return graph_; }

  /// Throws std::invalid_argument for out-of-range or overlapping sets.
  bool separated(const SeparationQuery& q) const;

  /// Vertices joined to some vertex of v1 by a chain that v0 does not block.
  std::vector<int> reachable(const std::vector<int>& v1, const std::vector<int>& v0) const;

 private:
  void check(const SeparationQuery& q) const;

  Digraph graph_;
  int n_ = 0;
  std::vector<std::uint8_t> reach_;  // reach_[u * n + v]: v is a descendant of u
};

bool d_separated(const Digraph& g, const SeparationQuery& q);

/// Verdicts for the default indicators of two firm groups.
struct FirmIndependence {
  /// Certified: the final copies of v1 and v2 are d-separated in the
  /// augmentation given the final copies of v0, hence D_v1 and D_v2 are
  /// conditionally independent given D_v0.
  bool independent = false;
  /// The firm sets are d-separated in the redemption graph.
  bool separated_in_graph = false;
  /// Every copy of v1 is d-separated from every copy of v2 given every
  /// copy of v0; implied by separated_in_graph.
  bool separated_given_all_copies = false;
  /// The augmented query behind `independent`.
  SeparationQuery augmented_query;
};

FirmIndependence firm_independence(const RedemptionGraph& g, const AugmentedGraph& augmented,
                                   const std::vector<int>& v1, const std::vector<int>& v2,
                                   const std::vector<int>& v0);

}  // namespace contagion
