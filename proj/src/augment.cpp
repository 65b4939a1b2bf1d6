#include "contagion/augment.hpp"

#include <sstream>
#include <stdexcept>

namespace contagion {

std::string AugmentedGraph::label(int id) const {
  const auto v = vertex(id);
  return std::to_string(v.firm + 1) + "." + std::to_string(v.copy);
}

EdgeFamily AugmentedGraph::family(int parent, int child) const {
  const auto p = vertex(parent), c = vertex(child);
  if (p.firm == c.firm) return EdgeFamily::OwnChain;
  if (component_of_[static_cast<std::size_t>(p.firm)] != component_of_[static_cast<std::size_t>(c.firm)])
    return EdgeFamily::CrossComponent;
  return c.copy - p.copy == 1 ? EdgeFamily::SameOffsetOne : EdgeFamily::SameOffsetTwo;
}

AugmentedGraph acyclic_augmentation(const RedemptionGraph& g, const SccDecomposition& scc) {
  const int n = g.num_vertices();
  AugmentedGraph out;
  out.copies_ = scc.component_size_of;
  out.component_of_ = scc.component_of;
  out.offset_.assign(static_cast<std::size_t>(n), 0);
  int total = 0;
  for (int i = 0; i < n; ++i) {
    out.offset_[static_cast<std::size_t>(i)] = total;
    for (int c = 1; c <= out.copies_[static_cast<std::size_t>(i)]; ++c) out.vertices_.push_back({i, c});
    total += out.copies_[static_cast<std::size_t>(i)];
  }
  out.graph_ = Digraph(total);
  out.canonical_parents_.assign(static_cast<std::size_t>(total), {});

  for (int i = 0; i < n; ++i) {
    const int ni = out.copies(i);
    std::vector<int> cross, same;
    for (int j : g.parents(i)) {
      if (scc.component_of[static_cast<std::size_t>(j)] == scc.component_of[static_cast<std::size_t>(i)])
        same.push_back(j);
      else
        cross.push_back(j);
    }
    for (int n_copy = 1; n_copy <= ni; ++n_copy) {
      const int child = out.id(i, n_copy);
      auto& canon = out.canonical_parents_[static_cast<std::size_t>(child)];
      for (int j : cross) canon.push_back(out.final_copy(j));
      if (n_copy > 1) canon.push_back(out.id(i, n_copy - 1));
      if (n_copy > 1)
        for (int j : same) canon.push_back(out.id(j, n_copy - 1));
      if (n_copy > 2)
        for (int j : same) canon.push_back(out.id(j, n_copy - 2));
      for (int p : canon) out.graph_.add_edge(p, child);
    }
  }

  auto topo = topological_sort(out.graph_);
  if (!topo.is_dag) throw std::logic_error("acyclic augmentation produced a cycle");
  out.order_ = std::move(topo.order);
  return out;
}

DagCheck verify_dag(const Digraph& g) {
  auto topo = topological_sort(g);
  return {topo.is_dag, std::move(topo.order), std::move(topo.cycle)};
}

std::string to_dot(const AugmentedGraph& g) {
  std::ostringstream os;
  os << "digraph augmented {\n";
  for (int v = 0; v < g.num_vertices(); ++v) os << "  \"" << g.label(v) << "\";\n";
  for (const auto& [u, v] : g.digraph().edges())
    os << "  \"" << g.label(u) << "\" -> \"" << g.label(v) << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace contagion
