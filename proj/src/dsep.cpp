#include "contagion/dsep.hpp"

#include <stdexcept>

namespace contagion {

DSeparator::DSeparator(const Digraph& g) : graph_(g), n_(g.num_vertices()) {
  reach_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);
  for (int u = 0; u < n_; ++u)
    for (int v : graph_.reachable_from(u))
      reach_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v)] = 1;
}

void DSeparator::check(const SeparationQuery& q) const {
  std::vector<std::uint8_t> owner(static_cast<std::size_t>(n_), 0);
  auto mark = [&](const std::vector<int>& set, std::uint8_t tag) {
    for (int v : set) {
      if (v < 0 || v >= n_) throw std::invalid_argument("vertex " + std::to_string(v) + " out of range");
      auto& o = owner[static_cast<std::size_t>(v)];
      if (o != 0 && o != tag) throw std::invalid_argument("separation sets must be disjoint");
      o = tag;
    }
  };
  mark(q.v1, 1);
  mark(q.v2, 2);
  mark(q.v0, 3);
}

std::vector<int> DSeparator::reachable(const std::vector<int>& v1, const std::vector<int>& v0) const {
  const auto n = static_cast<std::size_t>(n_);
  std::vector<std::uint8_t> observed(n, 0), opens_collider(n, 0);
  for (int z : v0) observed[static_cast<std::size_t>(z)] = 1;
  // A collider passes the ball when it is observed or has an observed descendant.
  for (int v = 0; v < n_; ++v) {
    if (observed[static_cast<std::size_t>(v)]) {
      opens_collider[static_cast<std::size_t>(v)] = 1;
      continue;
    }
    for (int z : v0)
      if (reach_[static_cast<std::size_t>(v) * n + static_cast<std::size_t>(z)]) {
        opens_collider[static_cast<std::size_t>(v)] = 1;
        break;
      }
  }

  // State (v, up): entered v against an edge, i.e. from one of its children.
  // State (v, down): entered v along an edge, from one of its parents.
  std::vector<std::uint8_t> seen_up(n, 0), seen_down(n, 0), hit(n, 0);
  std::vector<std::pair<int, bool>> stack;
  for (int s : v1) stack.emplace_back(s, true);
  while (!stack.empty()) {
    const auto [v, up] = stack.back();
    stack.pop_back();
    const auto iv = static_cast<std::size_t>(v);
    auto& seen = up ? seen_up : seen_down;
    if (seen[iv]) continue;
    seen[iv] = 1;
    if (!observed[iv]) hit[iv] = 1;

    if (up) {
      if (observed[iv]) continue;
      for (int p : graph_.parents(v)) stack.emplace_back(p, true);
      for (int c : graph_.children(v)) stack.emplace_back(c, false);
    } else {
      if (!observed[iv])
        for (int c : graph_.children(v)) stack.emplace_back(c, false);
      if (opens_collider[iv])
        for (int p : graph_.parents(v)) stack.emplace_back(p, true);
    }
  }
  std::vector<int> out;
  for (int v = 0; v < n_; ++v)
    if (hit[static_cast<std::size_t>(v)]) out.push_back(v);
  return out;
}

bool DSeparator::separated(const SeparationQuery& q) const {
  check(q);
  if (q.v1.empty() || q.v2.empty()) return true;
  const auto reached = reachable(q.v1, q.v0);
  std::vector<std::uint8_t> in_reach(static_cast<std::size_t>(n_), 0);
  for (int v : reached) in_reach[static_cast<std::size_t>(v)] = 1;
  for (int v : q.v2)
    if (in_reach[static_cast<std::size_t>(v)]) return false;
  return true;
}

bool d_separated(const Digraph& g, const SeparationQuery& q) { return DSeparator(g).separated(q); }

FirmIndependence firm_independence(const RedemptionGraph& g, const AugmentedGraph& augmented,
                                   const std::vector<int>& v1, const std::vector<int>& v2,
                                   const std::vector<int>& v0) {
  FirmIndependence out;
  out.separated_in_graph = d_separated(g.digraph(), {v1, v2, v0});

  auto finals = [&](const std::vector<int>& firms) {
    std::vector<int> ids;
    for (int f : firms) ids.push_back(augmented.final_copy(f));
    return ids;
  };
  auto all_copies = [&](const std::vector<int>& firms) {
    std::vector<int> ids;
    for (int f : firms)
      for (int c = 1; c <= augmented.copies(f); ++c) ids.push_back(augmented.id(f, c));
    return ids;
  };

  const DSeparator sep(augmented.digraph());
  out.augmented_query = {finals(v1), finals(v2), finals(v0)};
  out.independent = sep.separated(out.augmented_query);
  out.separated_given_all_copies = sep.separated({all_copies(v1), all_copies(v2), all_copies(v0)});
  return out;
}

}  // namespace contagion
