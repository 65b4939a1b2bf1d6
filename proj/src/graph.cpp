#include "contagion/graph.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>

namespace contagion {

Digraph::Digraph(int num_vertices)
    : parents_(static_cast<std::size_t>(num_vertices)),
      children_(static_cast<std::size_t>(num_vertices)) {
  if (num_vertices < 0) throw std::invalid_argument("negative vertex count");
}

Digraph::Digraph(int num_vertices, std::span<const std::pair<int, int>> edges)
    : Digraph(num_vertices) {
  for (const auto& [u, v] : edges) add_edge(u, v);
}

void Digraph::add_edge(int u, int v) {
  const int n = num_vertices();
  if (u < 0 || u >= n || v < 0 || v >= n) throw std::out_of_range("edge endpoint out of range");
  if (u == v) throw std::invalid_argument("self-loops are not allowed");
  auto& ch = children_[static_cast<std::size_t>(u)];
  auto it = std::lower_bound(ch.begin(), ch.end(), v);
  if (it != ch.end() && *it == v) return;
  ch.insert(it, v);
  auto& pa = parents_[static_cast<std::size_t>(v)];
  pa.insert(std::lower_bound(pa.begin(), pa.end(), u), u);
  ++num_edges_;
}

bool Digraph::has_edge(int u, int v) const {
  const auto& ch = children_[static_cast<std::size_t>(u)];
  return std::binary_search(ch.begin(), ch.end(), v);
}

std::vector<std::pair<int, int>> Digraph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(num_edges_);
  for (int u = 0; u < num_vertices(); ++u)
    for (int v : children(u)) out.emplace_back(u, v);
  return out;
}

std::vector<int> Digraph::reachable_from(int v) const {
  std::vector<char> seen(static_cast<std::size_t>(num_vertices()), 0);
  std::vector<int> stack(children(v).begin(), children(v).end());
  std::vector<int> out;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(u)]) continue;
    seen[static_cast<std::size_t>(u)] = 1;
    out.push_back(u);
    for (int w : children(u))
      if (!seen[static_cast<std::size_t>(w)]) stack.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TopologicalResult topological_sort(const Digraph& g) {
  const int n = g.num_vertices();
  TopologicalResult result;
  std::vector<int> indegree(static_cast<std::size_t>(n));
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v) {
    indegree[static_cast<std::size_t>(v)] = static_cast<int>(g.parents(v).size());
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.push(v);
  }
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    result.order.push_back(v);
    for (int c : g.children(v))
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
  }
  result.is_dag = static_cast<int>(result.order.size()) == n;
  if (result.is_dag) return result;

  // Every unpeeled vertex keeps an unpeeled parent; walking parents must
  // revisit a vertex, which closes a cycle.
  int start = 0;
  while (indegree[static_cast<std::size_t>(start)] == 0) ++start;
  std::vector<int> position(static_cast<std::size_t>(n), -1);
  std::vector<int> walk;
  int v = start;
  while (position[static_cast<std::size_t>(v)] < 0) {
    position[static_cast<std::size_t>(v)] = static_cast<int>(walk.size());
    walk.push_back(v);
    for (int p : g.parents(v)) {
      if (indegree[static_cast<std::size_t>(p)] > 0) {
        v = p;
        break;
      }
    }
  }
  // walk[pos..] follows parent links backwards; reverse into edge direction.
  std::vector<int> cycle(walk.begin() + position[static_cast<std::size_t>(v)], walk.end());
  std::reverse(cycle.begin(), cycle.end());
  cycle.push_back(cycle.front());
  result.cycle = std::move(cycle);
  result.order.clear();
  return result;
}

RedemptionGraph::RedemptionGraph(Digraph g) : graph_(std::move(g)), n_(graph_.num_vertices()) {
  reach_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i)
    for (int j : graph_.reachable_from(i))
      reach_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
             static_cast<std::size_t>(j)] = 1;
}

std::vector<int> RedemptionGraph::descendants(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j)
    if (is_descendant(j, i)) out.push_back(j);
  return out;
}

std::vector<int> RedemptionGraph::ancestors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j)
    if (is_descendant(i, j)) out.push_back(j);
  return out;
}

std::vector<int> RedemptionGraph::non_descendants(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j)
    if (j != i && !is_descendant(j, i)) out.push_back(j);
  return out;
}

RedemptionGraph build_redemption_graph(const FinancialNetwork& net) {
  Digraph g(static_cast<int>(net.size()));
  for (const auto& loan : net.loans())
    if (loan.amount > 0.0 && loan.lender != loan.borrower) g.add_edge(loan.borrower, loan.lender);
  return RedemptionGraph(std::move(g));
}

int SccDecomposition::max_size() const {
  int m = 0;
  for (const auto& c : components) m = std::max(m, static_cast<int>(c.size()));
  return m;
}

namespace {

// Iterative Tarjan; returns the component id per vertex (ids in completion order).
std::vector<int> tarjan(const Digraph& g, int& num_components) {
  const int n = g.num_vertices();
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;  // vertex, next child position
  int counter = 0;
  num_components = 0;

  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      const auto vi = static_cast<std::size_t>(v);
      if (pos == 0 && index[vi] < 0) {
        index[vi] = low[vi] = counter++;
        stack.push_back(v);
        on_stack[vi] = 1;
      }
      auto ch = g.children(v);
      if (pos < ch.size()) {
        int w = ch[pos++];
        const auto wi = static_cast<std::size_t>(w);
        if (index[wi] < 0) {
          call.emplace_back(w, 0);
        } else if (on_stack[wi]) {
          low[vi] = std::min(low[vi], index[wi]);
        }
        continue;
      }
      if (low[vi] == index[vi]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp[static_cast<std::size_t>(w)] = num_components;
        } while (w != v);
        ++num_components;
      }
      int finished = v;
      call.pop_back();
      if (!call.empty()) {
        auto parent = static_cast<std::size_t>(call.back().first);
        low[parent] = std::min(low[parent], low[static_cast<std::size_t>(finished)]);
      }
    }
  }
  return comp;
}

}  // namespace

SccDecomposition scc_decompose(const Digraph& g) {
  const int n = g.num_vertices();
  int m = 0;
  std::vector<int> raw = tarjan(g, m);

  std::vector<std::vector<int>> members(static_cast<std::size_t>(m));
  for (int v = 0; v < n; ++v) members[static_cast<std::size_t>(raw[static_cast<std::size_t>(v)])].push_back(v);

  // Condensation, ordered parents-first with smallest contained vertex as tie-break.
  std::vector<std::vector<int>> cond_children(static_cast<std::size_t>(m));
  std::vector<int> indegree(static_cast<std::size_t>(m), 0);
  for (int u = 0; u < n; ++u) {
    for (int v : g.children(u)) {
      int cu = raw[static_cast<std::size_t>(u)], cv = raw[static_cast<std::size_t>(v)];
      if (cu == cv) continue;
      auto& ch = cond_children[static_cast<std::size_t>(cu)];
      if (std::find(ch.begin(), ch.end(), cv) == ch.end()) {
        ch.push_back(cv);
        ++indegree[static_cast<std::size_t>(cv)];
      }
    }
  }
  using Key = std::pair<int, int>;  // (min vertex, raw component)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (int c = 0; c < m; ++c)
    if (indegree[static_cast<std::size_t>(c)] == 0) ready.emplace(members[static_cast<std::size_t>(c)].front(), c);

  SccDecomposition out;
  out.component_of.assign(static_cast<std::size_t>(n), -1);
  out.component_size_of.assign(static_cast<std::size_t>(n), 0);
  while (!ready.empty()) {
    auto [first, c] = ready.top();
    ready.pop();
    const int id = static_cast<int>(out.components.size());
    const auto& mem = members[static_cast<std::size_t>(c)];
    for (int v : mem) {
      out.component_of[static_cast<std::size_t>(v)] = id;
      out.component_size_of[static_cast<std::size_t>(v)] = static_cast<int>(mem.size());
    }
    out.components.push_back(mem);
    for (int d : cond_children[static_cast<std::size_t>(c)])
      if (--indegree[static_cast<std::size_t>(d)] == 0)
        ready.emplace(members[static_cast<std::size_t>(d)].front(), d);
  }
  return out;
}

bool is_dag(const RedemptionGraph& g) { return scc_decompose(g).max_size() <= 1; }

}  // namespace contagion
