#include "contagion/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <thread>

namespace contagion {

namespace {

constexpr std::size_t kMaxFactorScope = 26;  // 2^26 doubles = 512 MiB
constexpr std::size_t kMaxExactConfigsLog2 = 20;
constexpr int kShards = 64;

// Neumaier's compensated summation.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

Factor node_factor(const DiscreteBayesNet& bn, int v, bool support) {
  const auto& node = bn.node(v);
  const std::size_t k = node.parents.size();
  std::vector<int> scope(node.parents.begin(), node.parents.end());
  scope.push_back(v);
  std::sort(scope.begin(), scope.end());

  // Weight of each scope position inside the CPT row (0 for the node itself).
  const std::size_t m = scope.size();
  std::vector<std::size_t> row_weight(m, 0);
  std::size_t self_bit = 0;
  for (std::size_t p = 0; p < m; ++p) {
    const std::size_t bit = std::size_t{1} << (m - 1 - p);
    if (scope[p] == v) {
      self_bit = bit;
      continue;
    }
    const auto slot = static_cast<std::size_t>(
        std::find(node.parents.begin(), node.parents.end(), scope[p]) - node.parents.begin());
    row_weight[p] = std::size_t{1} << (k - 1 - slot);
  }

  std::vector<double> table(std::size_t{1} << m);
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    std::size_t row = 0;
    for (std::size_t p = 0; p < m; ++p)
      if (idx & (std::size_t{1} << (m - 1 - p))) row += row_weight[p];
    const double one = node.cpt[row];
    double value = (idx & self_bit) ? one : 1.0 - one;
    if (support) value = value > 0.0 ? 1.0 : 0.0;
    table[idx] = value;
  }
  return Factor(std::move(scope), std::move(table));
}

Factor multiply_all(std::vector<Factor> factors) {
  std::vector<int> scope;
  for (const auto& f : factors) scope.insert(scope.end(), f.scope().begin(), f.scope().end());
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  if (scope.size() > kMaxFactorScope)
    throw std::length_error("elimination would create a factor over " + std::to_string(scope.size()) +
                            " variables");
  // Small factors first keeps intermediate tables small.
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.size() < b.size(); });
  Factor acc;
  for (const auto& f : factors) acc = factor_product(acc, f);
  return acc;
}

Factor eliminate_impl(const DiscreteBayesNet& bn, std::span<const int> keep_in,
                      std::span<const std::pair<int, std::uint8_t>> observed,
                      const EliminationOptions& options, bool support) {
  const int n = bn.num_nodes();
  std::vector<int> keep(keep_in.begin(), keep_in.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  std::vector<std::uint8_t> role(static_cast<std::size_t>(n), 0);  // 1 keep, 2 observed
  for (int v : keep) {
    if (v < 0 || v >= n) throw std::out_of_range("node id out of range");
    role[static_cast<std::size_t>(v)] = 1;
  }
  for (const auto& [v, value] : observed) {
    if (v < 0 || v >= n) throw std::out_of_range("node id out of range");
    if (role[static_cast<std::size_t>(v)] == 1)
      throw std::invalid_argument("a node cannot be both kept and observed");
    role[static_cast<std::size_t>(v)] = 2;
  }

  std::vector<std::uint8_t> relevant(static_cast<std::size_t>(n), options.prune_barren ? 0 : 1);
  if (options.prune_barren) {
    std::vector<int> stack;
    for (int v = 0; v < n; ++v)
      if (role[static_cast<std::size_t>(v)]) {
        relevant[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int p : bn.graph().parents(v))
        if (!relevant[static_cast<std::size_t>(p)]) {
          relevant[static_cast<std::size_t>(p)] = 1;
          stack.push_back(p);
        }
    }
  }

  std::vector<Factor> factors;
  for (int v = 0; v < n; ++v)
    if (relevant[static_cast<std::size_t>(v)])
      factors.push_back(reduce_evidence(node_factor(bn, v, support), observed));

  // Interaction graph over the variables still present.
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (const auto& f : factors)
    for (int a : f.scope())
      for (int b : f.scope())
        if (a != b) adj[static_cast<std::size_t>(a)].insert(b);

  std::set<int> pending;
  for (int v = 0; v < n; ++v)
    if (relevant[static_cast<std::size_t>(v)] && role[static_cast<std::size_t>(v)] == 0) pending.insert(v);

  auto fill_in = [&](int v) {
    const auto& nb = adj[static_cast<std::size_t>(v)];
    std::size_t fill = 0;
    for (auto a = nb.begin(); a != nb.end(); ++a)
      for (auto b = std::next(a); b != nb.end(); ++b)
        if (!adj[static_cast<std::size_t>(*a)].count(*b)) ++fill;
    return fill;
  };

  std::size_t explicit_pos = 0;
  while (!pending.empty()) {
    int var = -1;
    while (explicit_pos < options.order.size()) {
      const int cand = options.order[explicit_pos++];
      if (pending.count(cand)) {
        var = cand;
        break;
      }
    }
    if (var < 0) {
      std::size_t best = std::numeric_limits<std::size_t>::max();
      for (int v : pending) {  // ascending, so ties keep the smallest id
        const std::size_t fill = fill_in(v);
        if (fill < best) {
          best = fill;
          var = v;
          if (fill == 0) break;
        }
      }
    }
    pending.erase(var);

    std::vector<Factor> touching, rest;
    for (auto& f : factors) (f.contains(var) ? touching : rest).push_back(std::move(f));
    if (!touching.empty()) rest.push_back(marginalize(multiply_all(std::move(touching)), var));
    factors = std::move(rest);

    const auto nb = adj[static_cast<std::size_t>(var)];
    for (int a : nb) {
      adj[static_cast<std::size_t>(a)].erase(var);
      for (int b : nb)
        if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
    }
    adj[static_cast<std::size_t>(var)].clear();
  }
  return multiply_all(std::move(factors));
}

void validate_assignment(const Assignment& a, int num_firms, std::vector<std::uint8_t>& seen,
                         const char* what) {
  for (const auto& [firm, value] : a) {
    if (firm < 0 || firm >= num_firms)
      throw std::invalid_argument(std::string(what) + " firm " + std::to_string(firm + 1) +
                                  " is out of range");
    if (seen[static_cast<std::size_t>(firm)])
      throw std::invalid_argument("firm " + std::to_string(firm + 1) +
                                  " appears more than once in the query");
    seen[static_cast<std::size_t>(firm)] = 1;
    if (value > 1) throw std::invalid_argument("default indicators must be 0 or 1");
  }
}

void validate_query(const Query& q, int num_firms) {
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(num_firms), 0);
  validate_assignment(q.targets, num_firms, seen, "target");
  validate_assignment(q.evidence, num_firms, seen, "evidence");
}

bool rules_compatible(const DiscreteBayesNet& bn, Rule rule) {
  return rule == bn.rule() || bn.components().max_size() <= 1;
}

std::vector<std::pair<int, std::uint8_t>> to_nodes(const DiscreteBayesNet& bn, const Assignment& a) {
  std::vector<std::pair<int, std::uint8_t>> out;
  for (const auto& [firm, value] : a) out.emplace_back(bn.final_node(firm), value);
  return out;
}

// Conditioning mass is zero: decide whether the event is impossible or the
// probability merely underflowed, by repeating the elimination on supports.
[[noreturn]] void raise_vanishing_evidence(const DiscreteBayesNet& bn, std::span<const int> keep,
                                           std::span<const std::pair<int, std::uint8_t>> observed,
                                           const EliminationOptions& options) {
  const Factor s = eliminate_impl(bn, keep, observed, options, true);
  if (s.sum() == 0.0) throw ZeroProbabilityEvidence("evidence has probability zero");
  throw NumericalUnderflow("probability of the evidence underflowed to zero");
}

// Index into a factor over sorted node ids for values given per node.
std::size_t factor_index(const Factor& f, std::span<const std::pair<int, std::uint8_t>> values) {
  const std::size_t k = f.scope().size();
  std::size_t idx = 0;
  for (const auto& [node, value] : values) {
    const int pos = f.position(node);
    if (pos >= 0 && value) idx |= std::size_t{1} << (k - 1 - static_cast<std::size_t>(pos));
  }
  return idx;
}

template <class Acc, class Visit>
std::vector<Acc> run_shards(const FinancialNetwork& net, Rule rule, std::uint64_t samples,
                            std::uint64_t seed, int threads, const Acc& init, Visit visit) {
  std::vector<Acc> acc(kShards, init);
  std::atomic<int> next{0};
  auto worker = [&] {
    AssetScenario scenario;
    CascadeWorkspace work;
    std::vector<std::uint8_t> defaults;
    for (int s = next++; s < kShards; s = next++) {
      const std::uint64_t count = samples / kShards + (static_cast<std::uint64_t>(s) < samples % kShards ? 1 : 0);
      ScenarioSampler sampler(net, mix_seed(seed, static_cast<std::uint64_t>(s)));
      for (std::uint64_t t = 0; t < count; ++t) {
        sampler.draw(scenario);
        cascade_defaults(net, scenario.terminal_assets, rule, work, defaults);
        visit(acc[static_cast<std::size_t>(s)], defaults);
      }
    }
  };
  const int n_threads = std::min(resolve_threads(threads), kShards);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return acc;
}

}  // namespace

Factor cpt_factor(const DiscreteBayesNet& bn, int v) { return node_factor(bn, v, false); }

Factor eliminate(const DiscreteBayesNet& bn, std::span<const int> keep,
                 std::span<const std::pair<int, std::uint8_t>> observed,
                 const EliminationOptions& options) {
  return eliminate_impl(bn, keep, observed, options, false);
}

double query_prob(const DiscreteBayesNet& bn, const Query& q, const EliminationOptions& options) {
  validate_query(q, bn.num_firms());
  if (!rules_compatible(bn, q.rule))
    throw std::invalid_argument(std::string("query rule '") + to_string(q.rule) +
                                "' does not match the network compiled for '" + to_string(bn.rule()) + "'");
  const auto targets = to_nodes(bn, q.targets);
  const auto observed = to_nodes(bn, q.evidence);
  std::vector<int> keep;
  for (const auto& t : targets) keep.push_back(t.first);

  const Factor f = eliminate_impl(bn, keep, observed, options, false);
  const double mass = f.sum();
  if (!(mass > 0.0)) raise_vanishing_evidence(bn, keep, observed, options);
  return std::clamp(f[factor_index(f, targets)] / mass, 0.0, 1.0);
}

std::vector<double> joint_law(const DiscreteBayesNet& bn, std::span<const int> firms,
                              const Assignment& evidence, const EliminationOptions& options) {
  Query q;
  for (int firm : firms) q.targets.emplace_back(firm, 0);
  q.evidence = evidence;
  q.rule = bn.rule();
  validate_query(q, bn.num_firms());
  if (firms.size() > kMaxExactConfigsLog2) throw std::length_error("joint law limited to 20 firms");

  const auto observed = to_nodes(bn, evidence);
  std::vector<int> keep;
  for (int firm : firms) keep.push_back(bn.final_node(firm));
  const Factor f = eliminate_impl(bn, keep, observed, options, false);
  const double mass = f.sum();
  if (!(mass > 0.0)) raise_vanishing_evidence(bn, keep, observed, options);

  const std::size_t k = firms.size();
  std::vector<double> law(std::size_t{1} << k);
  std::vector<std::pair<int, std::uint8_t>> values(k);
  for (std::size_t idx = 0; idx < law.size(); ++idx) {
    for (std::size_t a = 0; a < k; ++a)
      values[a] = {keep[a], static_cast<std::uint8_t>((idx >> (k - 1 - a)) & 1U)};
    law[idx] = f[factor_index(f, values)] / mass;
  }
  return law;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CONTAGION_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

const char* to_string(CountMethod method) {
  return method == CountMethod::Exact ? "exact" : "monte-carlo";
}

CountDistribution count_distribution(const DiscreteBayesNet& bn, const MonteCarloOptions& fallback) {
  std::vector<int> all(static_cast<std::size_t>(bn.num_firms()));
  for (int i = 0; i < bn.num_firms(); ++i) all[static_cast<std::size_t>(i)] = i;
  return core_count_distribution(bn, all, fallback);
}

CountDistribution core_count_distribution(const DiscreteBayesNet& bn, std::span<const int> subset,
                                          const MonteCarloOptions& fallback) {
  const int n = bn.num_firms();
  std::vector<std::uint8_t> in_subset(static_cast<std::size_t>(n), 0);
  for (int firm : subset) {
    if (firm < 0 || firm >= n) throw std::invalid_argument("subset firm out of range");
    if (in_subset[static_cast<std::size_t>(firm)]) throw std::invalid_argument("subset has duplicates");
    in_subset[static_cast<std::size_t>(firm)] = 1;
  }
  const auto& g = bn.redemption_graph();

  // Firms whose final copies must be resolved jointly: non-sink members of
  // the subset and all parents of sink members.
  std::vector<std::uint8_t> joint_firm(static_cast<std::size_t>(n), 0);
  std::vector<int> sinks;
  for (int firm : subset) {
    if (g.children(firm).empty()) {
      sinks.push_back(firm);
      for (int p : g.parents(firm)) joint_firm[static_cast<std::size_t>(p)] = 1;
    } else {
      joint_firm[static_cast<std::size_t>(firm)] = 1;
    }
  }
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (joint_firm[static_cast<std::size_t>(i)]) keep.push_back(bn.final_node(i));
  std::sort(keep.begin(), keep.end());

  if (keep.size() > kMaxExactConfigsLog2)
    return mc_count_distribution(bn.network(), bn.rule(), subset, fallback);

  const Factor f = eliminate(bn, keep, {});
  const std::size_t k = keep.size();
  auto bit_of = [&](std::size_t idx, int node) {
    const auto pos = static_cast<std::size_t>(f.position(node));
    return (idx >> (k - 1 - pos)) & 1U;
  };

  std::vector<CompensatedSum> dist(subset.size() + 1);
  std::vector<double> conv, next;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const double p = f[idx];
    if (p == 0.0) continue;
    std::size_t base = 0;
    for (int firm : subset)
      if (!g.children(firm).empty() && bit_of(idx, bn.final_node(firm))) ++base;

    conv.assign(1, 1.0);
    for (int s : sinks) {
      const auto& node = bn.node(bn.final_node(s));
      std::size_t row = 0;
      for (int parent : node.parents) row = (row << 1) | bit_of(idx, parent);
      const double q = node.cpt[row];
      next.assign(conv.size() + 1, 0.0);
      for (std::size_t m = 0; m < conv.size(); ++m) {
        next[m] += conv[m] * (1.0 - q);
        next[m + 1] += conv[m] * q;
      }
      conv.swap(next);
    }
    for (std::size_t m = 0; m < conv.size(); ++m) dist[base + m].add(p * conv[m]);
  }

  CountDistribution out;
  out.method = CountMethod::Exact;
  out.probability.resize(dist.size());
  out.standard_error.assign(dist.size(), 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < dist.size(); ++m) total += out.probability[m] = dist[m].value();
  if (total > 0.0)
    for (double& v : out.probability) v /= total;
  return out;
}

MonteCarloEstimate mc_estimate(const FinancialNetwork& net, const Query& q, std::uint64_t samples,
                               std::uint64_t seed, int threads) {
  if (samples < 1) throw std::invalid_argument("at least one sample is required");
  validate_query(q, static_cast<int>(net.size()));
  struct Tally {
    std::uint64_t accepted = 0, hits = 0;
  };
  auto matches = [](const Assignment& a, const std::vector<std::uint8_t>& d) {
    for (const auto& [firm, value] : a)
      if (d[static_cast<std::size_t>(firm)] != value) return false;
    return true;
  };
  const auto shards = run_shards(net, q.rule, samples, seed, threads, Tally{},
                                 [&](Tally& t, const std::vector<std::uint8_t>& d) {
                                   if (!matches(q.evidence, d)) return;
                                   ++t.accepted;
                                   if (matches(q.targets, d)) ++t.hits;
                                 });
  MonteCarloEstimate est;
  est.samples = samples;
  std::uint64_t hits = 0;
  for (const auto& t : shards) {
    est.accepted += t.accepted;
    hits += t.hits;
  }
  if (est.accepted == 0)
    throw NoAcceptedSamples("no simulated scenario satisfied the evidence");
  const double acc = static_cast<double>(est.accepted);
  est.probability = static_cast<double>(hits) / acc;
  est.standard_error = std::sqrt(est.probability * (1.0 - est.probability) / acc);
  return est;
}

std::vector<std::uint64_t> mc_joint_counts(const FinancialNetwork& net, Rule rule,
                                           std::span<const int> firms, std::uint64_t samples,
                                           std::uint64_t seed, int threads) {
  if (firms.size() > kMaxExactConfigsLog2) throw std::length_error("joint counts limited to 20 firms");
  for (int firm : firms)
    if (firm < 0 || firm >= static_cast<int>(net.size())) throw std::invalid_argument("firm out of range");
  const std::size_t k = firms.size();
  const auto shards = run_shards(net, rule, samples, seed, threads,
                                 std::vector<std::uint64_t>(std::size_t{1} << k, 0),
                                 [&](std::vector<std::uint64_t>& c, const std::vector<std::uint8_t>& d) {
                                   std::size_t idx = 0;
                                   for (int firm : firms) idx = (idx << 1) | d[static_cast<std::size_t>(firm)];
                                   ++c[idx];
                                 });
  std::vector<std::uint64_t> counts(std::size_t{1} << k, 0);
  for (const auto& c : shards)
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += c[i];
  return counts;
}

CountDistribution mc_count_distribution(const FinancialNetwork& net, Rule rule,
                                        std::span<const int> subset, const MonteCarloOptions& options) {
  if (options.samples < 1) throw std::invalid_argument("at least one sample is required");
  const std::size_t m = subset.size();
  const auto shards = run_shards(net, rule, options.samples, options.seed, options.threads,
                                 std::vector<std::uint64_t>(m + 1, 0),
                                 [&](std::vector<std::uint64_t>& c, const std::vector<std::uint8_t>& d) {
                                   std::size_t count = 0;
                                   for (int firm : subset) count += d[static_cast<std::size_t>(firm)];
                                   ++c[count];
                                 });
  CountDistribution out;
  out.method = CountMethod::MonteCarlo;
  out.probability.assign(m + 1, 0.0);
  out.standard_error.assign(m + 1, 0.0);
  const double total = static_cast<double>(options.samples);
  for (std::size_t c = 0; c <= m; ++c) {
    std::uint64_t hits = 0;
    for (const auto& s : shards) hits += s[c];
    const double p = static_cast<double>(hits) / total;
    out.probability[c] = p;
    out.standard_error[c] = std::sqrt(p * (1.0 - p) / total);
  }
  return out;
}

}  // namespace contagion
