#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "contagion/bayesnet.hpp"
#include "contagion/factor.hpp"

namespace contagion {

/// (firm, D_i) pairs; firm indices are 0-based.
using Assignment = std::vector<std::pair<int, std::uint8_t>>;

struct Query {
  Assignment targets;
  Assignment evidence;  ///< applied to the final copy of each firm
  Rule rule = Rule::Mild;
};

/// The conditioning event has probability exactly zero under the model.
class ZeroProbabilityEvidence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The conditioning event is possible but its probability underflowed.
class NumericalUnderflow : public std::underflow_error {
 public:
  using std::underflow_error::underflow_error;
};

/// Rejection sampling accepted no scenario.
class NoAcceptedSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EliminationOptions {
  /// Drop nodes that are neither kept, observed, nor ancestors of either.
  bool prune_barren = true;
  /// Explicit elimination order (node ids). Nodes not listed are eliminated
  /// afterwards by min-fill. Empty means pure min-fill.
  std::vector<int> order;
};

/// CPT of node v as a factor over {v} u parents(v).
Factor cpt_factor(const DiscreteBayesNet& bn, int v);

/// Sums out every node except `keep` after fixing `observed` (node ids and
/// values). Returns the unnormalised factor over the sorted `keep` nodes.
Factor eliminate(const DiscreteBayesNet& bn, std::span<const int> keep,
                 std::span<const std::pair<int, std::uint8_t>> observed,
                 const EliminationOptions& options = {});

/// P[targets | evidence] by variable elimination. Throws
/// std::invalid_argument for malformed queries, ZeroProbabilityEvidence and
/// NumericalUnderflow for a vanishing conditioning event.
double query_prob(const DiscreteBayesNet& bn, const Query& q, const EliminationOptions& options = {});

/// Conditional joint law of the default indicators of `firms` given
/// `evidence`, indexed with firms[0] as the most significant bit.
std::vector<double> joint_law(const DiscreteBayesNet& bn, std::span<const int> firms,
                              const Assignment& evidence = {},
                              const EliminationOptions& options = {});

struct MonteCarloOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  int threads = 0;  ///< 0: CONTAGION_THREADS or hardware concurrency
};

/// Threads to use for a request of `requested` (0 = default).
int resolve_threads(int requested);

enum class CountMethod { Exact, MonteCarlo };
const char* to_string(CountMethod method);

struct CountDistribution {
  std::vector<double> probability;     ///< P[count = n], n = 0..size
  std::vector<double> standard_error;  ///< zeros for the exact method
  CountMethod method = CountMethod::Exact;
};

/// Law of the number of defaulting firms. Exact when the final copies of
/// all non-sink firms have at most 2^20 joint configurations; sinks are
/// conditionally independent given those and are convolved in. Otherwise
/// falls back to Monte Carlo with `fallback`.
CountDistribution count_distribution(const DiscreteBayesNet& bn, const MonteCarloOptions& fallback = {});

/// Law of the number of defaults among `subset`.
CountDistribution core_count_distribution(const DiscreteBayesNet& bn, std::span<const int> subset,
                                          const MonteCarloOptions& fallback = {});

struct MonteCarloEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t samples = 0;
};

/// Frequency estimate of P[targets | evidence] from cascade simulations
/// under q.rule; evidence handled by rejection. Results depend only on
/// (seed, samples), not on the thread count.
MonteCarloEstimate mc_estimate(const FinancialNetwork& net, const Query& q, std::uint64_t samples,
                               std::uint64_t seed, int threads = 0);

/// Monte-Carlo counts of each default configuration of `firms` (at most 20),
/// indexed with firms[0] as the most significant bit.
std::vector<std::uint64_t> mc_joint_counts(const FinancialNetwork& net, Rule rule,
                                           std::span<const int> firms, std::uint64_t samples,
                                           std::uint64_t seed, int threads = 0);

/// Monte-Carlo law of the number of defaults among `subset`.
CountDistribution mc_count_distribution(const FinancialNetwork& net, Rule rule,
                                        std::span<const int> subset, const MonteCarloOptions& options);

}  // namespace contagion
