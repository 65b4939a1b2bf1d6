#pragma once

#include <cstdint>
#include <vector>

#include "contagion/inference.hpp"

namespace contagion {

/// Impact of the joint default of `sources` on the default law of `targets`.
struct ImpactReport {
  std::vector<int> sources;
  std::vector<int> targets;
  double asi = 0.0;  ///< total-variation distance, in [0, 1)
  double rsi = 0.0;  ///< log2 of the largest likelihood ratio, may be +inf
  Rule rule = Rule::Mild;
  /// Target configuration attaining the RSI maximum, targets[0] first.
  std::vector<std::uint8_t> argmax;
};

/// Largest target set accepted (2^20 joint configurations).
inline constexpr int kMaxImpactTargets = 20;

/// ASI and RSI from one pair of joint laws. Throws std::invalid_argument for
/// overlapping or oversized sets and ZeroProbabilityEvidence when the
/// sources cannot all default.
ImpactReport impact(const DiscreteBayesNet& bn, const std::vector<int>& sources,
                    const std::vector<int>& targets);

/// 1/2 sum_e |P[D_J = e | D_I = 1] - P[D_J = e]|.
double asi(const DiscreteBayesNet& bn, const std::vector<int>& sources, const std::vector<int>& targets);

/// max_e log2(P[D_J = e | D_I = 1] / P[D_J = e]) with 0/0 = 1.
double rsi(const DiscreteBayesNet& bn, const std::vector<int>& sources, const std::vector<int>& targets);

/// ASI/RSI from explicit laws indexed alike. Exposed for testing.
double total_variation(const std::vector<double>& conditional, const std::vector<double>& unconditional);
double max_log_ratio(const std::vector<double>& conditional, const std::vector<double>& unconditional,
                     std::size_t* argmax = nullptr);

/// Reports for every ordered pair (i, j), i != j, of `firms`, in row-major
/// order. Unconditional marginals are computed once per firm and reused.
std::vector<ImpactReport> impact_matrix(const DiscreteBayesNet& bn, const std::vector<int>& firms);

}  // namespace contagion
