#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "contagion/network.hpp"

namespace contagion {

/// Default rule resolving the equity fixed point. `Dag` is only meaningful
/// for acyclic redemption graphs, where mild and strict coincide.
enum class Rule { Mild, Strict, Dag };

const char* to_string(Rule rule);
/// Parses "mild", "strict" or "dag"; throws std::invalid_argument otherwise.
Rule parse_rule(const std::string& text);

/// Terminal operating assets of all firms for one scenario.
struct AssetScenario {
  std::vector<double> terminal_assets;  ///< X_i(T)
  std::vector<double> normal_draws;     ///< Z_i = B_i(T) / sqrt(T)
  std::uint64_t seed = 0;
};

/// X_i(T) = X_i exp((mu_i - sigma_i^2/2) T + sigma_i sqrt(T) Z_i).
AssetScenario scenario_from_normals(const FinancialNetwork& net, std::vector<double> normals);

/// Scenario with prescribed terminal assets (normal draws left empty).
AssetScenario scenario_from_assets(std::vector<double> terminal_assets);

/// Portable standard-normal stream: std::mt19937_64 (fully specified by the
/// standard), 53-bit uniforms on the open interval (0, 1), and the
/// Box-Muller transform, consuming draws in (cos, sin) pairs.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Draws successive independent scenarios from one seeded stream.
class ScenarioSampler {
 public:
  ScenarioSampler(const FinancialNetwork& net, std::uint64_t seed);
  /// Refills `out` in place (avoids reallocation inside Monte-Carlo loops).
  void draw(AssetScenario& out);

 private:
  const FinancialNetwork* net_;
  NormalStream normals_;
  std::uint64_t seed_;
  std::vector<double> log_drift_;
  std::vector<double> log_scale_;
};

/// The first scenario of the stream seeded with `seed`.
AssetScenario sample_assets(const FinancialNetwork& net, std::uint64_t seed);

/// SplitMix64 finaliser, used to derive independent shard seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// E_i(T) given the survivor set (survivors[j] != 0 means j pays in full).
double equity(const FinancialNetwork& net, std::span<const double> terminal_assets,
              std::span<const std::uint8_t> survivors, int i);

struct CascadeOutcome {
  std::vector<std::uint8_t> defaults;     ///< D_i
  std::vector<std::optional<int>> round;  ///< default round (mild) / survival round (strict)
  std::vector<double> equities;           ///< E_i(T) under the final survivor set
  Rule rule = Rule::Mild;

  std::vector<std::uint8_t> survivors() const;
  int num_defaults() const;
};

/// Maximal-survivor solution: round n defaults are firms insolvent given
/// non-payment only from defaults of earlier rounds.
CascadeOutcome mild_cascade(const FinancialNetwork& net, const AssetScenario& scenario);

/// Minimal-survivor solution: round n survivors are firms solvent given
/// payments only from survivors of earlier rounds.
CascadeOutcome strict_cascade(const FinancialNetwork& net, const AssetScenario& scenario);

/// Dispatches on the rule; `Dag` resolves with the mild cascade.
CascadeOutcome run_cascade(const FinancialNetwork& net, const AssetScenario& scenario, Rule rule);

/// True iff the default vector reproduces itself: D_i == (E_i(T) < 0) with
/// equities recomputed from the outcome's survivor set.
bool check_consistent(const FinancialNetwork& net, const AssetScenario& scenario,
                      std::span<const std::uint8_t> defaults);
inline bool check_consistent(const FinancialNetwork& net, const AssetScenario& scenario,
                             const CascadeOutcome& outcome) {
  return check_consistent(net, scenario, outcome.defaults);
}

/// Default indicators only, for Monte-Carlo loops. Reuses `work` storage.
struct CascadeWorkspace {
  std::vector<double> equity;
  std::vector<std::uint8_t> state;
  std::vector<std::uint8_t> queued;
  std::vector<int> frontier, next;
};
void cascade_defaults(const FinancialNetwork& net, std::span<const double> terminal_assets,
                      Rule rule, CascadeWorkspace& work, std::vector<std::uint8_t>& defaults);

}  // namespace contagion
