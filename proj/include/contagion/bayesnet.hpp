#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contagion/augment.hpp"
#include "contagion/cascade.hpp"
#include "contagion/graph.hpp"
#include "contagion/network.hpp"

namespace contagion {

/// Standard normal distribution function, via std::erfc.
double normal_cdf(double x);

/// Conditional default probability of firm i when exactly the debtors in
/// `paying` redeem their loans to i:
///   Phi(-(log Q + (mu_i - sigma_i^2/2) T) / (sigma_i sqrt T)),
///   Q = X_i / (obligations_i - e^{r0 T} K_i - sum_{j in paying} e^{r_ij T} L_ij)^+.
/// Returns 0 when the denominator is not positive. `paying` should be a
/// subset of the parents of i; other firms contribute nothing.
double default_phi(const FinancialNetwork& net, int i, std::span<const int> paying);

/// Same quantity expressed through the total repayment received.
double default_phi_received(const FinancialNetwork& net, int i, double received);
/// 1 - default_phi_received, evaluated without cancellation.
double survival_phi_received(const FinancialNetwork& net, int i, double received);

/// One binary node of the compiled network.
///
/// All nodes are stored as default-type bits: under the mild rule and for
/// DAGs the node is D_{i,n}; under the strict rule it is 1 - S_{i,n} ("has
/// not survived by round n"). `cpt[row]` is P[node = 1 | parents], where row
/// encodes the parent values in `parents` order with the first parent as
/// the most significant bit.
struct BnNode {
  int firm = 0;
  int copy = 1;
  std::vector<int> parents;
  std::vector<double> cpt;

  double prob_one(std::size_t row) const { return cpt[row]; }
};

/// Bayesian network over the acyclic augmentation (or the redemption graph
/// itself when it is a DAG). Node ids coincide with augmented vertex ids.
class DiscreteBayesNet {
 public:
  Rule rule() const { return rule_; }
  const FinancialNetwork& network() const { return net_; }
  const RedemptionGraph& redemption_graph() const { return graph_; }
  const SccDecomposition& components() const { return scc_; }
  const AugmentedGraph& graph() const { return augmented_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_firms() const { return static_cast<int>(net_.size()); }
  const BnNode& node(int v) const { return nodes_[static_cast<std::size_t>(v)]; }
  const std::vector<BnNode>& nodes() const { return nodes_; }
  /// Node carrying the firm's default indicator (its final copy).
  int final_node(int firm) const { return augmented_.final_copy(firm); }
  /// "D" for mild/DAG semantics, "notS" for strict.
  std::string node_semantics() const;
  std::string node_label(int v) const;

  friend DiscreteBayesNet build_bn(const FinancialNetwork& net, Rule rule);

 private:
  Rule rule_ = Rule::Mild;
  FinancialNetwork net_;
  RedemptionGraph graph_;
  SccDecomposition scc_;
  AugmentedGraph augmented_;
  std::vector<BnNode> nodes_;
};

/// Largest parent count accepted per node (table size 2^25).
inline constexpr int kMaxParents = 25;

/// Compiles the network under the given rule. Throws std::invalid_argument
/// for Rule::Dag on a cyclic graph and std::length_error when a node would
/// exceed kMaxParents.
DiscreteBayesNet build_bn(const FinancialNetwork& net, Rule rule);

inline DiscreteBayesNet build_dag_bn(const FinancialNetwork& net) { return build_bn(net, Rule::Dag); }
inline DiscreteBayesNet build_mild_bn(const FinancialNetwork& net) { return build_bn(net, Rule::Mild); }
inline DiscreteBayesNet build_strict_bn(const FinancialNetwork& net) { return build_bn(net, Rule::Strict); }

struct ConfigProbability {
  double probability = 0.0;
  /// True when the product formula is an equality for the stated rule;
  /// otherwise it is only an upper bound.
  bool exact = false;
};

/// prod_{i not in S} Phi(i, S, T) * prod_{i in S} (1 - Phi(i, S, T)) for
/// the survivor set S (survivors[i] != 0). Exactness: with no rule (any
/// consistent extension) or Rule::Dag both induced subgraphs on S and its
/// complement must be acyclic; under the mild rule the complement, under
/// the strict rule S.
ConfigProbability joint_config_prob(const FinancialNetwork& net, const RedemptionGraph& g,
                                    std::span<const std::uint8_t> survivors,
                                    std::optional<Rule> rule = std::nullopt);

}  // namespace contagion
