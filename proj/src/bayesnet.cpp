#include "contagion/bayesnet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace contagion {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Distance to default in standard deviations; +inf when the firm cannot
// default (shortfall not positive).
double solvency_score(const FinancialNetwork& net, int i, double received) {
  const double shortfall = net.total_obligations(i) - net.cash_at_horizon(i) - received;
  if (!(shortfall > 0.0)) return std::numeric_limits<double>::infinity();
  const auto& f = net.firm(i);
  const double T = net.horizon();
  return (std::log(f.operating_assets_0) - std::log(shortfall) +
          (f.drift - 0.5 * f.volatility * f.volatility) * T) /
         (f.volatility * std::sqrt(T));
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

bool induced_acyclic(const RedemptionGraph& g, std::span<const std::uint8_t> keep, bool value) {
  const int n = g.num_vertices();
  Digraph sub(n);
  for (int u = 0; u < n; ++u) {
    if ((keep[static_cast<std::size_t>(u)] != 0) != value) continue;
    for (int v : g.children(u))
      if ((keep[static_cast<std::size_t>(v)] != 0) == value) sub.add_edge(u, v);
  }
  return topological_sort(sub).is_dag;
}

}  // namespace

double default_phi_received(const FinancialNetwork& net, int i, double received) {
  const double z = solvency_score(net, i, received);
  if (std::isinf(z)) return 0.0;
  return normal_cdf(-z);
}

double survival_phi_received(const FinancialNetwork& net, int i, double received) {
  const double z = solvency_score(net, i, received);
  if (std::isinf(z)) return 1.0;
  return normal_cdf(z);
}

double default_phi(const FinancialNetwork& net, int i, std::span<const int> paying) {
  double received = 0.0;
  for (int k : net.claims(i)) {
    const auto& loan = net.loans()[static_cast<std::size_t>(k)];
    if (std::find(paying.begin(), paying.end(), loan.borrower) != paying.end())
      received += net.redemption_value(k);
  }
  return default_phi_received(net, i, received);
}

std::string DiscreteBayesNet::node_semantics() const {
  return rule_ == Rule::Strict ? "notS" : "D";
}

std::string DiscreteBayesNet::node_label(int v) const {
  const auto& nd = node(v);
  return node_semantics() + "_" + std::to_string(nd.firm + 1) + "." + std::to_string(nd.copy);
}

namespace {

// Role of each canonical parent slot of node (i, n).
struct ParentLayout {
  std::vector<double> cross_value;  // repayment from each cross-component parent
  bool has_own = false;
  std::vector<double> same_value;   // repayment from each same-component parent
  bool has_offset_one = false;
  bool has_offset_two = false;
};

double claim_from(const FinancialNetwork& net, int lender, int borrower) {
  for (int k : net.claims(lender))
    if (net.loans()[static_cast<std::size_t>(k)].borrower == borrower) return net.redemption_value(k);
  return 0.0;
}

void fill_cpt(const FinancialNetwork& net, Rule rule, int firm, int copy, const ParentLayout& lay,
              BnNode& node) {
  const std::size_t c = lay.cross_value.size();
  const std::size_t s = lay.same_value.size();
  const std::size_t k = node.parents.size();
  const std::size_t rows = std::size_t{1} << k;
  node.cpt.assign(rows, 0.0);
  const bool strict = rule == Rule::Strict;

  auto bit = [&](std::size_t row, std::size_t slot) {
    return ((row >> (k - 1 - slot)) & 1U) != 0;
  };

  for (std::size_t row = 0; row < rows; ++row) {
    std::size_t slot = 0;
    // Repayment from cross-component parents: their final node reads 0
    // exactly when they pay (D = 0 or S = 1).
    double cross = 0.0;
    for (std::size_t a = 0; a < c; ++a, ++slot)
      if (!bit(row, slot)) cross += lay.cross_value[a];

    if (copy == 1) {
      double received = cross;
      // Round one: under the mild rule every same-component parent counts as
      // paying (D_{j,0} = 0); under the strict rule none does (S_{j,0} = 0).
      if (!strict)
        for (double v : lay.same_value) received += v;
      node.cpt[row] = default_phi_received(net, firm, received);
      continue;
    }

    const bool own_prev = bit(row, slot++);
    double recv_now = cross, recv_prev = cross;
    for (std::size_t a = 0; a < s; ++a, ++slot)
      if (!bit(row, slot)) recv_now += lay.same_value[a];
    if (copy == 2) {
      if (!strict)
        for (double v : lay.same_value) recv_prev += v;
    } else {
      for (std::size_t a = 0; a < s; ++a, ++slot)
        if (!bit(row, slot)) recv_prev += lay.same_value[a];
    }

    double p;
    if (!strict) {
      if (own_prev) {
        p = 1.0;
      } else {
        const double surv_prev = survival_phi_received(net, firm, recv_prev);
        const double surv_now = survival_phi_received(net, firm, recv_now);
        p = surv_prev > 0.0 ? 1.0 - surv_now / surv_prev : 1.0;
      }
    } else {
      if (!own_prev) {
        p = 0.0;
      } else {
        const double def_prev = default_phi_received(net, firm, recv_prev);
        const double def_now = default_phi_received(net, firm, recv_now);
        p = def_prev > 0.0 ? def_now / def_prev : 0.0;
      }
    }
    node.cpt[row] = clamp01(p);
  }
}

}  // namespace

DiscreteBayesNet build_bn(const FinancialNetwork& net, Rule rule) {
  DiscreteBayesNet bn;
  bn.rule_ = rule;
  bn.net_ = net;
  bn.graph_ = build_redemption_graph(net);
  bn.scc_ = scc_decompose(bn.graph_);
  if (rule == Rule::Dag && bn.scc_.max_size() > 1)
    throw std::invalid_argument("redemption graph has a directed cycle; use the mild or strict rule");
  bn.augmented_ = acyclic_augmentation(bn.graph_, bn.scc_);

  const int n = static_cast<int>(net.size());
  std::vector<ParentLayout> layouts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& lay = layouts[static_cast<std::size_t>(i)];
    for (int j : bn.graph_.parents(i)) {
      const double v = claim_from(net, i, j);
      if (bn.scc_.component_of[static_cast<std::size_t>(j)] == bn.scc_.component_of[static_cast<std::size_t>(i)])
        lay.same_value.push_back(v);
      else
        lay.cross_value.push_back(v);
    }
  }

  bn.nodes_.resize(static_cast<std::size_t>(bn.augmented_.num_vertices()));
  for (int v = 0; v < bn.augmented_.num_vertices(); ++v) {
    const auto cv = bn.augmented_.vertex(v);
    auto& node = bn.nodes_[static_cast<std::size_t>(v)];
    node.firm = cv.firm;
    node.copy = cv.copy;
    node.parents = bn.augmented_.canonical_parents(v);
    if (static_cast<int>(node.parents.size()) > kMaxParents)
      throw std::length_error("node " + bn.augmented_.label(v) + " has " +
                              std::to_string(node.parents.size()) + " parents (limit " +
                              std::to_string(kMaxParents) + ")");
    fill_cpt(net, rule, cv.firm, cv.copy, layouts[static_cast<std::size_t>(cv.firm)], node);
  }
  return bn;
}

ConfigProbability joint_config_prob(const FinancialNetwork& net, const RedemptionGraph& g,
                                    std::span<const std::uint8_t> survivors,
                                    std::optional<Rule> rule) {
  const int n = static_cast<int>(net.size());
  if (static_cast<int>(survivors.size()) != n)
    throw std::invalid_argument("survivor mask must have one entry per firm");
  double prob = 1.0;
  for (int i = 0; i < n; ++i) {
    double received = 0.0;
    for (int k : net.claims(i)) {
      const auto& loan = net.loans()[static_cast<std::size_t>(k)];
      if (survivors[static_cast<std::size_t>(loan.borrower)]) received += net.redemption_value(k);
    }
    prob *= survivors[static_cast<std::size_t>(i)] ? survival_phi_received(net, i, received)
                                                   : default_phi_received(net, i, received);
  }
  const bool surv_ok = induced_acyclic(g, survivors, true);
  const bool def_ok = induced_acyclic(g, survivors, false);
  bool exact;
  if (rule == Rule::Mild)
    exact = def_ok;
  else if (rule == Rule::Strict)
    exact = surv_ok;
  else
    exact = surv_ok && def_ok;
  return {prob, exact};
}

}  // namespace contagion
