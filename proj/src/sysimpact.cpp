#include "contagion/sysimpact.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace contagion {

namespace {

void check_sets(const DiscreteBayesNet& bn, const std::vector<int>& sources,
                const std::vector<int>& targets) {
  if (sources.empty() || targets.empty()) throw std::invalid_argument("source and target sets must be non-empty");
  if (static_cast<int>(targets.size()) > kMaxImpactTargets)
    throw std::invalid_argument("at most " + std::to_string(kMaxImpactTargets) + " target firms");
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(bn.num_firms()), 0);
  for (const auto* set : {&sources, &targets})
    for (int f : *set) {
      if (f < 0 || f >= bn.num_firms())
        throw std::invalid_argument("firm " + std::to_string(f + 1) + " is out of range");
      if (seen[static_cast<std::size_t>(f)])
        throw std::invalid_argument("source and target sets must be disjoint and duplicate-free");
      seen[static_cast<std::size_t>(f)] = 1;
    }
}

Assignment all_defaulted(const std::vector<int>& firms) {
  Assignment a;
  for (int f : firms) a.emplace_back(f, 1);
  return a;
}

ImpactReport make_report(const DiscreteBayesNet& bn, const std::vector<int>& sources,
                         const std::vector<int>& targets, const std::vector<double>& conditional,
                         const std::vector<double>& unconditional) {
  ImpactReport r;
  r.sources = sources;
  r.targets = targets;
  r.rule = bn.rule();
  r.asi = total_variation(conditional, unconditional);
  std::size_t best = 0;
  r.rsi = max_log_ratio(conditional, unconditional, &best);
  const std::size_t k = targets.size();
  for (std::size_t a = 0; a < k; ++a) r.argmax.push_back(static_cast<std::uint8_t>((best >> (k - 1 - a)) & 1U));
  return r;
}

}  // namespace

double total_variation(const std::vector<double>& conditional, const std::vector<double>& unconditional) {
  if (conditional.size() != unconditional.size()) throw std::invalid_argument("laws differ in size");
  double s = 0.0;
  for (std::size_t e = 0; e < conditional.size(); ++e) s += std::abs(conditional[e] - unconditional[e]);
  return 0.5 * s;
}

double max_log_ratio(const std::vector<double>& conditional, const std::vector<double>& unconditional,
                     std::size_t* argmax) {
  if (conditional.size() != unconditional.size()) throw std::invalid_argument("laws differ in size");
  double best = -std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t e = 0; e < conditional.size(); ++e) {
    const double c = conditional[e], u = unconditional[e];
    double value;
    if (u == 0.0)
      value = c == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    else if (c == 0.0)
      value = -std::numeric_limits<double>::infinity();
    else
      value = std::log2(c / u);
    if (value > best) {
      best = value;
      at = e;
    }
  }
  if (argmax) *argmax = at;
  return best;
}

ImpactReport impact(const DiscreteBayesNet& bn, const std::vector<int>& sources,
                    const std::vector<int>& targets) {
  check_sets(bn, sources, targets);
  const auto unconditional = joint_law(bn, targets);
  const auto conditional = joint_law(bn, targets, all_defaulted(sources));
  return make_report(bn, sources, targets, conditional, unconditional);
}

double asi(const DiscreteBayesNet& bn, const std::vector<int>& sources, const std::vector<int>& targets) {
  return impact(bn, sources, targets).asi;
}

double rsi(const DiscreteBayesNet& bn, const std::vector<int>& sources, const std::vector<int>& targets) {
  return impact(bn, sources, targets).rsi;
}

std::vector<ImpactReport> impact_matrix(const DiscreteBayesNet& bn, const std::vector<int>& firms) {
  for (int f : firms)
    if (f < 0 || f >= bn.num_firms()) throw std::invalid_argument("firm out of range");
  std::vector<std::vector<double>> marginal;
  for (int f : firms) marginal.push_back(joint_law(bn, std::vector<int>{f}));

  std::vector<ImpactReport> out;
  for (std::size_t a = 0; a < firms.size(); ++a) {
    const Assignment given{{firms[a], 1}};
    for (std::size_t b = 0; b < firms.size(); ++b) {
      if (firms[b] == firms[a]) continue;
      const auto conditional = joint_law(bn, std::vector<int>{firms[b]}, given);
      out.push_back(make_report(bn, {firms[a]}, {firms[b]}, conditional, marginal[b]));
    }
  }
  return out;
}

}  // namespace contagion
