#include "contagion/cascade.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace contagion {

const char* to_string(Rule rule) {
  switch (rule) {
    case Rule::Mild: return "mild";
    case Rule::Strict: return "strict";
    case Rule::Dag: return "dag";
  }
  return "unknown";
}

Rule parse_rule(const std::string& text) {
  if (text == "mild") return Rule::Mild;
  if (text == "strict") return Rule::Strict;
  if (text == "dag") return Rule::Dag;
  throw std::invalid_argument("unknown default rule '" + text + "' (expected mild|strict|dag)");
}

double NormalStream::uniform() {
  // 53 random bits mapped to the midpoints of a 2^-53 grid: never 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

AssetScenario scenario_from_normals(const FinancialNetwork& net, std::vector<double> normals) {
  if (normals.size() != net.size()) throw std::invalid_argument("one normal draw per firm required");
  AssetScenario s;
  const double T = net.horizon();
  s.terminal_assets.resize(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& f = net.firm(static_cast<int>(i));
    s.terminal_assets[i] =
        f.operating_assets_0 * std::exp((f.drift - 0.5 * f.volatility * f.volatility) * T +
                                        f.volatility * std::sqrt(T) * normals[i]);
  }
  s.normal_draws = std::move(normals);
  return s;
}

AssetScenario scenario_from_assets(std::vector<double> terminal_assets) {
  AssetScenario s;
  s.terminal_assets = std::move(terminal_assets);
  return s;
}

ScenarioSampler::ScenarioSampler(const FinancialNetwork& net, std::uint64_t seed)
    : net_(&net), normals_(seed), seed_(seed) {
  const double T = net.horizon();
  for (const auto& f : net.firms()) {
    log_drift_.push_back(std::log(f.operating_assets_0) +
                         (f.drift - 0.5 * f.volatility * f.volatility) * T);
    log_scale_.push_back(f.volatility * std::sqrt(T));
  }
}

void ScenarioSampler::draw(AssetScenario& out) {
  const std::size_t n = net_->size();
  out.seed = seed_;
  out.normal_draws.resize(n);
  out.terminal_assets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = normals_.next();
    out.normal_draws[i] = z;
    out.terminal_assets[i] = std::exp(log_drift_[i] + log_scale_[i] * z);
  }
}

AssetScenario sample_assets(const FinancialNetwork& net, std::uint64_t seed) {
  ScenarioSampler sampler(net, seed);
  AssetScenario s;
  sampler.draw(s);
  return s;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Equity of i when borrowers with pays(j) == true redeem their loans.
template <class Pays>
double equity_with(const FinancialNetwork& net, std::span<const double> assets, int i, Pays pays) {
  double value = assets[static_cast<std::size_t>(i)];
  for (int k : net.claims(i)) {
    if (pays(net.loans()[static_cast<std::size_t>(k)].borrower)) value += net.redemption_value(k);
  }
  return value + net.cash_at_horizon(i) - net.total_obligations(i);
}

// Work-list rounds. For the mild rule state[j] == 1 marks a default, for
// the strict rule it marks a survivor. Firms flagged in round n only affect
// evaluations of round n + 1.
void resolve(const FinancialNetwork& net, std::span<const double> assets, bool mild,
             CascadeWorkspace& w, std::vector<std::optional<int>>* rounds) {
  const int n = static_cast<int>(net.size());
  w.state.assign(static_cast<std::size_t>(n), 0);
  w.frontier.clear();
  auto pays = [&](int j) {
    const bool flagged = w.state[static_cast<std::size_t>(j)] != 0;
    return mild ? !flagged : flagged;
  };
  auto flips = [&](double e) { return mild ? e < 0.0 : e >= 0.0; };

  for (int i = 0; i < n; ++i)
    if (flips(equity_with(net, assets, i, pays))) w.frontier.push_back(i);

  int round = 1;
  auto& queued = w.queued;
  queued.assign(static_cast<std::size_t>(n), 0);
  while (!w.frontier.empty()) {
    for (int i : w.frontier) {
      w.state[static_cast<std::size_t>(i)] = 1;
      if (rounds) (*rounds)[static_cast<std::size_t>(i)] = round;
    }
    w.next.clear();
    for (int j : w.frontier) {
      for (int k : net.debts(j)) {
        const int creditor = net.loans()[static_cast<std::size_t>(k)].lender;
        const auto ci = static_cast<std::size_t>(creditor);
        if (w.state[ci] || queued[ci]) continue;
        if (flips(equity_with(net, assets, creditor, pays))) {
          queued[ci] = 1;
          w.next.push_back(creditor);
        }
      }
    }
    for (int i : w.next) queued[static_cast<std::size_t>(i)] = 0;
    std::swap(w.frontier, w.next);
    ++round;
  }
}

CascadeOutcome full_cascade(const FinancialNetwork& net, const AssetScenario& scenario, bool mild) {
  const std::size_t n = net.size();
  if (scenario.terminal_assets.size() != n) throw std::invalid_argument("scenario size mismatch");
  CascadeWorkspace w;
  CascadeOutcome out;
  out.rule = mild ? Rule::Mild : Rule::Strict;
  out.round.assign(n, std::nullopt);
  resolve(net, scenario.terminal_assets, mild, w, &out.round);
  out.defaults.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.defaults[i] = mild ? w.state[i] : !w.state[i];
  const auto surv = out.survivors();
  out.equities.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.equities[i] = equity(net, scenario.terminal_assets, surv, static_cast<int>(i));
  return out;
}

}  // namespace

double equity(const FinancialNetwork& net, std::span<const double> terminal_assets,
              std::span<const std::uint8_t> survivors, int i) {
  return equity_with(net, terminal_assets, i,
                     [&](int j) { return survivors[static_cast<std::size_t>(j)] != 0; });
}

std::vector<std::uint8_t> CascadeOutcome::survivors() const {
  std::vector<std::uint8_t> s(defaults.size());
  for (std::size_t i = 0; i < defaults.size(); ++i) s[i] = defaults[i] ? 0 : 1;
  return s;
}

int CascadeOutcome::num_defaults() const {
  int c = 0;
  for (auto d : defaults) c += d ? 1 : 0;
  return c;
}

CascadeOutcome mild_cascade(const FinancialNetwork& net, const AssetScenario& scenario) {
  return full_cascade(net, scenario, true);
}

CascadeOutcome strict_cascade(const FinancialNetwork& net, const AssetScenario& scenario) {
  return full_cascade(net, scenario, false);
}

CascadeOutcome run_cascade(const FinancialNetwork& net, const AssetScenario& scenario, Rule rule) {
  if (rule == Rule::Strict) return strict_cascade(net, scenario);
  auto out = mild_cascade(net, scenario);
  out.rule = rule;
  return out;
}

bool check_consistent(const FinancialNetwork& net, const AssetScenario& scenario,
                      std::span<const std::uint8_t> defaults) {
  const std::size_t n = net.size();
  if (defaults.size() != n || scenario.terminal_assets.size() != n) return false;
  std::vector<std::uint8_t> surv(n);
  for (std::size_t i = 0; i < n; ++i) surv[i] = defaults[i] ? 0 : 1;
  for (std::size_t i = 0; i < n; ++i) {
    const bool negative = equity(net, scenario.terminal_assets, surv, static_cast<int>(i)) < 0.0;
    if (negative != (defaults[i] != 0)) return false;
  }
  return true;
}

void cascade_defaults(const FinancialNetwork& net, std::span<const double> terminal_assets,
                      Rule rule, CascadeWorkspace& work, std::vector<std::uint8_t>& defaults) {
  const bool mild = rule != Rule::Strict;
  resolve(net, terminal_assets, mild, work, nullptr);
  defaults.resize(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) defaults[i] = mild ? work.state[i] : !work.state[i];
}

}  // namespace contagion
