#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "contagion/cli.hpp"
#include "contagion/dsep.hpp"
#include "contagion/sysimpact.hpp"
#include "support/fixtures.hpp"

using namespace contagion;

namespace {

const DiscreteBayesNet& study() {
  static const auto bn = build_mild_bn(generate_core_periphery(5, 19));
  return bn;
}

std::vector<int> pick(std::mt19937_64& rng, std::vector<int>& pool, std::size_t k) {
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<int> out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

// Largest |P[A | D_I = 1] - P[A]| over all events A of the target configurations.
double asi_over_events(const std::vector<double>& cond, const std::vector<double>& uncond) {
  double best = 0.0;
  const std::size_t m = cond.size();
  for (std::uint64_t event = 0; event < (std::uint64_t{1} << m); ++event) {
    double diff = 0.0;
    for (std::size_t e = 0; e < m; ++e)
      if ((event >> e) & 1U) diff += cond[e] - uncond[e];
    best = std::max(best, std::abs(diff));
  }
  return best;
}

}  // namespace

TEST_CASE("core-periphery impact table") {
  const auto r = study_roles();
  struct Row {
    int from, to;
    double asi, rsi;
  };
  const Row rows[] = {
      {r.core, r.other_core, 0.3607, 7.97},       {r.core, r.periphery, 0.7655, 9.42},
      {r.core, r.other_periphery, 0.2765, 7.96},  {r.periphery, r.core, 0.9865, 9.42},
      {r.periphery, r.other_core, 0.3563, 7.96},  {r.periphery, r.other_periphery, 0.2732, 7.94},
      {r.periphery, r.sibling_periphery, 0.7563, 9.40},
  };
  for (const auto& row : rows) {
    const auto rep = impact(study(), {row.from}, {row.to});
    CHECK_MESSAGE(std::abs(rep.asi - row.asi) < 5e-4, row.from << "->" << row.to << " asi " << rep.asi);
    CHECK_MESSAGE(std::abs(rep.rsi - row.rsi) < 0.05, row.from << "->" << row.to << " rsi " << rep.rsi);
    CHECK(rep.argmax == std::vector<std::uint8_t>{1});
    CHECK(rep.asi == asi(study(), {row.from}, {row.to}));
    CHECK(rep.rsi == rsi(study(), {row.from}, {row.to}));
  }
}

TEST_CASE("distance conventions") {
  CHECK(total_variation({0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK(total_variation({1.0, 0.0}, {0.0, 1.0}) == 1.0);
  std::size_t arg = 99;
  CHECK(max_log_ratio({0.5, 0.5}, {0.5, 0.5}, &arg) == 0.0);
  CHECK(arg == 0);
  // 0/0 counts as ratio one; a possible event of unconditional mass 0 gives +inf.
  CHECK(max_log_ratio({0.0, 1.0}, {0.0, 1.0}) == 0.0);
  CHECK(max_log_ratio({0.5, 0.5}, {1.0, 0.0}, &arg) == std::numeric_limits<double>::infinity());
  CHECK(arg == 1);
  CHECK(max_log_ratio({0.25, 0.75}, {0.5, 0.5}, &arg) == doctest::Approx(std::log2(1.5)));
  CHECK(arg == 1);
}

TEST_CASE("isolated firms have no impact on each other") {
  const FinancialNetwork net({fixtures::firm(10, 0.3, 0, 9), fixtures::firm(10, 0.3, 0, 9.5)}, {}, 0, 0, 1);
  for (Rule rule : {Rule::Mild, Rule::Strict}) {
    const auto rep = impact(build_bn(net, rule), {0}, {1});
    CHECK(std::abs(rep.asi) < 1e-15);
    CHECK(std::abs(rep.rsi) < 1e-12);
  }
}

TEST_CASE("invalid source and target sets") {
  const auto bn = build_mild_bn(fixtures::mutual_debt_pair());
  CHECK_THROWS_AS(impact(bn, {0}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(impact(bn, {}, {1}), std::invalid_argument);
  std::vector<int> many(21);
  for (int k = 0; k < 21; ++k) many[static_cast<std::size_t>(k)] = k + 1;
  CHECK_THROWS_AS(impact(build_mild_bn(generate_core_periphery(1, 22)), {0}, many), std::invalid_argument);

  const FinancialNetwork safe({fixtures::firm(10, 0.3, 0, 9), fixtures::firm(1, 0.2, 0, 1, 5)}, {}, 0, 0, 1);
  CHECK_THROWS_AS(impact(build_mild_bn(safe), {1}, {0}), ZeroProbabilityEvidence);
}

TEST_CASE("impact grows with the target set") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 3);
    const auto net = fixtures::random_network(rng, n, 0.35, trial % 2 == 0);
    const auto bn = build_mild_bn(net);
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    const auto sources = pick(rng, pool, 1);
    const auto targets = pick(rng, pool, 2 + rng() % 3);
    const auto full = impact(bn, sources, targets);
    for (std::uint32_t mask = 1; mask < (1U << targets.size()); ++mask) {
      std::vector<int> sub;
      for (std::size_t k = 0; k < targets.size(); ++k)
        if ((mask >> k) & 1U) sub.push_back(targets[k]);
      const auto part = impact(bn, sources, sub);
      CHECK(part.asi <= full.asi + 1e-12);
      CHECK(part.rsi <= full.rsi + 1e-9);
    }
  }
}

TEST_CASE("ASI as a largest event difference equals total variation") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 2);
    const auto net = fixtures::random_network(rng, n, 0.4, trial % 2 == 0);
    const auto bn = build_bn(net, trial % 3 == 0 ? Rule::Strict : Rule::Mild);
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    const auto sources = pick(rng, pool, 1 + rng() % 2);
    const auto targets = pick(rng, pool, 1 + rng() % 3);
    Assignment ev;
    for (int s : sources) ev.push_back({s, 1});
    const auto cond = joint_law(bn, targets, ev);
    const auto uncond = joint_law(bn, targets);
    CHECK(asi(bn, sources, targets) == doctest::Approx(asi_over_events(cond, uncond)).epsilon(1e-12));
  }
}

TEST_CASE("RSI needs no target subsets") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 3);
    const auto net = fixtures::random_network(rng, n, 0.4, trial % 2 == 1);
    const auto bn = build_mild_bn(net);
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    const auto sources = pick(rng, pool, 1);
    const auto targets = pick(rng, pool, 3);
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < 8; ++mask) {
      std::vector<int> sub;
      for (std::size_t k = 0; k < 3; ++k)
        if ((mask >> k) & 1U) sub.push_back(targets[k]);
      best = std::max(best, rsi(bn, sources, sub));
    }
    CHECK(rsi(bn, sources, targets) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("separated extra sources change nothing under the strict rule") {
  // 0 <-> 1 -> 2: given firm 1, firm 0 is separated from firm 2.
  const auto net = fixtures::network_from_edges(3, {{0, 1}, {1, 0}, {1, 2}});
  const auto bn = build_strict_bn(net);
  CHECK(d_separated(bn.redemption_graph().digraph(), {{0}, {2}, {1}}));
  CHECK(asi(bn, {0, 1}, {2}) == doctest::Approx(asi(bn, {1}, {2})).epsilon(1e-12));
  CHECK(rsi(bn, {0, 1}, {2}) == doctest::Approx(rsi(bn, {1}, {2})).epsilon(1e-12));

  std::mt19937_64 rng(54);
  int hits = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 3);
    const auto rnd = fixtures::random_network(rng, n, 0.35, false);
    const auto sbn = build_strict_bn(rnd);
    if (sbn.num_nodes() > 24) continue;
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    const auto i1 = pick(rng, pool, 1);
    const auto i2 = pick(rng, pool, 1);
    const auto j = pick(rng, pool, 1 + rng() % 2);
    if (!d_separated(sbn.redemption_graph().digraph(), {i2, j, i1})) continue;
    std::vector<int> both = i1;
    both.insert(both.end(), i2.begin(), i2.end());
    try {
      const auto a = impact(sbn, both, j);
      const auto b = impact(sbn, i1, j);
      CHECK(a.asi == doctest::Approx(b.asi).epsilon(1e-9));
      CHECK(a.rsi == doctest::Approx(b.rsi).epsilon(1e-9));
      ++hits;
    } catch (const ZeroProbabilityEvidence&) {
    }
  }
  CHECK(hits >= 20);
}

TEST_CASE("adding a source can lower the impact") {
  const auto net = fixtures::source_monotonicity_network();
  const auto bn = build_dag_bn(net);
  CHECK(std::abs(query_prob(bn, {{{3, 1}}, {{2, 1}}, Rule::Dag}) - 0.5) < 0.05);
  const auto single = impact(bn, {2}, {3});
  const auto pair = impact(bn, {1, 2}, {3});
  CHECK(pair.asi <= single.asi);
  CHECK(pair.rsi <= single.rsi);
  CHECK(pair.asi < single.asi - 0.05);
}

TEST_CASE("symmetric pair gives a symmetric matrix") {
  const auto bn = build_mild_bn(fixtures::network_from_edges(2, {{0, 1}, {1, 0}}));
  const auto m = impact_matrix(bn, {0, 1});
  REQUIRE(m.size() == 2);
  CHECK(m[0].sources == std::vector<int>{0});
  CHECK(m[0].targets == std::vector<int>{1});
  CHECK(m[0].asi == doctest::Approx(m[1].asi).epsilon(1e-14));
  CHECK(m[0].rsi == doctest::Approx(m[1].rsi).epsilon(1e-14));
  CHECK(m[0].asi > 0.0);
}

TEST_CASE("matrix entries equal individual reports") {
  const auto r = study_roles();
  const std::vector<int> firms = {r.core, r.other_core, r.periphery};
  const auto m = impact_matrix(study(), firms);
  REQUIRE(m.size() == 6);
  for (const auto& rep : m) {
    const auto one = impact(study(), rep.sources, rep.targets);
    CHECK(rep.asi == doctest::Approx(one.asi).epsilon(1e-12));
    CHECK(rep.rsi == doctest::Approx(one.rsi).epsilon(1e-12));
  }
}
