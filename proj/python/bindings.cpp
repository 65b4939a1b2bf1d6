// Python bindings for the contagion library.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "contagion/bayesnet.hpp"
#include "contagion/cascade.hpp"
#include "contagion/dsep.hpp"
#include "contagion/inference.hpp"
#include "contagion/io.hpp"
#include "contagion/network.hpp"
#include "contagion/sysimpact.hpp"

namespace py = pybind11;
using namespace contagion;

namespace {

// Python callers use {firm: value} dicts with 0-based firm indices.
Assignment to_assignment(const std::map<int, int>& values) {
  Assignment a;
  for (const auto& [firm, value] : values) a.emplace_back(firm, static_cast<std::uint8_t>(value != 0));
  return a;
}

Query make_query(const std::map<int, int>& targets, const std::map<int, int>& evidence, Rule rule) {
  return Query{to_assignment(targets), to_assignment(evidence), rule};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Default contagion in interbank networks (0-based firm indices)";

  py::register_exception<ZeroProbabilityEvidence>(m, "ZeroProbabilityEvidence", PyExc_ValueError);
  py::register_exception<NoAcceptedSamples>(m, "NoAcceptedSamples", PyExc_RuntimeError);

  py::enum_<Rule>(m, "Rule")
      .value("MILD", Rule::Mild)
      .value("STRICT", Rule::Strict)
      .value("DAG", Rule::Dag);

  py::class_<FirmParams>(m, "FirmParams")
      .def(py::init<>())
      .def(py::init([](double x0, double sigma, double mu, double f, double k0) {
             FirmParams p;
             p.operating_assets_0 = x0;
             p.volatility = sigma;
             p.drift = mu;
             p.external_liability = f;
             p.cash_0 = k0;
             return p;
           }),
           py::arg("x0"), py::arg("sigma"), py::arg("mu") = 0.0, py::arg("f") = 0.0, py::arg("k0") = 0.0)
      .def_readwrite("x0", &FirmParams::operating_assets_0)
      .def_readwrite("sigma", &FirmParams::volatility)
      .def_readwrite("mu", &FirmParams::drift)
      .def_readwrite("f", &FirmParams::external_liability)
      .def_readwrite("k0", &FirmParams::cash_0);

  py::class_<Loan>(m, "Loan")
      .def(py::init([](int lender, int borrower, double amount, double rate) {
             return Loan{lender, borrower, amount, rate};
           }),
           py::arg("lender"), py::arg("borrower"), py::arg("amount"), py::arg("rate") = 0.0)
      .def_readonly("lender", &Loan::lender)
      .def_readonly("borrower", &Loan::borrower)
      .def_readonly("amount", &Loan::amount)
      .def_readonly("rate", &Loan::rate);

  py::class_<FinancialNetwork>(m, "FinancialNetwork")
      .def(py::init<std::vector<FirmParams>, std::vector<Loan>, double, double, double>(), py::arg("firms"),
           py::arg("loans"), py::arg("r0") = 0.0, py::arg("r0_ext") = 0.0, py::arg("horizon") = 1.0)
      .def("__len__", &FinancialNetwork::size)
      .def_property_readonly("firms", &FinancialNetwork::firms)
      .def_property_readonly("loans", &FinancialNetwork::loans)
      .def_property_readonly("horizon", &FinancialNetwork::horizon)
      .def("liability", &FinancialNetwork::liability, py::arg("lender"), py::arg("borrower"))
      .def("to_json", [](const FinancialNetwork& n) { return network_to_json(n); })
      .def_static("from_json", &network_from_json, py::arg("text"));

  m.def("generate_core_periphery", [](int n_core, int n_periphery) {
    return generate_core_periphery(n_core, n_periphery, {});
  }, py::arg("n_core") = 5, py::arg("n_periphery_per_core") = 19,
        "Complete core with disjoint periphery creditors, default study parameters");

  m.def("validate", [](const FinancialNetwork& net) {
    std::vector<std::string> messages;
    for (const auto& v : validate_network(net).violations) messages.push_back(v.message);
    return messages;
  }, py::arg("network"), "Violated model restrictions as messages; empty when valid");

  m.def("cascade", [](const FinancialNetwork& net, std::vector<double> terminal_assets, Rule rule) {
    return run_cascade(net, scenario_from_assets(std::move(terminal_assets)), rule).defaults;
  }, py::arg("network"), py::arg("terminal_assets"), py::arg("rule") = Rule::Mild,
        "Default indicators for prescribed terminal operating assets");

  py::class_<DiscreteBayesNet>(m, "BayesNet")
      .def(py::init(&build_bn), py::arg("network"), py::arg("rule") = Rule::Mild)
      .def_property_readonly("num_nodes", &DiscreteBayesNet::num_nodes)
      .def_property_readonly("num_firms", &DiscreteBayesNet::num_firms)
      .def_property_readonly("rule", &DiscreteBayesNet::rule)
      .def("to_json", [](const DiscreteBayesNet& bn) { return bn_to_json(bn); });

  m.def("default_phi", [](const FinancialNetwork& net, int firm, std::vector<int> paying) {
    return default_phi(net, firm, paying);
  }, py::arg("network"), py::arg("firm"), py::arg("paying") = std::vector<int>{});

  m.def("query_prob", [](const DiscreteBayesNet& bn, const std::map<int, int>& targets,
                         const std::map<int, int>& evidence) {
    return query_prob(bn, make_query(targets, evidence, bn.rule()));
  }, py::arg("bn"), py::arg("targets"), py::arg("evidence") = std::map<int, int>{},
        "P[targets | evidence] by variable elimination");

  m.def("count_distribution", [](const DiscreteBayesNet& bn) {
    return count_distribution(bn).probability;
  }, py::arg("bn"));

  m.def("core_count_distribution", [](const DiscreteBayesNet& bn, std::vector<int> subset) {
    return core_count_distribution(bn, subset).probability;
  }, py::arg("bn"), py::arg("subset"));

  m.def("mc_estimate", [](const FinancialNetwork& net, const std::map<int, int>& targets,
                          const std::map<int, int>& evidence, Rule rule, std::uint64_t samples,
                          std::uint64_t seed, int threads) {
    MonteCarloEstimate e;
    {
      py::gil_scoped_release release;
      e = mc_estimate(net, make_query(targets, evidence, rule), samples, seed, threads);
    }
    return py::make_tuple(e.probability, e.standard_error);
  }, py::arg("network"), py::arg("targets"), py::arg("evidence") = std::map<int, int>{},
        py::arg("rule") = Rule::Mild, py::arg("samples") = 100000, py::arg("seed") = 0, py::arg("threads") = 0,
        "(probability, standard error) from simulated cascades");

  m.def("d_separated", [](int n, std::vector<std::pair<int, int>> edges, std::vector<int> v1,
                          std::vector<int> v2, std::vector<int> v0) {
    return d_separated(Digraph(n, edges), {std::move(v1), std::move(v2), std::move(v0)});
  }, py::arg("num_vertices"), py::arg("edges"), py::arg("v1"), py::arg("v2"), py::arg("given") = std::vector<int>{});

  m.def("impact", [](const DiscreteBayesNet& bn, std::vector<int> sources, std::vector<int> targets) {
    const auto r = impact(bn, sources, targets);
    py::dict d;
    d["asi"] = r.asi;
    d["rsi"] = r.rsi;
    d["argmax"] = r.argmax;
    return d;
  }, py::arg("bn"), py::arg("sources"), py::arg("targets"), "ASI, RSI and the RSI-maximising configuration");
}
