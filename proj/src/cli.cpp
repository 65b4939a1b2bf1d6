#include "contagion/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "contagion/augment.hpp"
#include "contagion/bayesnet.hpp"
#include "contagion/cascade.hpp"
#include "contagion/dsep.hpp"
#include "contagion/inference.hpp"
#include "contagion/io.hpp"
#include "contagion/sysimpact.hpp"

namespace contagion {

using nlohmann::json;

StudyRoles study_roles(int n_core, int n_periphery_per_core) {
  if (n_core < 2 || n_periphery_per_core < 2)
    throw std::invalid_argument("the study needs at least 2 core banks with 2 periphery creditors each");
  StudyRoles r;
  r.core = 0;
  r.other_core = 1;
  r.periphery = n_core;
  r.sibling_periphery = n_core + 1;
  r.other_periphery = n_core + n_periphery_per_core;
  return r;
}

namespace {

struct ValidationFailure : std::runtime_error {
  ValidationReport report;
  explicit ValidationFailure(ValidationReport r)
      : std::runtime_error("network failed validation"), report(std::move(r)) {}
};

struct Options {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string network;
  std::string rule = "mild";
  std::string out;
  std::string format = "json";
  std::string query;
  std::uint64_t samples = 0;
  std::uint64_t mc_samples = 0;
  std::string v1, v2, given, from, to, firms, subset;
  bool dot = false;
  int n_core = 5;
  int n_periphery = 19;
};

json violations_json(const ValidationReport& report) {
  json list = json::array();
  for (const auto& v : report.violations) {
    json item{{"kind", to_string(v.kind)}, {"message", v.message}};
    item["firm"] = v.firm >= 0 ? json(v.firm + 1) : json();
    item["other"] = v.other >= 0 ? json(v.other + 1) : json();
    list.push_back(std::move(item));
  }
  return list;
}

// Structural errors caught by the constructor count as validation failures.
FinancialNetwork parse_network(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return network_from_json(text);
  } catch (const FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    ValidationReport report;
    report.violations.push_back({Violation::Kind::InvalidStructure, -1, -1, e.what()});
    throw ValidationFailure(std::move(report));
  }
}

FinancialNetwork load_checked(const std::string& path) {
  FinancialNetwork net = parse_network(path);
  auto report = validate_network(net);
  if (!report.ok()) throw ValidationFailure(std::move(report));
  return net;
}

std::vector<int> parse_firm_list(const std::string& text, int num_firms, const char* what) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size())
      throw std::invalid_argument(std::string(what) + ": '" + item + "' is not a firm index");
    if (value < 1 || value > num_firms)
      throw std::invalid_argument(std::string(what) + ": firm " + item + " is out of range 1.." +
                                  std::to_string(num_firms));
    out.push_back(value - 1);
  }
  return out;
}

json one_based(const std::vector<int>& firms) {
  json a = json::array();
  for (int f : firms) a.push_back(f + 1);
  return a;
}

json extended(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

void emit(const Options& opt, std::ostream& out, const std::string& text) {
  if (opt.out.empty())
    out << text;
  else
    write_text_file(opt.out, text);
}

std::string graph_dot(const RedemptionGraph& g) {
  std::ostringstream os;
  os << "digraph redemption {\n";
  for (int v = 0; v < g.num_vertices(); ++v) os << "  \"" << v + 1 << "\";\n";
  for (const auto& [u, v] : g.digraph().edges()) os << "  \"" << u + 1 << "\" -> \"" << v + 1 << "\";\n";
  os << "}\n";
  return os.str();
}

int cmd_validate(const Options& opt, std::ostream& out) {
  const FinancialNetwork net = parse_network(opt.network);
  const auto report = validate_network(net);
  json doc{{"ok", report.ok()}, {"firms", net.size()}, {"loans", net.loans().size()},
           {"violations", violations_json(report)}};
  out << doc.dump(2) << "\n";
  return report.ok() ? kExitOk : kExitValidation;
}

int cmd_graph(const Options& opt, std::ostream& out) {
  const auto net = load_checked(opt.network);
  const auto g = build_redemption_graph(net);
  if (opt.format == "dot") {
    emit(opt, out, graph_dot(g));
    return kExitOk;
  }
  const auto scc = scc_decompose(g);
  json edges = json::array();
  for (const auto& [u, v] : g.digraph().edges()) edges.push_back({u + 1, v + 1});
  json comps = json::array();
  for (const auto& c : scc.components) comps.push_back(one_based(c));
  std::vector<int> sinks;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (g.children(v).empty()) sinks.push_back(v);
  json doc{{"vertices", g.num_vertices()}, {"edges", edges}, {"components", comps},
           {"is_dag", is_dag(g)}, {"sinks", one_based(sinks)}};
  emit(opt, out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_augment(const Options& opt, std::ostream& out) {
  const auto net = load_checked(opt.network);
  const auto g = build_redemption_graph(net);
  const auto aug = acyclic_augmentation(g, scc_decompose(g));
  if (opt.dot || opt.format == "dot") {
    emit(opt, out, to_dot(aug));
    return kExitOk;
  }
  static const char* family_names[] = {"cross_component", "own_chain", "same_offset_one", "same_offset_two"};
  json vertices = json::array();
  for (int v = 0; v < aug.num_vertices(); ++v) vertices.push_back(aug.label(v));
  json edges = json::array();
  for (const auto& [u, v] : aug.digraph().edges())
    edges.push_back({aug.label(u), aug.label(v), family_names[static_cast<int>(aug.family(u, v))]});
  json order = json::array();
  for (int v : aug.topological_order()) order.push_back(aug.label(v));
  json doc{{"vertices", vertices}, {"edges", edges}, {"topological_order", order},
           {"is_dag", verify_dag(aug).is_dag}};
  emit(opt, out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const auto net = load_checked(opt.network);
  const Rule rule = parse_rule(opt.rule);
  const std::uint64_t samples = opt.samples ? opt.samples : 1;
  std::ostringstream os;
  os << "seed,i,X_i(T),D_i,round\n";
  for (std::uint64_t s = 0; s < samples; ++s) {
    const std::uint64_t scenario_seed = mix_seed(opt.seed, s);
    const auto scenario = sample_assets(net, scenario_seed);
    const auto outcome = run_cascade(net, scenario, rule);
    for (std::size_t i = 0; i < net.size(); ++i) {
      os << scenario_seed << ',' << i + 1 << ',' << format_double(scenario.terminal_assets[i]) << ','
         << int{outcome.defaults[i]} << ',';
      if (outcome.round[i]) os << *outcome.round[i];
      os << '\n';
    }
  }
  emit(opt, out, os.str());
  return kExitOk;
}

int cmd_export_bn(const Options& opt, std::ostream& out) {
  const auto net = load_checked(opt.network);
  emit(opt, out, bn_to_json(build_bn(net, parse_rule(opt.rule))));
  return kExitOk;
}

int cmd_infer(const Options& opt, std::ostream& out) {
  const auto net = load_checked(opt.network);
  const Query q = query_from_json(opt.query, parse_rule(opt.rule));
  json doc;
  if (opt.mc_samples > 0) {
    const auto est = mc_estimate(net, q, opt.mc_samples, opt.seed, opt.threads);
    doc = {{"probability", est.probability}, {"method", "monte-carlo"}, {"stderr", est.standard_error},
           {"accepted", est.accepted}, {"samples", est.samples}};
  } else {
    const auto bn = build_bn(net, q.rule);
    doc = {{"probability", query_prob(bn, q)}, {"method", "exact"}};
  }
  doc["rule"] = to_string(q.rule);
  emit(opt, out, doc.dump() + "\n");
  return kExitOk;
}

MonteCarloOptions fallback_options(const Options& opt) {
  MonteCarloOptions mc;
  if (opt.samples) mc.samples = opt.samples;
  mc.seed = opt.seed;
  mc.threads = opt.threads;
  return mc;
}

int cmd_count_dist(const Options& opt, std::ostream& out) {
  const auto net = load_checked(opt.network);
  const auto bn = build_bn(net, parse_rule(opt.rule));
  const auto dist = opt.subset.empty()
                        ? count_distribution(bn, fallback_options(opt))
                        : core_count_distribution(bn, parse_firm_list(opt.subset, bn.num_firms(), "--subset"),
                                                  fallback_options(opt));
  std::ostringstream os;
  write_count_csv(os, dist);
  emit(opt, out, os.str());
  return kExitOk;
}

std::string labels(const AugmentedGraph& aug, const std::vector<int>& ids) {
  std::string s = "{";
  for (std::size_t k = 0; k < ids.size(); ++k) s += (k ? ", " : "") + aug.label(ids[k]);
  return s + "}";
}

int cmd_dsep(const Options& opt, std::ostream& out) {
  const auto net = load_checked(opt.network);
  const int n = static_cast<int>(net.size());
  const auto v1 = parse_firm_list(opt.v1, n, "--v1");
  const auto v2 = parse_firm_list(opt.v2, n, "--v2");
  const auto v0 = parse_firm_list(opt.given, n, "--given");
  const auto g = build_redemption_graph(net);
  const auto aug = acyclic_augmentation(g, scc_decompose(g));
  const auto verdict = firm_independence(g, aug, v1, v2, v0);
  json doc{{"v1", one_based(v1)},
           {"v2", one_based(v2)},
           {"given", one_based(v0)},
           {"separated_in_graph", verdict.separated_in_graph},
           {"independent", verdict.independent},
           {"separated_given_all_copies", verdict.separated_given_all_copies}};
  if (verdict.independent) {
    const auto& q = verdict.augmented_query;
    doc["statement"] = labels(aug, q.v1) + " and " + labels(aug, q.v2) + " are d-separated given " +
                       labels(aug, q.v0) + " in the acyclic augmentation";
  }
  emit(opt, out, doc.dump(2) + "\n");
  return kExitOk;
}

json report_json(const ImpactReport& r) {
  json argmax = json::object();
  for (std::size_t k = 0; k < r.targets.size(); ++k)
    argmax[std::to_string(r.targets[k] + 1)] = int{r.argmax[k]};
  return {{"from", one_based(r.sources)}, {"to", one_based(r.targets)}, {"rule", to_string(r.rule)},
          {"asi", r.asi}, {"rsi", extended(r.rsi)}, {"argmax", argmax}};
}

int cmd_impact(const Options& opt, std::ostream& out) {
  const auto net = load_checked(opt.network);
  const int n = static_cast<int>(net.size());
  const auto bn = build_bn(net, parse_rule(opt.rule));
  const auto report = impact(bn, parse_firm_list(opt.from, n, "--from"), parse_firm_list(opt.to, n, "--to"));
  emit(opt, out, report_json(report).dump() + "\n");
  return kExitOk;
}

std::string impact_csv(const std::vector<ImpactReport>& reports) {
  std::ostringstream os;
  os << "from,to,asi,rsi\n";
  for (const auto& r : reports)
    os << r.sources[0] + 1 << ',' << r.targets[0] + 1 << ',' << format_double(r.asi) << ','
       << (std::isinf(r.rsi) ? std::string(r.rsi > 0 ? "inf" : "-inf") : format_double(r.rsi)) << '\n';
  return os.str();
}

int cmd_impact_matrix(const Options& opt, std::ostream& out) {
  const auto net = load_checked(opt.network);
  const auto bn = build_bn(net, parse_rule(opt.rule));
  std::vector<int> firms;
  if (opt.firms.empty())
    for (int i = 0; i < bn.num_firms(); ++i) firms.push_back(i);
  else
    firms = parse_firm_list(opt.firms, bn.num_firms(), "--firms");
  emit(opt, out, impact_csv(impact_matrix(bn, firms)));
  return kExitOk;
}

int cmd_study(const Options& opt, std::ostream& out) {
  const Rule rule = parse_rule(opt.rule);
  const auto roles = study_roles(opt.n_core, opt.n_periphery);
  const auto net = generate_core_periphery(opt.n_core, opt.n_periphery, {});
  const auto bn = build_bn(net, rule);
  const auto dist = count_distribution(bn, fallback_options(opt));
  std::ostringstream count_csv;
  write_count_csv(count_csv, dist);
  if (opt.out.empty()) {
    out << count_csv.str();
    return kExitOk;
  }

  const std::filesystem::path dir(opt.out);
  std::filesystem::create_directories(dir);
  const std::string tag = to_string(rule);
  save_network(net, dir / "network.json");
  write_text_file(dir / ("count_distribution_" + tag + ".csv"), count_csv.str());

  std::vector<int> cores;
  for (int c = 0; c < opt.n_core; ++c) cores.push_back(c);
  std::ostringstream core_csv;
  write_count_csv(core_csv, core_count_distribution(bn, cores, fallback_options(opt)));
  write_text_file(dir / ("core_count_distribution_" + tag + ".csv"), core_csv.str());

  struct Named {
    const char* name;
    int target;
    int given;
  };
  const Named queries[] = {
      {"P[D_C=1]", roles.core, -1},
      {"P[D_C'=1|D_C=1]", roles.other_core, roles.core},
      {"P[D_P=1|D_C=1]", roles.periphery, roles.core},
      {"P[D_P'=1|D_C=1]", roles.other_periphery, roles.core},
      {"P[D_C=1|D_P=1]", roles.core, roles.periphery},
      {"P[D_C'=1|D_P=1]", roles.other_core, roles.periphery},
      {"P[D_P'=1|D_P=1]", roles.other_periphery, roles.periphery},
      {"P[D_P''=1|D_P=1]", roles.sibling_periphery, roles.periphery},
  };
  std::ostringstream qcsv;
  qcsv << "query,probability\n";
  qcsv << "P[no default]," << format_double(dist.probability[0]) << '\n';
  for (const auto& nq : queries) {
    Query q;
    q.rule = rule;
    q.targets = {{nq.target, 1}};
    if (nq.given >= 0) q.evidence = {{nq.given, 1}};
    qcsv << nq.name << ',' << format_double(query_prob(bn, q)) << '\n';
  }
  write_text_file(dir / ("queries_" + tag + ".csv"), qcsv.str());

  const std::pair<const char*, const char*> pair_names[] = {{"C", "C'"}, {"C", "P"}, {"C", "P'"},
                                                            {"P", "C"},  {"P", "C'"}, {"P", "P'"},
                                                            {"P", "P''"}};
  auto role_of = [&](const std::string& name) {
    if (name == "C") return roles.core;
    if (name == "C'") return roles.other_core;
    if (name == "P") return roles.periphery;
    if (name == "P'") return roles.other_periphery;
    return roles.sibling_periphery;
  };
  std::ostringstream icsv;
  icsv << "source,target,from,to,asi,rsi\n";
  for (const auto& [a, b] : pair_names) {
    const auto r = impact(bn, {role_of(a)}, {role_of(b)});
    icsv << a << ',' << b << ',' << role_of(a) + 1 << ',' << role_of(b) + 1 << ',' << format_double(r.asi)
         << ',' << format_double(r.rsi) << '\n';
  }
  write_text_file(dir / ("impact_" + tag + ".csv"), icsv.str());
  out << "wrote " << (dir / ("count_distribution_" + tag + ".csv")).string() << ", "
      << (dir / ("core_count_distribution_" + tag + ".csv")).string() << ", "
      << (dir / ("queries_" + tag + ".csv")).string() << ", " << (dir / ("impact_" + tag + ".csv")).string()
      << "\n";
  return kExitOk;
}

void report_error(std::ostream& err, int code, const char* type, const std::string& message,
                  const json& extra = json()) {
  err << "contagion: error: " << message << "\n";
  json e{{"code", code}, {"type", type}, {"message", message}};
  if (!extra.is_null()) e["violations"] = extra;
  err << json{{"error", e}}.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Default contagion in interbank networks: cascades, Bayesian-network inference, "
               "d-separation and systemic impact."};
  app.name("contagion");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", opt.seed, "Seed for every stochastic path")->capture_default_str();
  app.add_option("--threads", opt.threads,
                 "Monte-Carlo worker threads (default: $CONTAGION_THREADS or all cores)");

  auto network_arg = [&](CLI::App* sub) {
    sub->add_option("network", opt.network, "Network JSON file")->required();
  };
  auto rule_opt = [&](CLI::App* sub) {
    sub->add_option("--rule", opt.rule, "Default rule: mild, strict or dag")
        ->check(CLI::IsMember({"mild", "strict", "dag"}))
        ->capture_default_str();
  };
  auto out_opt = [&](CLI::App* sub, const char* what) { sub->add_option("-o,--out", opt.out, what); };

  auto* validate = app.add_subcommand("validate", "Check model restrictions; exit 1 on violations");
  network_arg(validate);

  auto* graph = app.add_subcommand("graph", "Redemption graph, components and sinks");
  network_arg(graph);
  graph->add_option("--format", opt.format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  out_opt(graph, "Output file (default stdout)");

  auto* augment = app.add_subcommand("augment", "Acyclic augmentation with vertices labelled i.n");
  network_arg(augment);
  augment->add_flag("--dot", opt.dot, "Emit Graphviz DOT");
  augment->add_option("--format", opt.format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  out_opt(augment, "Output file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Sample scenarios and run the default cascade");
  network_arg(simulate);
  rule_opt(simulate);
  simulate->add_option("-n,--samples", opt.samples, "Number of scenarios (default 1)");
  out_opt(simulate, "CSV output file (default stdout)");

  auto* export_bn = app.add_subcommand("export-bn", "Compiled Bayesian network as JSON");
  network_arg(export_bn);
  rule_opt(export_bn);
  out_opt(export_bn, "Output file (default stdout)");

  auto* infer = app.add_subcommand("infer", "Exact (or Monte-Carlo) probability query");
  network_arg(infer);
  rule_opt(infer);
  infer->add_option("-q,--query", opt.query, R"(Query JSON, e.g. {"targets":{"2":1},"evidence":{"1":1}})")
      ->required();
  infer->add_option("--mc", opt.mc_samples, "Estimate by Monte Carlo with this many scenarios");
  out_opt(infer, "Output file (default stdout)");

  auto* count = app.add_subcommand("count-dist", "Distribution of the number of defaults");
  network_arg(count);
  rule_opt(count);
  count->add_option("--subset", opt.subset, "Only count these firms, e.g. 1,2,3");
  count->add_option("-n,--samples", opt.samples, "Monte-Carlo samples if exact evaluation is infeasible");
  out_opt(count, "CSV output file (default stdout)");

  auto* dsep = app.add_subcommand("dsep", "Certified conditional independence of default indicators");
  network_arg(dsep);
  dsep->add_option("--v1", opt.v1, "First firm set, e.g. 1,2")->required();
  dsep->add_option("--v2", opt.v2, "Second firm set")->required();
  dsep->add_option("--given", opt.given, "Observed firms");
  out_opt(dsep, "Output file (default stdout)");

  auto* imp = app.add_subcommand("impact", "Absolute and relative systemic impact");
  network_arg(imp);
  rule_opt(imp);
  imp->add_option("--from", opt.from, "Source firms (joint default)")->required();
  imp->add_option("--to", opt.to, "Target firms")->required();
  out_opt(imp, "Output file (default stdout)");

  auto* matrix = app.add_subcommand("impact-matrix", "Pairwise ASI/RSI between single firms");
  network_arg(matrix);
  rule_opt(matrix);
  matrix->add_option("--firms", opt.firms, "Firms to include (default all)");
  out_opt(matrix, "CSV output file (default stdout)");

  auto* study = app.add_subcommand("paper-study", "Core-periphery case study (5 core, 95 periphery banks)");
  study->alias("study");
  rule_opt(study);
  study->add_option("--n-core", opt.n_core, "Core banks")->capture_default_str();
  study->add_option("--n-periphery", opt.n_periphery, "Periphery creditors per core bank")->capture_default_str();
  study->add_option("--out-dir,-o", opt.out, "Write network and CSV tables here; default prints counts");
  study->add_option("-n,--samples", opt.samples, "Monte-Carlo samples if exact evaluation is infeasible");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, kExitIo, "usage", e.what());
    return kExitIo;
  }

  try {
    if (*validate) return cmd_validate(opt, out);
    if (*graph) return cmd_graph(opt, out);
    if (*augment) return cmd_augment(opt, out);
    if (*simulate) return cmd_simulate(opt, out);
    if (*export_bn) return cmd_export_bn(opt, out);
    if (*infer) return cmd_infer(opt, out);
    if (*count) return cmd_count_dist(opt, out);
    if (*dsep) return cmd_dsep(opt, out);
    if (*imp) return cmd_impact(opt, out);
    if (*matrix) return cmd_impact_matrix(opt, out);
    if (*study) return cmd_study(opt, out);
  } catch (const ValidationFailure& e) {
    std::string msg = e.what();
    if (!e.report.violations.empty()) msg += ": " + e.report.violations.front().message;
    report_error(err, kExitValidation, "validation", msg, violations_json(e.report));
    return kExitValidation;
  } catch (const FormatError& e) {
    report_error(err, kExitIo, "format", e.what());
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    report_error(err, kExitIo, "io", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    report_error(err, kExitIo, "io", e.what());
    return kExitIo;
  } catch (const ZeroProbabilityEvidence& e) {
    report_error(err, kExitQuery, "zero_probability_evidence", e.what());
    return kExitQuery;
  } catch (const NumericalUnderflow& e) {
    report_error(err, kExitQuery, "numerical_underflow", e.what());
    return kExitQuery;
  } catch (const NoAcceptedSamples& e) {
    report_error(err, kExitQuery, "no_accepted_samples", e.what());
    return kExitQuery;
  } catch (const std::exception& e) {
    report_error(err, kExitQuery, "query", e.what());
    return kExitQuery;
  }
  return kExitOk;
}

}  // namespace contagion
