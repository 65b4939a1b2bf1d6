#include "contagion/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace contagion {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

double number_or(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw FormatError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

double required_number(const json& obj, const char* key) {
  if (!obj.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return number_or(obj, key, 0.0);
}

int firm_index(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer())
    throw FormatError(std::string("loan field '") + key + "' must be an integer firm index");
  return it->get<int>();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

int parse_firm_key(const std::string& key) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || value < 1) throw std::invalid_argument("firm key '" + key + "' is not a positive integer");
  return value - 1;
}

Assignment parse_assignment(const json& obj, const char* what) {
  Assignment out;
  if (obj.is_null()) return out;
  if (!obj.is_object()) throw std::invalid_argument(std::string(what) + " must be an object of firm: 0|1");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const json& v = it.value();
    int value;
    if (v.is_boolean())
      value = v.get<bool>() ? 1 : 0;
    else if (v.is_number_integer())
      value = v.get<int>();
    else
      throw std::invalid_argument(std::string(what) + " values must be 0 or 1");
    if (value != 0 && value != 1) throw std::invalid_argument(std::string(what) + " values must be 0 or 1");
    out.emplace_back(parse_firm_key(it.key()), static_cast<std::uint8_t>(value));
  }
  return out;
}

}  // namespace

FinancialNetwork network_from_json(const std::string& text) {
  const json doc = parse(text);
  if (!doc.is_object()) throw FormatError("network file must hold a JSON object");
  if (!doc.contains("firms") || !doc["firms"].is_array()) throw FormatError("missing array 'firms'");

  std::vector<FirmParams> firms;
  for (const auto& f : doc["firms"]) {
    if (!f.is_object()) throw FormatError("each firm must be an object");
    FirmParams p;
    p.operating_assets_0 = required_number(f, "x0");
    p.volatility = required_number(f, "sigma");
    p.drift = number_or(f, "mu", 0.0);
    p.external_liability = number_or(f, "f", 0.0);
    p.cash_0 = number_or(f, "k0", 0.0);
    firms.push_back(p);
  }

  std::vector<Loan> loans;
  if (doc.contains("loans")) {
    if (!doc["loans"].is_array()) throw FormatError("'loans' must be an array");
    for (const auto& l : doc["loans"]) {
      if (!l.is_object()) throw FormatError("each loan must be an object");
      loans.push_back({firm_index(l, "lender"), firm_index(l, "borrower"), required_number(l, "amount"),
                       number_or(l, "rate", 0.0)});
    }
  }
  return FinancialNetwork(std::move(firms), std::move(loans), number_or(doc, "r0", 0.0),
                          number_or(doc, "r0_ext", 0.0), number_or(doc, "horizon", 1.0));
}

std::string network_to_json(const FinancialNetwork& net) {
  std::ostringstream os;
  os << "{\n  \"firms\": [";
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& f = net.firm(static_cast<int>(i));
    os << (i ? ",\n" : "\n") << "    {\"f\": " << format_double(f.external_liability)
       << ", \"k0\": " << format_double(f.cash_0) << ", \"mu\": " << format_double(f.drift)
       << ", \"sigma\": " << format_double(f.volatility)
       << ", \"x0\": " << format_double(f.operating_assets_0) << "}";
  }
  os << (net.size() ? "\n  ]" : "]") << ",\n  \"horizon\": " << format_double(net.horizon())
     << ",\n  \"loans\": [";
  const auto& loans = net.loans();
  for (std::size_t k = 0; k < loans.size(); ++k) {
    const auto& l = loans[k];
    os << (k ? ",\n" : "\n") << "    {\"amount\": " << format_double(l.amount)
       << ", \"borrower\": " << l.borrower << ", \"lender\": " << l.lender
       << ", \"rate\": " << format_double(l.rate) << "}";
  }
  os << (loans.empty() ? "]" : "\n  ]") << ",\n  \"r0\": " << format_double(net.riskless_rate())
     << ",\n  \"r0_ext\": " << format_double(net.external_rate()) << "\n}\n";
  return os.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::ios_base::failure("write to '" + path.string() + "' failed");
}

FinancialNetwork load_network(const std::filesystem::path& path) {
  return network_from_json(read_text_file(path));
}

void save_network(const FinancialNetwork& net, const std::filesystem::path& path) {
  write_text_file(path, network_to_json(net));
}

std::string bn_to_json(const DiscreteBayesNet& bn) {
  json doc;
  doc["rule"] = to_string(bn.rule());
  doc["semantics"] = bn.node_semantics();
  doc["num_firms"] = bn.num_firms();
  json nodes = json::array();
  for (int v = 0; v < bn.num_nodes(); ++v) {
    const auto& node = bn.node(v);
    json parents = json::array();
    for (int p : node.parents) parents.push_back(bn.graph().label(p));
    nodes.push_back({{"id", v},
                     {"label", bn.graph().label(v)},
                     {"firm", node.firm + 1},
                     {"copy", node.copy},
                     {"parents", parents},
                     {"cpt", node.cpt}});
  }
  doc["nodes"] = std::move(nodes);
  json order = json::array();
  for (int v : bn.graph().topological_order()) order.push_back(bn.graph().label(v));
  doc["topological_order"] = std::move(order);
  return doc.dump(2) + "\n";
}

Query query_from_json(const std::string& text, Rule default_rule) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("query is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("query must be a JSON object");
  Query q;
  q.rule = default_rule;
  if (doc.contains("rule")) {
    if (!doc["rule"].is_string()) throw std::invalid_argument("query rule must be a string");
    q.rule = parse_rule(doc["rule"].get<std::string>());
  }
  q.targets = parse_assignment(doc.value("targets", json()), "targets");
  q.evidence = parse_assignment(doc.value("evidence", json()), "evidence");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "rule" && it.key() != "targets" && it.key() != "evidence")
      throw std::invalid_argument("unknown query field '" + it.key() + "'");
  return q;
}

void write_count_csv(std::ostream& out, const CountDistribution& dist) {
  out << "n,probability,method,stderr\n";
  for (std::size_t n = 0; n < dist.probability.size(); ++n) {
    out << n << ',' << format_double(dist.probability[n]) << ',' << to_string(dist.method) << ',';
    if (dist.method == CountMethod::MonteCarlo) out << format_double(dist.standard_error[n]);
    out << '\n';
  }
}

}  // namespace contagion
