#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>

#include "contagion/bayesnet.hpp"
#include "contagion/inference.hpp"
#include "contagion/network.hpp"

namespace contagion {

/// Malformed or unreadable input (as opposed to a model violation).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "%.17g": shortest fixed-width form that round-trips every double.
std::string format_double(double x);

/// Network file format (firm indices are 0-based here, 1-based in reports):
///
///   {"firms": [{"f": F, "k0": K, "mu": mu, "sigma": sigma, "x0": X}, ...],
///    "horizon": T,
///    "loans": [{"amount": L, "borrower": j, "lender": i, "rate": r}, ...],
///    "r0": r0, "r0_ext": r0'}
///
/// Keys are written in this (alphabetical) order and loans sorted by
/// (lender, borrower), so save(load(save(net))) is byte-identical.
/// Missing optional fields default to 0 (f, k0, mu, rates) and 1 (horizon).
FinancialNetwork network_from_json(const std::string& text);
std::string network_to_json(const FinancialNetwork& net);

FinancialNetwork load_network(const std::filesystem::path& path);
void save_network(const FinancialNetwork& net, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Nodes with 1-based firm labels, canonical parents, and CPT rows.
std::string bn_to_json(const DiscreteBayesNet& bn);

/// {"targets": {"2": 1}, "evidence": {"1": 1}, "rule": "mild"} with 1-based
/// firm keys; `rule` falls back to `default_rule` when absent.
Query query_from_json(const std::string& text, Rule default_rule = Rule::Mild);

/// CSV with header n,probability,method,stderr (stderr empty when exact).
void write_count_csv(std::ostream& out, const CountDistribution& dist);

}  // namespace contagion
