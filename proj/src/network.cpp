#include "contagion/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace contagion {

namespace {

bool finite(double x) { return std::isfinite(x); }

std::string firm_label(int i) { return std::to_string(i + 1); }

}  // namespace

FinancialNetwork::FinancialNetwork(std::vector<FirmParams> firms, std::vector<Loan> loans,
                                   double riskless_rate, double external_rate, double horizon)
    : firms_(std::move(firms)),
      loans_(std::move(loans)),
      riskless_rate_(riskless_rate),
      external_rate_(external_rate),
      horizon_(horizon) {
  const int n = static_cast<int>(firms_.size());
  if (!finite(riskless_rate_) || !finite(external_rate_) || !finite(horizon_))
    throw std::invalid_argument("rates and horizon must be finite");
  for (int i = 0; i < n; ++i) {
    const auto& f = firms_[static_cast<std::size_t>(i)];
    if (!finite(f.operating_assets_0) || !finite(f.cash_0) || !finite(f.external_liability) ||
        !finite(f.drift) || !finite(f.volatility))
      throw std::invalid_argument("firm " + firm_label(i) + " has a non-finite parameter");
  }
  for (const auto& loan : loans_) {
    if (loan.lender < 0 || loan.lender >= n || loan.borrower < 0 || loan.borrower >= n)
      throw std::invalid_argument("loan references a firm index outside [0, N)");
    if (!finite(loan.amount) || !finite(loan.rate))
      throw std::invalid_argument("loan amount and rate must be finite");
  }
  std::sort(loans_.begin(), loans_.end(), [](const Loan& a, const Loan& b) {
    return std::tie(a.lender, a.borrower) < std::tie(b.lender, b.borrower);
  });
  for (std::size_t k = 1; k < loans_.size(); ++k) {
    if (loans_[k].lender == loans_[k - 1].lender && loans_[k].borrower == loans_[k - 1].borrower)
      throw std::invalid_argument("duplicate loan from firm " + firm_label(loans_[k].lender) +
                                  " to firm " + firm_label(loans_[k].borrower));
  }

  claims_.assign(firms_.size(), {});
  debts_.assign(firms_.size(), {});
  for (std::size_t k = 0; k < loans_.size(); ++k) {
    claims_[static_cast<std::size_t>(loans_[k].lender)].push_back(static_cast<int>(k));
    debts_[static_cast<std::size_t>(loans_[k].borrower)].push_back(static_cast<int>(k));
  }

  for (const auto& loan : loans_) redemption_.push_back(redemption_value(loan));
  obligations_.assign(firms_.size(), 0.0);
  cash_at_horizon_.assign(firms_.size(), 0.0);
  full_claims_.assign(firms_.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    double owed = std::exp(external_rate_ * horizon_) * firms_[idx].external_liability;
    for (int k : debts_[idx]) owed += redemption_value(k);
    obligations_[idx] = owed;
    cash_at_horizon_[idx] = std::exp(riskless_rate_ * horizon_) * firms_[idx].cash_0;
    double claims = 0.0;
    for (int k : claims_[idx]) claims += redemption_value(k);
    full_claims_[idx] = claims;
  }
}

double FinancialNetwork::liability(int lender, int borrower) const {
  for (int k : claims(lender)) {
    const auto& loan = loans_[static_cast<std::size_t>(k)];
    if (loan.borrower == borrower) return loan.amount;
  }
  return 0.0;
}

double FinancialNetwork::loan_rate(int lender, int borrower) const {
  for (int k : claims(lender)) {
    const auto& loan = loans_[static_cast<std::size_t>(k)];
    if (loan.borrower == borrower) return loan.rate;
  }
  return 0.0;
}

std::span<const int> FinancialNetwork::claims(int i) const {
  return claims_[static_cast<std::size_t>(i)];
}

std::span<const int> FinancialNetwork::debts(int i) const {
  return debts_[static_cast<std::size_t>(i)];
}

double FinancialNetwork::redemption_value(const Loan& loan) const {
  return std::exp(loan.rate * horizon_) * loan.amount;
}

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::NonPositiveAssets: return "non_positive_assets";
    case Violation::Kind::NonPositiveVolatility: return "non_positive_volatility";
    case Violation::Kind::NegativeCash: return "negative_cash";
    case Violation::Kind::NegativeExternalLiability: return "negative_external_liability";
    case Violation::Kind::NegativeLoan: return "negative_loan";
    case Violation::Kind::SelfLoan: return "self_loan";
    case Violation::Kind::CashBound: return "cash_bound";
    case Violation::Kind::NonPositiveHorizon: return "non_positive_horizon";
    case Violation::Kind::InvalidStructure: return "invalid_structure";
  }
  return "unknown";
}

ValidationReport validate_network(const FinancialNetwork& net) {
  ValidationReport report;
  auto add = [&](Violation::Kind kind, int firm, int other, std::string msg) {
    report.violations.push_back({kind, firm, other, std::move(msg)});
  };

  const double T = net.horizon();
  if (!(T > 0.0)) add(Violation::Kind::NonPositiveHorizon, -1, -1, "horizon must be positive");

  const int n = static_cast<int>(net.size());
  for (int i = 0; i < n; ++i) {
    const auto& f = net.firm(i);
    const std::string who = "firm " + firm_label(i);
    if (!(f.operating_assets_0 > 0.0))
      add(Violation::Kind::NonPositiveAssets, i, -1, who + ": operating assets must be positive");
    if (!(f.volatility > 0.0))
      add(Violation::Kind::NonPositiveVolatility, i, -1, who + ": volatility must be positive");
    if (f.cash_0 < 0.0) add(Violation::Kind::NegativeCash, i, -1, who + ": cash is negative");
    if (f.external_liability < 0.0)
      add(Violation::Kind::NegativeExternalLiability, i, -1,
          who + ": external liability is negative");
  }

  for (const auto& loan : net.loans()) {
    const std::string pair = "loan " + firm_label(loan.lender) + "->" + firm_label(loan.borrower);
    if (loan.lender == loan.borrower)
      add(Violation::Kind::SelfLoan, loan.lender, loan.borrower, pair + ": firm lends to itself");
    if (loan.amount < 0.0)
      add(Violation::Kind::NegativeLoan, loan.lender, loan.borrower, pair + ": negative amount");
  }

  const double r0 = net.riskless_rate();
  for (int i = 0; i < n; ++i) {
    const auto& f = net.firm(i);
    double bound = std::exp((net.external_rate() - r0) * T) * f.external_liability;
    for (int k : net.debts(i)) {
      const auto& loan = net.loans()[static_cast<std::size_t>(k)];
      bound += std::exp((loan.rate - r0) * T) * loan.amount;
    }
    if (!(f.cash_0 < bound)) {
      std::ostringstream os;
      os.precision(17);
      os << "firm " << firm_label(i) << ": cash " << f.cash_0
         << " is not below the bound " << bound << " (firm can never default)";
      add(Violation::Kind::CashBound, i, -1, os.str());
    }
  }
  return report;
}

FinancialNetwork generate_core_periphery(int n_core, int n_periphery_per_core,
                                         const CorePeripheryParams& params) {
  if (n_core < 1 || n_periphery_per_core < 0)
    throw std::invalid_argument("core-periphery generator needs n_core >= 1, n_periphery >= 0");
  const int n = n_core + n_core * n_periphery_per_core;
  std::vector<FirmParams> firms(static_cast<std::size_t>(n), params.periphery);
  for (int c = 0; c < n_core; ++c) firms[static_cast<std::size_t>(c)] = params.core;

  std::vector<Loan> loans;
  for (int a = 0; a < n_core; ++a)
    for (int b = 0; b < n_core; ++b)
      if (a != b) loans.push_back({a, b, params.core_loan, params.loan_rate});
  for (int c = 0; c < n_core; ++c)
    for (int k = 0; k < n_periphery_per_core; ++k)
      loans.push_back({n_core + c * n_periphery_per_core + k, c, params.periphery_loan,
                       params.loan_rate});
  return FinancialNetwork(std::move(firms), std::move(loans), params.riskless_rate,
                          params.external_rate, params.horizon);
}

}  // namespace contagion
