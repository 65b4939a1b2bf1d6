#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace contagion {

/// Balance-sheet parameters of a single firm at time 0.
struct FirmParams {
  double operating_assets_0 = 1.0;  ///< X_i, strictly positive
  double cash_0 = 0.0;              ///< K_i
  double external_liability = 0.0;  ///< F_i, due at the horizon
  double drift = 0.0;               ///< mu_i (per year)
  double volatility = 0.1;          ///< sigma_i, strictly positive
};

/// A zero-coupon interfirm loan: `lender` holds a bond of `borrower` with
/// face value `amount`, redeemed at the horizon with continuous rate `rate`.
struct Loan {
  int lender = 0;
  int borrower = 0;
  double amount = 0.0;
  double rate = 0.0;
};

/// The financial system: firms, interfirm loans, rates and horizon.
///
/// Loans are kept sorted by (lender, borrower); the liability matrix is
/// sparse with per-firm index lists for claims (loans the firm made) and
/// debts (loans the firm owes). Immutable after construction.
class FinancialNetwork {
 public:
  FinancialNetwork() = default;

  /// Throws std::invalid_argument for structural problems (index out of
  /// range, duplicate lender/borrower pair, non-finite numbers). Economic
  /// constraints are checked by validate_network instead.
  FinancialNetwork(std::vector<FirmParams> firms, std::vector<Loan> loans,
                   double riskless_rate, double external_rate, double horizon);

  std::size_t size() const { return firms_.size(); }
  const FirmParams& firm(int i) const { return firms_[static_cast<std::size_t>(i)]; }
  const std::vector<FirmParams>& firms() const { return firms_; }
  const std::vector<Loan>& loans() const { return loans_; }

  double riskless_rate() const { return riskless_rate_; }
  double external_rate() const { return external_rate_; }
  double horizon() const { return horizon_; }

  /// L_ij: amount firm i lent firm j (0 if no loan).
  double liability(int lender, int borrower) const;
  /// r_ij, 0 if no loan.
  double loan_rate(int lender, int borrower) const;

  /// Indices into loans() of the loans firm i made (i is the lender).
  std::span<const int> claims(int i) const;
  /// Indices into loans() of the loans firm i owes (i is the borrower).
  std::span<const int> debts(int i) const;

  /// e^{r T} L for a loan.
  double redemption_value(const Loan& loan) const;
  /// Cached e^{r T} L of loans()[k].
  double redemption_value(int k) const { return redemption_[static_cast<std::size_t>(k)]; }
  /// e^{r0' T} F_i + sum_j e^{r_ji T} L_ji: everything firm i must pay.
  double total_obligations(int i) const { return obligations_[static_cast<std::size_t>(i)]; }
  /// e^{r0 T} K_i.
  double cash_at_horizon(int i) const { return cash_at_horizon_[static_cast<std::size_t>(i)]; }
  /// Sum over all claims of firm i at full repayment.
  double full_claims(int i) const { return full_claims_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<FirmParams> firms_;
  std::vector<Loan> loans_;
  double riskless_rate_ = 0.0;
  double external_rate_ = 0.0;
  double horizon_ = 1.0;

  std::vector<std::vector<int>> claims_;
  std::vector<std::vector<int>> debts_;
  std::vector<double> obligations_;
  std::vector<double> cash_at_horizon_;
  std::vector<double> full_claims_;
  std::vector<double> redemption_;
};

struct Violation {
  enum class Kind {
    NonPositiveAssets,
    NonPositiveVolatility,
    NegativeCash,
    NegativeExternalLiability,
    NegativeLoan,
    SelfLoan,
    CashBound,
    NonPositiveHorizon,
    InvalidStructure,  ///< unknown firm index, duplicate loan, non-finite value
  };
  Kind kind;
  int firm = -1;   ///< 0-based; -1 when not firm specific
  int other = -1;  ///< counterparty for loan violations
  std::string message;  ///< human readable, 1-based indices
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

const char* to_string(Violation::Kind kind);

/// Lists every violated modelling constraint. The cash bound
/// K_i < e^{(r0'-r0)T} F_i + sum_j e^{(r_ji-r0)T} L_ji is checked as an
/// exact strict inequality.
ValidationReport validate_network(const FinancialNetwork& net);

/// Parameters of a homogeneous core-periphery system.
struct CorePeripheryParams {
  FirmParams core{2000.0, 0.0, 500.0, 0.1, 0.2};
  FirmParams periphery{80.0, 0.0, 90.0, 0.05, 0.1};
  double core_loan = 400.0;       ///< each core lends this to every other core
  double periphery_loan = 35.0;   ///< each periphery bank lends this to its core
  double riskless_rate = 0.0;
  double external_rate = 0.0;
  double loan_rate = 0.0;
  double horizon = 1.0;
};

/// Cores are firms 0..n_core-1 and form a complete lending network. The
/// periphery banks of core c are n_core + c*n_periphery_per_core + k.
FinancialNetwork generate_core_periphery(int n_core, int n_periphery_per_core,
                                         const CorePeripheryParams& params = {});

}  // namespace contagion
