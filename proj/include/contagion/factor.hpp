#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace contagion {

/// Nonnegative table over binary variables.
///
/// The scope is kept sorted ascending; entry index bits follow the scope
/// with the first variable as the most significant bit, so for scope (a, b)
/// the table is [f(0,0), f(0,1), f(1,0), f(1,1)].
class Factor {
 public:
  Factor() : table_{1.0} {}
  /// `scope` must be strictly increasing and table.size() == 2^|scope|.
  Factor(std::vector<int> scope, std::vector<double> table);
  /// Constant factor over the empty scope.
  static Factor constant(double value) { return Factor({}, {value}); }

  const std::vector<int>& scope() const { return scope_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t size() const { return table_.size(); }
  bool contains(int var) const;
  /// Position of `var` in the scope or -1.
  int position(int var) const;

  double operator[](std::size_t index) const { return table_[index]; }
  /// Value at an assignment given in scope order.
  double at(std::span<const std::uint8_t> values) const;
  double sum() const;

 private:
  std::vector<int> scope_;
  std::vector<double> table_;
};

/// Pointwise product over the union of scopes.
Factor factor_product(const Factor& a, const Factor& b);

/// Sums `var` out; returns the factor unchanged if var is not in scope.
Factor marginalize(const Factor& f, int var);

/// Slices the table at the given (variable, value) pairs; variables not in
/// scope are ignored.
Factor reduce_evidence(const Factor& f, std::span<const std::pair<int, std::uint8_t>> assignment);

}  // namespace contagion
