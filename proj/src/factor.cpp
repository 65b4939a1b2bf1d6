#include "contagion/factor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contagion {

Factor::Factor(std::vector<int> scope, std::vector<double> table)
    : scope_(std::move(scope)), table_(std::move(table)) {
  if (scope_.size() >= 63) throw std::length_error("factor scope too large");
  for (std::size_t k = 1; k < scope_.size(); ++k)
    if (scope_[k - 1] >= scope_[k]) throw std::invalid_argument("factor scope must be strictly increasing");
  if (table_.size() != (std::size_t{1} << scope_.size()))
    throw std::invalid_argument("factor table size must be 2^|scope|");
  for (double v : table_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("factor entries must be finite and nonnegative");
}

bool Factor::contains(int var) const { return position(var) >= 0; }

int Factor::position(int var) const {
  auto it = std::lower_bound(scope_.begin(), scope_.end(), var);
  if (it == scope_.end() || *it != var) return -1;
  return static_cast<int>(it - scope_.begin());
}

double Factor::at(std::span<const std::uint8_t> values) const {
  std::size_t index = 0;
  for (std::size_t k = 0; k < scope_.size(); ++k) index = (index << 1) | (values[k] ? 1U : 0U);
  return table_[index];
}

double Factor::sum() const {
  double s = 0.0;
  for (double v : table_) s += v;
  return s;
}

namespace {

// Index weight, inside a factor with scope `sub`, of each position of `full`.
std::vector<std::size_t> weights_in(const std::vector<int>& full, const Factor& sub) {
  const std::size_t k = sub.scope().size();
  std::vector<std::size_t> w(full.size(), 0);
  for (std::size_t p = 0; p < full.size(); ++p) {
    int pos = sub.position(full[p]);
    if (pos >= 0) w[p] = std::size_t{1} << (k - 1 - static_cast<std::size_t>(pos));
  }
  return w;
}

}  // namespace

Factor factor_product(const Factor& a, const Factor& b) {
  std::vector<int> scope;
  std::set_union(a.scope().begin(), a.scope().end(), b.scope().begin(), b.scope().end(),
                 std::back_inserter(scope));
  const std::size_t k = scope.size();
  const auto wa = weights_in(scope, a);
  const auto wb = weights_in(scope, b);
  std::vector<double> table(std::size_t{1} << k);

  // Walk result indices in order, maintaining the operand indices through
  // a binary counter over the result bits (last scope variable is bit 0).
  std::size_t ia = 0, ib = 0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    table[r] = a[ia] * b[ib];
    for (std::size_t p = k; p-- > 0;) {
      const std::size_t mask = std::size_t{1} << (k - 1 - p);
      if (r & mask) {
        ia -= wa[p];
        ib -= wb[p];
      } else {
        ia += wa[p];
        ib += wb[p];
        break;
      }
    }
  }
  return Factor(std::move(scope), std::move(table));
}

Factor marginalize(const Factor& f, int var) {
  const int pos = f.position(var);
  if (pos < 0) return f;
  const std::size_t k = f.scope().size();
  const std::size_t shift = k - 1 - static_cast<std::size_t>(pos);
  const std::size_t low_mask = (std::size_t{1} << shift) - 1;
  std::vector<int> scope = f.scope();
  scope.erase(scope.begin() + pos);
  std::vector<double> table(std::size_t{1} << (k - 1), 0.0);
  for (std::size_t r = 0; r < table.size(); ++r) {
    const std::size_t high = (r & ~low_mask) << 1;
    const std::size_t base = high | (r & low_mask);
    table[r] = f[base] + f[base | (std::size_t{1} << shift)];
  }
  return Factor(std::move(scope), std::move(table));
}

Factor reduce_evidence(const Factor& f, std::span<const std::pair<int, std::uint8_t>> assignment) {
  const std::size_t k = f.scope().size();
  std::size_t fixed_mask = 0, fixed_bits = 0;
  std::vector<int> scope;
  for (std::size_t p = 0; p < k; ++p) {
    const int var = f.scope()[p];
    auto it = std::find_if(assignment.begin(), assignment.end(),
                           [var](const auto& a) { return a.first == var; });
    const std::size_t bit = std::size_t{1} << (k - 1 - p);
    if (it != assignment.end()) {
      fixed_mask |= bit;
      if (it->second) fixed_bits |= bit;
    } else {
      scope.push_back(var);
    }
  }
  if (fixed_mask == 0) return f;
  std::vector<double> table;
  table.reserve(std::size_t{1} << scope.size());
  for (std::size_t idx = 0; idx < f.size(); ++idx)
    if ((idx & fixed_mask) == fixed_bits) table.push_back(f[idx]);
  return Factor(std::move(scope), std::move(table));
}

}  // namespace contagion
