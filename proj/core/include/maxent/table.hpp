#pragma once

// Dense discrete probability tables over an ordered set of variables that
// share one alphabet. Storage is row-major in variable order: the first
// variable is the slowest-varying digit of the flat index. All operations
// are pure; tables are immutable after construction and safe to share
// between threads.

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "maxent/errors.hpp"

namespace maxent {

class Alphabet {
 public:
  explicit Alphabet(int size) : size_(size) {
    if (size < 1) throw ArgumentError("Alphabet size must be >= 1");
  }
  int size() const noexcept { return size_; }
  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  int size_;
};

// Partial outcome: variable label -> symbol index.
using Assignment = std::map<int, int>;

// p(target | given): one distribution over the target's symbols.
class ConditionalSlice {
 public:
  ConditionalSlice(int target_var, Assignment given, std::vector<double> probs);

  int target_var() const noexcept { return target_var_; }
  const Assignment& given() const noexcept { return given_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

 private:
  int target_var_;
  Assignment given_;
  std::vector<double> probs_;
};

class JointTable {
 public:
  // values has length alphabet.size()^vars.size(), row-major in `vars` order,
  // every entry finite and >= 0.
  JointTable(std::vector<int> vars, Alphabet alphabet, std::vector<double> values);

  static JointTable uniform(std::vector<int> vars, Alphabet alphabet);

  const std::vector<int>& vars() const noexcept { return vars_; }
  Alphabet alphabet() const noexcept { return alphabet_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  bool has_var(int label) const noexcept;
  // Position of `label` in vars(); throws UnknownVariableError.
  int var_position(int label) const;

  double total_mass() const noexcept;
  bool is_normalized(double tol = 1e-9) const noexcept;

  // Flat index of a full outcome given one digit per variable (vars order).
  std::size_t flat_index(std::span<const int> digits) const;

  // Rescale so entries sum to 1. Throws ZeroMassError if the table is all
  // zero.
  JointTable normalized() const;

  // Sum out every variable not in `keep`. Result variables appear in this
  // table's order; total mass is preserved.
  JointTable marginal(std::span<const int> keep) const;

  // Same distribution with axes permuted to `new_order` (a permutation of
  // vars()).
  JointTable permuted(std::span<const int> new_order) const;

  // p(target | given). Variables absent from `given` (other than the target)
  // are marginalized out. Throws ConditioningOnNullEventError when the
  // conditioning event has zero mass.
  ConditionalSlice condition(int target, const Assignment& given) const;

  // Shannon entropy in nats, with 0 ln 0 := 0. Requires a normalized table.
  double entropy() const;

  // H(target | given_vars) = H(target, given_vars) - H(given_vars).
  double conditional_entropy(int target, std::span<const int> given_vars) const;

 private:
  std::vector<int> vars_;
  Alphabet alphabet_;
  std::vector<double> values_;
};

// max - min of a probability vector.
double spread(std::span<const double> probs);

// Entropies are natural-log throughout; helper for callers wanting bits.
inline double nats_to_bits(double nats) { return nats / 0.6931471805599453; }

// Draw a symbol from probs^(1/temperature), renormalized. Temperatures below
// 1e-12 short-circuit to the argmax with lowest-index tie-break, making the
// temperature -> 0 limit deterministic. Reproducible for a fixed seed.
int sample(const ConditionalSlice& slice, double temperature, std::mt19937_64& rng);
int sample(const ConditionalSlice& slice, double temperature, std::uint64_t rng_seed);

namespace detail {

// Odometer increment of a row-major multi-index; returns false on wrap.
inline bool next_index(std::vector<int>& digits, int base) {
  for (int k = static_cast<int>(digits.size()) - 1; k >= 0; --k) {
    if (++digits[k] < base) return true;
    digits[k] = 0;
  }
  return false;
}

// base^exp with overflow saturation to SIZE_MAX.
std::size_t pow_size(int base, std::size_t exp);

}  // namespace detail

}  // namespace maxent
