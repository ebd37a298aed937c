#pragma once

// Order-n autoregressive chain models p(x_1..x_N) = prod_i p(x_i | n
// predecessors), fitted exactly from a ground-truth joint. Order 0 is the
// independent model; order N-1 reproduces the truth by the chain rule.

#include <optional>
#include <span>
#include <vector>

#include "maxent/table.hpp"

namespace maxent {

class ChainModel {
 public:
  // Exact conditionals of `truth` at every position, contexts truncated at
  // the first variable. Contexts with zero mass under the truth get a
  // uniform row. Requires 0 <= order < truth.vars().size().
  static ChainModel fit(const JointTable& truth, int order);

  int order() const noexcept { return order_; }
  int length() const noexcept { return static_cast<int>(vars_.size()); }
  const std::vector<int>& vars() const noexcept { return vars_; }
  Alphabet alphabet() const noexcept { return alphabet_; }

  // The joint the model was fitted from; context weights for entropy().
  const JointTable& companion() const noexcept { return companion_; }

  // Number of predecessors position i (0-based) conditions on.
  int context_length(int position) const;

  // Conditional row p(x_position = . | context); context digits are the
  // predecessor symbols in variable order.
  std::span<const double> factor_row(int position, std::span<const int> context) const;

  // Product of all factors over all outcomes.
  JointTable joint() const;

  // Sum over positions of H(x_i | context_i), context distribution taken
  // from the companion joint.
  double entropy() const;

  // Sum of log factors; nullopt flags an impossible (zero-probability)
  // sequence so comparisons stay total.
  std::optional<double> sequence_logprob(std::span<const int> sequence) const;

 private:
  ChainModel(int order, JointTable companion, std::vector<std::vector<double>> factors);

  int order_;
  std::vector<int> vars_;
  Alphabet alphabet_;
  JointTable companion_;
  // factors_[i]: I^{ctx_len} conditional rows of length I, context digits
  // row-major, target symbol fastest.
  std::vector<std::vector<double>> factors_;
};

}  // namespace maxent
