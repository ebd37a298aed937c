#include "maxent/chain.hpp"

#include <cmath>
#include <string>

namespace maxent {

ChainModel::ChainModel(int order, JointTable companion, std::vector<std::vector<double>> factors)
    : order_(order),
      vars_(companion.vars()),
      alphabet_(companion.alphabet()),
      companion_(std::move(companion)),
      factors_(std::move(factors)) {}

ChainModel ChainModel::fit(const JointTable& truth, int order) {
  const int n_vars = static_cast<int>(truth.vars().size());
  if (order < 0 || order >= n_vars) {
    throw ArgumentError("fit_chain: order must be in [0, " + std::to_string(n_vars - 1) + "]");
  }
  if (!truth.is_normalized()) throw ArgumentError("fit_chain: truth must be normalized");

  const int I = truth.alphabet().size();
  std::vector<std::vector<double>> factors(static_cast<std::size_t>(n_vars));
  for (int i = 0; i < n_vars; ++i) {
    const int ctx_len = std::min(order, i);
    std::vector<int> keep;
    keep.reserve(static_cast<std::size_t>(ctx_len) + 1);
    for (int j = i - ctx_len; j <= i; ++j) keep.push_back(truth.vars()[static_cast<std::size_t>(j)]);
    // marginal layout == (context digits..., target) with target fastest
    const JointTable marg = truth.marginal(keep);
    std::vector<double> rows = marg.values();
    const std::size_t n_rows = rows.size() / static_cast<std::size_t>(I);
    for (std::size_t r = 0; r < n_rows; ++r) {
      double mass = 0.0;
      for (int s = 0; s < I; ++s) mass += rows[r * I + s];
      if (mass > 0.0) {
        for (int s = 0; s < I; ++s) rows[r * I + s] /= mass;
      } else {
        for (int s = 0; s < I; ++s) rows[r * I + s] = 1.0 / I;
      }
    }
    factors[static_cast<std::size_t>(i)] = std::move(rows);
  }
  return ChainModel(order, truth, std::move(factors));
}

int ChainModel::context_length(int position) const {
  if (position < 0 || position >= length()) throw ArgumentError("context_length: bad position");
  return std::min(order_, position);
}

std::span<const double> ChainModel::factor_row(int position, std::span<const int> context) const {
  const int ctx_len = context_length(position);
  if (static_cast<int>(context.size()) != ctx_len) {
    throw ShapeError("factor_row: expected " + std::to_string(ctx_len) + " context digits");
  }
  const int I = alphabet_.size();
  std::size_t row = 0;
  for (int d : context) {
    if (d < 0 || d >= I) throw ArgumentError("factor_row: context symbol out of alphabet");
    row = row * static_cast<std::size_t>(I) + static_cast<std::size_t>(d);
  }
  const auto& f = factors_[static_cast<std::size_t>(position)];
  return std::span<const double>(f).subspan(row * static_cast<std::size_t>(I),
                                            static_cast<std::size_t>(I));
}

JointTable ChainModel::joint() const {
  const int I = alphabet_.size();
  const int n = length();
  std::vector<double> out(detail::pow_size(I, static_cast<std::size_t>(n)));
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  std::size_t flat = 0;
  do {
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      const int ctx_len = std::min(order_, i);
      std::size_t row = 0;
      for (int j = i - ctx_len; j < i; ++j) {
        row = row * static_cast<std::size_t>(I) + static_cast<std::size_t>(digits[static_cast<std::size_t>(j)]);
      }
      p *= factors_[static_cast<std::size_t>(i)]
                   [row * static_cast<std::size_t>(I) + static_cast<std::size_t>(digits[static_cast<std::size_t>(i)])];
    }
    out[flat++] = p;
  } while (detail::next_index(digits, I));
  return JointTable(vars_, alphabet_, std::move(out));
}

double ChainModel::entropy() const {
  double h = 0.0;
  for (int i = 0; i < length(); ++i) {
    const int ctx_len = std::min(order_, i);
    std::vector<int> ctx;
    ctx.reserve(static_cast<std::size_t>(ctx_len));
    for (int j = i - ctx_len; j < i; ++j) ctx.push_back(vars_[static_cast<std::size_t>(j)]);
    h += companion_.conditional_entropy(vars_[static_cast<std::size_t>(i)], ctx);
  }
  return h;
}

std::optional<double> ChainModel::sequence_logprob(std::span<const int> sequence) const {
  if (static_cast<int>(sequence.size()) != length()) {
    throw ArgumentError("sequence_logprob: sequence length must equal the model length");
  }
  const int I = alphabet_.size();
  for (int s : sequence) {
    if (s < 0 || s >= I) throw ArgumentError("sequence_logprob: symbol out of alphabet");
  }
  double lp = 0.0;
  for (int i = 0; i < length(); ++i) {
    const int ctx_len = std::min(order_, i);
    const auto row = factor_row(i, sequence.subspan(static_cast<std::size_t>(i - ctx_len),
                                                    static_cast<std::size_t>(ctx_len)));
    const double p = row[static_cast<std::size_t>(sequence[static_cast<std::size_t>(i)])];
    if (p <= 0.0) return std::nullopt;
    lp += std::log(p);
  }
  return lp;
}

}  // namespace maxent
