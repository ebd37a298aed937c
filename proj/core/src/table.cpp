#include "maxent/table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace maxent {

namespace detail {

std::size_t pow_size(int base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    const std::size_t b = static_cast<std::size_t>(base);
    if (out > std::numeric_limits<std::size_t>::max() / b) {
      return std::numeric_limits<std::size_t>::max();
    }
    out *= b;
  }
  return out;
}

}  // namespace detail

ConditionalSlice::ConditionalSlice(int target_var, Assignment given, std::vector<double> probs)
    : target_var_(target_var), given_(std::move(given)), probs_(std::move(probs)) {
  if (probs_.empty()) throw ArgumentError("ConditionalSlice: empty probability vector");
  if (given_.contains(target_var_)) {
    throw ArgumentError("ConditionalSlice: given assigns the target variable");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ArgumentError("ConditionalSlice: probabilities must be finite and >= 0");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ArgumentError("ConditionalSlice: probabilities sum to " + std::to_string(sum));
  }
}

JointTable::JointTable(std::vector<int> vars, Alphabet alphabet, std::vector<double> values)
    : vars_(std::move(vars)), alphabet_(alphabet), values_(std::move(values)) {
  if (vars_.empty()) throw ArgumentError("JointTable: needs at least one variable");
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    for (std::size_t j = i + 1; j < vars_.size(); ++j) {
      if (vars_[i] == vars_[j]) {
        throw ArgumentError("JointTable: duplicate variable label " + std::to_string(vars_[i]));
      }
    }
  }
  const std::size_t expected = detail::pow_size(alphabet_.size(), vars_.size());
  if (values_.size() != expected) {
    throw ShapeError("JointTable: expected " + std::to_string(expected) + " values, got " +
                     std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ArgumentError("JointTable: entries must be finite and >= 0");
    }
  }
}

JointTable JointTable::uniform(std::vector<int> vars, Alphabet alphabet) {
  const std::size_t n = detail::pow_size(alphabet.size(), vars.size());
  return JointTable(std::move(vars), alphabet, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

bool JointTable::has_var(int label) const noexcept {
  return std::find(vars_.begin(), vars_.end(), label) != vars_.end();
}

int JointTable::var_position(int label) const {
  auto it = std::find(vars_.begin(), vars_.end(), label);
  if (it == vars_.end()) {
    throw UnknownVariableError("variable " + std::to_string(label) + " not in table");
  }
  return static_cast<int>(it - vars_.begin());
}

double JointTable::total_mass() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

bool JointTable::is_normalized(double tol) const noexcept {
  return std::abs(total_mass() - 1.0) <= tol;
}

std::size_t JointTable::flat_index(std::span<const int> digits) const {
  if (digits.size() != vars_.size()) throw ShapeError("flat_index: wrong digit count");
  const int I = alphabet_.size();
  std::size_t idx = 0;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= I) throw ArgumentError("flat_index: digit out of range");
    idx = idx * static_cast<std::size_t>(I) + static_cast<std::size_t>(digits[k]);
  }
  return idx;
}

JointTable JointTable::normalized() const {
  const double mass = total_mass();
  if (mass <= 0.0) throw ZeroMassError("normalize: table has no mass");
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] / mass;
  return JointTable(vars_, alphabet_, std::move(out));
}

JointTable JointTable::marginal(std::span<const int> keep) const {
  if (keep.empty()) throw ArgumentError("marginal: keep set is empty");
  std::vector<int> positions;
  positions.reserve(keep.size());
  for (int label : keep) positions.push_back(var_position(label));
  std::sort(positions.begin(), positions.end());
  if (std::adjacent_find(positions.begin(), positions.end()) != positions.end()) {
    throw ArgumentError("marginal: duplicate variable in keep set");
  }

  const int I = alphabet_.size();
  const std::size_t n = vars_.size();
  const std::size_t k = positions.size();

  std::vector<int> out_vars(k);
  for (std::size_t j = 0; j < k; ++j) out_vars[j] = vars_[positions[j]];

  // contribution of each source digit to the destination flat index
  std::vector<std::size_t> contrib(n, 0);
  {
    std::size_t stride = 1;
    for (std::size_t j = k; j-- > 0;) {
      contrib[positions[j]] = stride;
      stride *= static_cast<std::size_t>(I);
    }
  }

  std::vector<double> out(detail::pow_size(I, k), 0.0);
  std::vector<int> digits(n, 0);
  std::size_t dest = 0;
  std::size_t flat = 0;
  for (;;) {
    out[dest] += values_[flat];
    ++flat;
    // incremental odometer update of dest
    int pos = static_cast<int>(n) - 1;
    for (; pos >= 0; --pos) {
      if (++digits[pos] < I) {
        dest += contrib[pos];
        break;
      }
      digits[pos] = 0;
      dest -= contrib[pos] * static_cast<std::size_t>(I - 1);
    }
    if (pos < 0) break;
  }
  return JointTable(std::move(out_vars), alphabet_, std::move(out));
}

JointTable JointTable::permuted(std::span<const int> new_order) const {
  if (new_order.size() != vars_.size()) throw ShapeError("permuted: wrong variable count");
  std::vector<int> positions;
  positions.reserve(new_order.size());
  for (int label : new_order) positions.push_back(var_position(label));
  {
    std::vector<int> check = positions;
    std::sort(check.begin(), check.end());
    for (std::size_t i = 0; i < check.size(); ++i) {
      if (check[i] != static_cast<int>(i)) throw ArgumentError("permuted: not a permutation");
    }
  }

  const int I = alphabet_.size();
  const std::size_t n = vars_.size();
  // dest digit j comes from source position positions[j]
  std::vector<std::size_t> contrib(n, 0);
  {
    std::size_t stride = 1;
    for (std::size_t j = n; j-- > 0;) {
      contrib[positions[j]] = stride;
      stride *= static_cast<std::size_t>(I);
    }
  }
  std::vector<double> out(values_.size());
  std::vector<int> digits(n, 0);
  std::size_t dest = 0;
  std::size_t flat = 0;
  for (;;) {
    out[dest] = values_[flat];
    ++flat;
    int pos = static_cast<int>(n) - 1;
    for (; pos >= 0; --pos) {
      if (++digits[pos] < I) {
        dest += contrib[pos];
        break;
      }
      digits[pos] = 0;
      dest -= contrib[pos] * static_cast<std::size_t>(I - 1);
    }
    if (pos < 0) break;
  }
  std::vector<int> out_vars(new_order.begin(), new_order.end());
  return JointTable(std::move(out_vars), alphabet_, std::move(out));
}

ConditionalSlice JointTable::condition(int target, const Assignment& given) const {
  const int I = alphabet_.size();
  if (!has_var(target)) throw UnknownVariableError("condition: unknown target variable");
  for (const auto& [label, symbol] : given) {
    if (label == target) throw ArgumentError("condition: given assigns the target variable");
    if (!has_var(label)) throw UnknownVariableError("condition: unknown given variable");
    if (symbol < 0 || symbol >= I) throw ArgumentError("condition: symbol out of alphabet");
  }

  std::vector<int> keep;
  keep.reserve(given.size() + 1);
  keep.push_back(target);
  for (const auto& [label, _] : given) keep.push_back(label);
  const JointTable marg = marginal(keep);

  const int tpos = marg.var_position(target);
  std::vector<int> digits(marg.vars().size(), 0);
  for (std::size_t k = 0; k < marg.vars().size(); ++k) {
    if (static_cast<int>(k) == tpos) continue;
    digits[k] = given.at(marg.vars()[k]);
  }

  std::vector<double> probs(static_cast<std::size_t>(I));
  double mass = 0.0;
  for (int s = 0; s < I; ++s) {
    digits[tpos] = s;
    probs[static_cast<std::size_t>(s)] = marg.values()[marg.flat_index(digits)];
    mass += probs[static_cast<std::size_t>(s)];
  }
  if (mass <= 0.0) throw ConditioningOnNullEventError("condition: event has zero mass");
  double renorm = 0.0;
  for (double& p : probs) {
    p /= mass;
    renorm += p;
  }
  for (double& p : probs) p /= renorm;
  return ConditionalSlice(target, given, std::move(probs));
}

double JointTable::entropy() const {
  if (!is_normalized()) throw ArgumentError("entropy: table is not normalized");
  double h = 0.0;
  for (double p : values_) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

double JointTable::conditional_entropy(int target, std::span<const int> given_vars) const {
  if (!has_var(target)) throw UnknownVariableError("conditional_entropy: unknown target");
  for (int g : given_vars) {
    if (g == target) throw ArgumentError("conditional_entropy: target appears in given_vars");
    if (!has_var(g)) throw UnknownVariableError("conditional_entropy: unknown given variable");
  }
  if (given_vars.empty()) {
    const int t = target;
    return marginal(std::span<const int>(&t, 1)).entropy();
  }
  std::vector<int> both(given_vars.begin(), given_vars.end());
  both.push_back(target);
  const JointTable joint_marg = marginal(both);
  const JointTable given_marg = joint_marg.marginal(given_vars);
  return joint_marg.entropy() - given_marg.entropy();
}

double spread(std::span<const double> probs) {
  if (probs.empty()) throw ArgumentError("spread: empty vector");
  const auto [lo, hi] = std::minmax_element(probs.begin(), probs.end());
  return *hi - *lo;
}

int sample(const ConditionalSlice& slice, double temperature, std::mt19937_64& rng) {
  if (!std::isfinite(temperature) || temperature <= 0.0) {
    throw ArgumentError("sample: temperature must be finite and > 0");
  }
  const auto& probs = slice.probs();
  if (temperature < 1e-12) {
    int best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = static_cast<int>(i);
    }
    return best;
  }

  double max_log = -std::numeric_limits<double>::infinity();
  for (double p : probs) {
    if (p > 0.0) max_log = std::max(max_log, std::log(p));
  }
  std::vector<double> weights(probs.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) {
      weights[i] = std::exp((std::log(probs[i]) - max_log) / temperature);
      total += weights[i];
    }
  }
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u = uni(rng) * total;
  double cum = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cum += weights[i];
    if (u < cum) return static_cast<int>(i);
  }
  return last_positive;
}

int sample(const ConditionalSlice& slice, double temperature, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return sample(slice, temperature, rng);
}

}  // namespace maxent
