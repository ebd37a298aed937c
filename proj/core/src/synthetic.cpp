#include "maxent/synthetic.hpp"

#include <cmath>
#include <random>

namespace maxent {

namespace {

// standard exponential; Dirichlet(1) = normalized iid exponentials
double exp_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double u;
  do {
    u = uni(rng);
  } while (u <= 0.0);
  return -std::log(u);
}

}  // namespace

JointTable random_joint(std::vector<int> vars, Alphabet alphabet, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = detail::pow_size(alphabet.size(), vars.size());
  std::vector<double> values(n);
  double sum = 0.0;
  for (double& v : values) {
    v = exp_draw(rng);
    sum += v;
  }
  for (double& v : values) v /= sum;
  return JointTable(std::move(vars), alphabet, std::move(values));
}

JointTable random_markov_joint(std::vector<int> vars, Alphabet alphabet, int order,
                               std::uint64_t seed) {
  const int n = static_cast<int>(vars.size());
  if (order < 0 || order >= n) throw ArgumentError("random_markov_joint: bad order");
  std::mt19937_64 rng(seed);
  const int I = alphabet.size();

  // factor rows per position
  std::vector<std::vector<double>> factors(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int ctx_len = std::min(order, i);
    const std::size_t rows = detail::pow_size(I, static_cast<std::size_t>(ctx_len));
    std::vector<double> f(rows * static_cast<std::size_t>(I));
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (int s = 0; s < I; ++s) {
        f[r * I + s] = exp_draw(rng);
        sum += f[r * I + s];
      }
      for (int s = 0; s < I; ++s) f[r * I + s] /= sum;
    }
    factors[static_cast<std::size_t>(i)] = std::move(f);
  }

  std::vector<double> values(detail::pow_size(I, static_cast<std::size_t>(n)));
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  std::size_t flat = 0;
  do {
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      const int ctx_len = std::min(order, i);
      std::size_t row = 0;
      for (int j = i - ctx_len; j < i; ++j) {
        row = row * static_cast<std::size_t>(I) + static_cast<std::size_t>(digits[static_cast<std::size_t>(j)]);
      }
      p *= factors[static_cast<std::size_t>(i)][row * I + static_cast<std::size_t>(digits[static_cast<std::size_t>(i)])];
    }
    values[flat++] = p;
  } while (detail::next_index(digits, I));
  return JointTable(std::move(vars), alphabet, std::move(values));
}

}  // namespace maxent
