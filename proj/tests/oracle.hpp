#pragma once

// Test-side oracles, kept independent of the library implementations they
// check: plain-loop enumeration over raw value vectors and an Eigen-based
// matrix rank. Flat indices are row-major with the first variable slowest,
// matching the library's documented layout.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace oracle {

inline std::size_t ipow(int base, std::size_t exp) {
  std::size_t out = 1;
  while (exp--) out *= static_cast<std::size_t>(base);
  return out;
}

inline std::vector<int> digits_of(std::size_t flat, std::size_t n, int base) {
  std::vector<int> d(n);
  for (std::size_t k = n; k-- > 0;) {
    d[k] = static_cast<int>(flat % static_cast<std::size_t>(base));
    flat /= static_cast<std::size_t>(base);
  }
  return d;
}

inline std::size_t flat_of(const std::vector<int>& digits, int base) {
  std::size_t f = 0;
  for (int d : digits) f = f * static_cast<std::size_t>(base) + static_cast<std::size_t>(d);
  return f;
}

// Marginal onto `keep_positions` (ascending), result row-major in that order.
inline std::vector<double> marginal(const std::vector<double>& values, std::size_t n_vars,
                                    int base, const std::vector<int>& keep_positions) {
  std::vector<double> out(ipow(base, keep_positions.size()), 0.0);
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    const std::vector<int> d = digits_of(flat, n_vars, base);
    std::vector<int> kd;
    for (int p : keep_positions) kd.push_back(d[static_cast<std::size_t>(p)]);
    out[flat_of(kd, base)] += values[flat];
  }
  return out;
}

inline double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

// P(target = s | fixed positions) by direct summation; empty() when the
// conditioning event has no mass.
inline std::vector<double> conditional(const std::vector<double>& values, std::size_t n_vars,
                                       int base, int target_pos,
                                       const std::map<int, int>& given_pos_to_symbol) {
  std::vector<double> probs(static_cast<std::size_t>(base), 0.0);
  double mass = 0.0;
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    const std::vector<int> d = digits_of(flat, n_vars, base);
    bool match = true;
    for (const auto& [pos, sym] : given_pos_to_symbol) {
      if (d[static_cast<std::size_t>(pos)] != sym) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    probs[static_cast<std::size_t>(d[static_cast<std::size_t>(target_pos)])] += values[flat];
    mass += values[flat];
  }
  if (mass <= 0.0) return {};
  for (double& p : probs) p /= mass;
  return probs;
}

inline int rank(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows.front().size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

// The worked 3-variable binary Markov joint: p(x1) = (0.5, 0.5), transition
// rows (0.9, 0.1) and (0.2, 0.8), composed by direct products.
inline std::vector<double> mc_joint_3var() {
  const double p1[2] = {0.5, 0.5};
  const double tr[2][2] = {{0.9, 0.1}, {0.2, 0.8}};
  std::vector<double> values(8);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) values[static_cast<std::size_t>(4 * a + 2 * b + c)] = p1[a] * tr[a][b] * tr[b][c];
    }
  }
  return values;
}

// Dirichlet(1) draw over the simplex (exponential spacings).
inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (double& x : v) {
    double u;
    do {
      u = uni(rng);
    } while (u <= 0.0);
    x = -std::log(u);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace oracle
