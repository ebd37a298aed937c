#pragma once

// Closed-form maximum-entropy model on the positive integers under a mean
// constraint: p_k = (1/(mu-1)) ((mu-1)/mu)^k for k >= 1, entropy
// H(mu) = mu ln mu - (mu-1) ln(mu-1). An analytic cross-check for the
// numerical machinery; mu = 1 is the point-mass limit at k = 1.

#include "maxent/errors.hpp"

namespace maxent {

class GeometricModel {
 public:
  explicit GeometricModel(double mu);

  double mu() const noexcept { return mu_; }

  // p(X = k), k >= 1. At mu = 1: the point mass at k = 1.
  double pmf(int k) const;

  // mu ln mu - (mu-1) ln(mu-1), in nats; 0 at mu = 1.
  double entropy_closed() const;

  // -sum p_k ln p_k, truncated once the analytic tail bound drops below
  // tail_tolerance.
  double entropy_numeric(double tail_tolerance) const;

  // Numeric mean by tail-bounded summation (oracle for the mu parameter).
  double mean_numeric(double tail_tolerance) const;

  // p_max - p_min = pmf(1) - 0 = 1/mu.
  double spread() const noexcept;

 private:
  double mu_;
};

}  // namespace maxent
