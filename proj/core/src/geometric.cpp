#include "maxent/geometric.hpp"

#include <cmath>
#include <string>

namespace maxent {

GeometricModel::GeometricModel(double mu) : mu_(mu) {
  if (!std::isfinite(mu) || mu < 1.0) {
    throw ArgumentError("GeometricModel: mu must be finite and >= 1");
  }
}

double GeometricModel::pmf(int k) const {
  if (k < 1) throw ArgumentError("pmf: support is k >= 1");
  if (mu_ == 1.0) return k == 1 ? 1.0 : 0.0;
  const double log_r = std::log1p(-1.0 / mu_);  // ln((mu-1)/mu)
  return std::exp(k * log_r) / (mu_ - 1.0);
}

double GeometricModel::entropy_closed() const {
  if (mu_ == 1.0) return 0.0;
  return mu_ * std::log(mu_) - (mu_ - 1.0) * std::log(mu_ - 1.0);
}

namespace {

struct TailSums {
  // S0 = sum_{k>K} p_k, S1 = sum_{k>K} k p_k
  double s0;
  double s1;
};

TailSums tail_bounds(double c, double r, int k_done) {
  const double rpow = std::exp((k_done + 1) * std::log(r));
  const double one_minus_r = 1.0 - r;
  const double s0 = c * rpow / one_minus_r;
  const double s1 = c * rpow * ((k_done + 1) - k_done * r) / (one_minus_r * one_minus_r);
  return {s0, s1};
}

}  // namespace

double GeometricModel::entropy_numeric(double tail_tolerance) const {
  if (!(tail_tolerance > 0.0)) throw ArgumentError("entropy_numeric: tolerance must be > 0");
  if (mu_ == 1.0) return 0.0;
  const double c = 1.0 / (mu_ - 1.0);
  const double log_r = std::log1p(-1.0 / mu_);
  const double r = std::exp(log_r);
  const double abs_log_c = std::abs(std::log(c));

  double h = 0.0;
  for (int k = 1;; ++k) {
    const double p = std::exp(k * log_r) * c;
    if (p > 0.0) h -= p * std::log(p);
    // remaining tail: sum p_k (|ln c| + k |ln r|)
    const TailSums tail = tail_bounds(c, r, k);
    if (abs_log_c * tail.s0 + std::abs(log_r) * tail.s1 < tail_tolerance) break;
  }
  return h;
}

double GeometricModel::mean_numeric(double tail_tolerance) const {
  if (!(tail_tolerance > 0.0)) throw ArgumentError("mean_numeric: tolerance must be > 0");
  if (mu_ == 1.0) return 1.0;
  const double c = 1.0 / (mu_ - 1.0);
  const double log_r = std::log1p(-1.0 / mu_);
  const double r = std::exp(log_r);

  double mean = 0.0;
  for (int k = 1;; ++k) {
    mean += k * std::exp(k * log_r) * c;
    if (tail_bounds(c, r, k).s1 < tail_tolerance) break;
  }
  return mean;
}

double GeometricModel::spread() const noexcept { return 1.0 / mu_; }

}  // namespace maxent
