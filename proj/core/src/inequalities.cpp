#include "maxent/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maxent {

namespace {

constexpr double kSlack = 1e-12;

struct LevelExtrema {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::size_t skipped = 0;
};

// min/max of p(target = s | context assignment) over all symbols and all
// positive-mass context assignments.
LevelExtrema level_extrema(const JointTable& joint, int target, const std::vector<int>& context) {
  LevelExtrema out;
  const int I = joint.alphabet().size();
  std::vector<int> keep = context;
  keep.push_back(target);
  const JointTable marg = joint.marginal(keep).permuted(keep);  // context digits, target fastest

  const std::size_t rows = marg.size() / static_cast<std::size_t>(I);
  for (std::size_t r = 0; r < rows; ++r) {
    double mass = 0.0;
    for (int s = 0; s < I; ++s) mass += marg.values()[r * I + s];
    if (mass <= 0.0) {
      ++out.skipped;
      continue;
    }
    for (int s = 0; s < I; ++s) {
      const double p = marg.values()[r * I + s] / mass;
      out.min = std::min(out.min, p);
      out.max = std::max(out.max, p);
    }
  }
  return out;
}

SpreadReport nested_report(const JointTable& joint, int target,
                           const std::vector<std::vector<int>>& nesting) {
  SpreadReport report;
  for (const auto& context : nesting) {
    const LevelExtrema ex = level_extrema(joint, target, context);
    report.min_by_level.push_back(ex.min);
    report.max_by_level.push_back(ex.max);
    report.skipped_contexts += ex.skipped;
  }
  for (std::size_t k = 0; k + 1 < nesting.size(); ++k) {
    const int small = static_cast<int>(k);
    const int large = static_cast<int>(k + 1);
    if (report.min_by_level[large] > report.min_by_level[small] + kSlack) {
      report.violations.push_back({small, large, "min", report.min_by_level[small],
                                   report.min_by_level[large]});
    }
    if (report.max_by_level[small] > report.max_by_level[large] + kSlack) {
      report.violations.push_back({small, large, "max", report.max_by_level[small],
                                   report.max_by_level[large]});
    }
  }
  return report;
}

}  // namespace

SpreadReport verify_pairwise_spread(const JointTable& joint) {
  const std::size_t n = joint.vars().size();
  if (n < 3) throw ArgumentError("verify_pairwise_spread: needs at least 3 variables");
  const int target = joint.vars()[n - 1];
  const int prev1 = joint.vars()[n - 2];
  const int prev2 = joint.vars()[n - 3];
  return nested_report(joint, target, {{prev1}, {prev1, prev2}});
}

SpreadReport verify_nested_spread(const JointTable& joint, int target,
                                  const std::vector<std::vector<int>>& nesting) {
  if (!joint.has_var(target)) throw UnknownVariableError("verify_nested_spread: unknown target");
  for (const auto& context : nesting) {
    for (int v : context) {
      if (v == target) throw ArgumentError("verify_nested_spread: target inside a context set");
      if (!joint.has_var(v)) throw UnknownVariableError("verify_nested_spread: unknown variable");
    }
  }
  for (std::size_t k = 0; k + 1 < nesting.size(); ++k) {
    const auto& small = nesting[k];
    const auto& large = nesting[k + 1];
    if (small.size() >= large.size()) {
      throw ArgumentError("verify_nested_spread: contexts must strictly grow");
    }
    for (int v : small) {
      if (std::find(large.begin(), large.end(), v) == large.end()) {
        throw ArgumentError("verify_nested_spread: contexts must be nested by inclusion");
      }
    }
  }
  return nested_report(joint, target, nesting);
}

EntropyChainReport verify_entropy_chain(const JointTable& joint, int target) {
  const int tpos = joint.var_position(target);
  EntropyChainReport report;
  std::vector<int> context;
  for (int k = 0;; ++k) {
    report.entropy_by_context.push_back(joint.conditional_entropy(target, context));
    if (tpos - 1 - k < 0) break;
    context.push_back(joint.vars()[static_cast<std::size_t>(tpos - 1 - k)]);
  }
  for (std::size_t k = 0; k + 1 < report.entropy_by_context.size(); ++k) {
    if (report.entropy_by_context[k + 1] > report.entropy_by_context[k] + kSlack) {
      report.violations.push_back({static_cast<int>(k + 1), report.entropy_by_context[k + 1],
                                   report.entropy_by_context[k]});
    }
  }
  return report;
}

}  // namespace maxent
