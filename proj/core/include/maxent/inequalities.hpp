#pragma once

// Term-by-term verification of the conditioning inequalities: growing the
// conditioning set widens the [min, max] range of conditional probabilities
// and lowers conditional entropy. Checks are exhaustive enumerations over
// all symbol assignments; zero-mass conditioning contexts are skipped and
// counted, not failed.

#include <string>
#include <vector>

#include "maxent/table.hpp"

namespace maxent {

struct SpreadViolation {
  int level_small = 0;  // index into the nesting (smaller context)
  int level_large = 0;
  std::string side;  // "min" or "max"
  double small_value = 0.0;
  double large_value = 0.0;
};

struct SpreadReport {
  // extrema of p(target | context) per nesting level
  std::vector<double> min_by_level;
  std::vector<double> max_by_level;
  std::vector<SpreadViolation> violations;
  std::size_t skipped_contexts = 0;
  bool passed() const noexcept { return violations.empty(); }
};

// The four-term chain for the last variable conditioned on its predecessor
// versus its two predecessors:
//   min p(t|c1,c2) <= min p(t|c1) <= max p(t|c1) <= max p(t|c1,c2).
// Requires at least 3 variables.
SpreadReport verify_pairwise_spread(const JointTable& joint);

// For consecutive context sets G strictly inside G', asserts
// min over (target,G') conditionals <= min over (target,G), max reversed,
// within 1e-12.
SpreadReport verify_nested_spread(const JointTable& joint, int target,
                                  const std::vector<std::vector<int>>& nesting);

struct EntropyChainViolation {
  int context_size = 0;  // H with this many predecessors exceeded the smaller context
  double larger_context_entropy = 0.0;
  double smaller_context_entropy = 0.0;
};

struct EntropyChainReport {
  // H(target), H(target | 1 predecessor), H(target | 2 predecessors), ...
  std::vector<double> entropy_by_context;
  std::vector<EntropyChainViolation> violations;
  bool passed() const noexcept { return violations.empty(); }
};

// Monotone chain of conditional entropies of `target` over its growing set
// of preceding variables, slack 1e-12.
EntropyChainReport verify_entropy_chain(const JointTable& joint, int target);

}  // namespace maxent
