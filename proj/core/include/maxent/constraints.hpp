#pragma once

// Constraint systems for maximum-entropy joint reconstruction: the MEP[T]
// three-block layout, the all-pairs GMEP layout, the symmetric SMEP layout
// over tokens -T..T, and free-form CUSTOM systems. Includes overlap
// consistency checking and the recursive corner-cell redundancy elimination
// that makes the dual Newton system full-rank.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "maxent/table.hpp"

namespace maxent {

enum class MethodTag { kMepT, kGmep, kSmep, kCustom };

std::string to_string(MethodTag tag);
MethodTag method_tag_from_string(const std::string& name);

// One block constraint: the marginal of the optimized joint over `vars` must
// equal `target` cell-by-cell.
class MarginalConstraint {
 public:
  MarginalConstraint(std::vector<int> vars, JointTable target);

  const std::vector<int>& vars() const noexcept { return vars_; }
  const JointTable& target() const noexcept { return target_; }
  std::size_t cell_count() const noexcept { return target_.size(); }

 private:
  std::vector<int> vars_;
  JointTable target_;
};

// Scalar linear constraint sum_x f(x) c(x) = target, where c depends only on
// `vars`. Only CUSTOM systems may carry these (e.g. a first-moment table for
// a mean constraint).
struct MomentConstraint {
  std::vector<int> vars;
  std::vector<double> coefficients;  // length I^|vars|, row-major in vars order
  double target = 0.0;
};

class ConstraintSystem {
 public:
  ConstraintSystem(std::vector<int> full_vars, Alphabet alphabet,
                   std::vector<MarginalConstraint> constraints, MethodTag method_tag,
                   std::vector<MomentConstraint> moments = {});

  const std::vector<int>& full_vars() const noexcept { return full_vars_; }
  Alphabet alphabet() const noexcept { return alphabet_; }
  const std::vector<MarginalConstraint>& constraints() const noexcept { return constraints_; }
  const std::vector<MomentConstraint>& moments() const noexcept { return moments_; }
  MethodTag method_tag() const noexcept { return method_tag_; }

  // T for the named methods (from |full_vars|); 0 for CUSTOM.
  int horizon() const noexcept { return horizon_; }

  std::size_t outcome_count() const noexcept;
  // Total constraint cells before redundancy elimination (the pre-reduction
  // dual dimension).
  std::size_t dual_dimension() const noexcept;

 private:
  std::vector<int> full_vars_;
  Alphabet alphabet_;
  std::vector<MarginalConstraint> constraints_;
  std::vector<MomentConstraint> moments_;
  MethodTag method_tag_;
  int horizon_ = 0;
};

// Group variable layout of MEP[T]: g1 = (2..T+1), g2 = (T+2..2T+1), full
// vars (1..2T+1). The three inputs must cover {1}+g1, {1}+g2 and {2}+g2.
ConstraintSystem build_mep_t(int T, const MarginalConstraint& p_1g1,
                             const MarginalConstraint& p_1g2, const MarginalConstraint& p_2g2);

// All pair marginals {t,t'} with 1 <= t < t' <= T over full vars (1..T);
// exactly T(T-1)/2 of them.
ConstraintSystem build_gmep(int T, std::vector<MarginalConstraint> pairs);

// The 2T+2 constraints of the symmetric layout over vars (-T..T): p(-g,1..T)
// for g=1..T, p(0,1..T), p(0,-1..-T), p(+g,-1..-T) for g=1..T.
ConstraintSystem build_smep(int T, std::vector<MarginalConstraint> marginals);

// p(target, ctx) = p(target | ctx) * p(ctx). rows_by_context is indexed by
// the context marginal's flat layout; each row has alphabet-size entries.
// Result variables are the context variables followed by target_var.
JointTable joint_from_conditional(const JointTable& context_marginal, int target_var,
                                  const std::vector<std::vector<double>>& rows_by_context);

struct ConsistencyIssue {
  enum class Kind { kNotNormalized, kOverlapMismatch };
  Kind kind;
  int constraint_a = -1;
  int constraint_b = -1;           // kOverlapMismatch only
  std::vector<int> shared_vars;    // kOverlapMismatch only
  double magnitude = 0.0;          // |mass-1| or max-abs marginal disagreement
};

struct ConsistencyReport {
  std::vector<ConsistencyIssue> issues;
  bool consistent() const noexcept { return issues.empty(); }
  std::string summary() const;
};

// Flags every constraint whose target does not sum to 1 within 1e-9 and
// every pair of overlapping constraints whose shared sub-marginals disagree
// beyond 1e-9.
ConsistencyReport check_consistency(const ConstraintSystem& system);

enum class EliminationMode {
  kRowBased,     // corner symbol = last alphabet index
  kColumnBased,  // mirrored corner at index 0
};

struct ReductionPlan {
  struct KeptCell {
    int constraint;
    std::size_t cell;
  };
  struct DroppedCell {
    int constraint;
    std::size_t cell;
    // Interior-index pattern classifying the cell and the constraint that
    // owns that pattern; the dropped value is recovered from the owner's
    // shared marginal plus this constraint's kept cells, recursively.
    std::vector<int> pattern_vars;
    int pattern_owner;
  };
  EliminationMode mode = EliminationMode::kRowBased;
  std::vector<KeptCell> kept;
  std::vector<DroppedCell> dropped;
};

// Drops, per constraint, every cell whose interior-index pattern is owned by
// an earlier constraint. The kept rows are linearly independent and span the
// full constraint row space; both are rank-verified internally whenever the
// outcome space has at most 4096 points. Requires a consistent system.
ReductionPlan reduce_redundancy(const ConstraintSystem& system,
                                EliminationMode mode = EliminationMode::kRowBased);

}  // namespace maxent
