#pragma once

// Maximum-entropy solves in the dual: one Lagrange multiplier per kept
// constraint cell, the joint recovered in exponential-family form
// f(x) = exp(sum of multipliers at x's restricted indices) / Z.
//
// Two interchangeable strategies:
//   MULTIPLICATIVE - cyclic proportional fitting; each step rescales f to
//                    match one constraint's marginal exactly.
//   NEWTON         - damped Newton on the convex dual, the Newton system
//                    solved by conjugate gradients with Hessian-vector
//                    products formed by marginalization.

#include <cstdint>
#include <string>
#include <vector>

#include "maxent/constraints.hpp"
#include "maxent/table.hpp"

namespace maxent {

enum class Strategy { kMultiplicative, kNewton };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct SolverConfig {
  Strategy strategy = Strategy::kNewton;
  // 0 means the strategy default: 10000 cycles (multiplicative) or 200 steps
  // (newton).
  int max_iterations = 0;
  double residual_tolerance = 1e-10;
  double damping = 1.0;  // in (0,1]; halved on dual-objective increase
  std::uint64_t seed = 0;  // reserved; initialization is deterministic zero
};

struct DualVariables {
  // One block per marginal constraint, shaped like its target table.
  // Entries at cells dropped by the ReductionPlan stay zero under NEWTON.
  std::vector<std::vector<double>> blocks;
  std::vector<double> moment_multipliers;
};

struct SolveResult {
  JointTable joint;
  DualVariables dual;
  double max_residual = 0.0;
  int iterations = 0;
  double entropy = 0.0;
  bool converged = false;
  Strategy strategy = Strategy::kNewton;
  double wall_time_ms = 0.0;
  // Per-constraint max-abs violations (moment residuals appended).
  std::vector<double> constraint_residuals;
  // Dual objective after every accepted NEWTON step.
  std::vector<double> objective_trace;
  std::vector<std::string> warnings;
};

// Optimize the dual until every constraint marginal matches its target
// within config.residual_tolerance. Target cells below 1e-13 are floored
// (with renormalization and a warning) so the dual stays finite.
// Non-convergence returns converged=false with diagnostics; an inconsistent
// system throws ConsistencyError.
SolveResult solve(const ConstraintSystem& system, const ReductionPlan& plan,
                  const SolverConfig& config = {});

// Per-constraint max-abs violation of `joint` against the system's targets;
// moment residuals appended after the marginal constraints.
std::vector<double> residuals(const JointTable& joint, const ConstraintSystem& system);

// Log-partition minus the linear term: convex in the dual, gradient equal to
// the constraint residuals of the induced joint. Exponentials are max-log
// shifted and never overflow.
double dual_objective(const DualVariables& dual, const ConstraintSystem& system);

// The extended-context conditional p(target | context) of the optimized
// joint; context variables left unassigned are marginalized out.
ConditionalSlice augmented_conditional(const SolveResult& result, int target,
                                       const Assignment& context);

}  // namespace maxent
