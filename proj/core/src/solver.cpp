#include "maxent/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace maxent {

namespace {

constexpr double kTargetFloor = 1e-13;

// Tracks the flat cell index of one constraint while sweeping outcomes.
struct CellTracker {
  std::vector<std::size_t> contrib;  // per full-variable position; 0 if absent
  std::size_t current = 0;
};

CellTracker make_tracker(const std::vector<int>& full_vars, const std::vector<int>& vars, int I) {
  CellTracker t;
  t.contrib.assign(full_vars.size(), 0);
  std::size_t stride = 1;
  for (std::size_t j = vars.size(); j-- > 0;) {
    const auto it = std::find(full_vars.begin(), full_vars.end(), vars[j]);
    t.contrib[static_cast<std::size_t>(it - full_vars.begin())] = stride;
    stride *= static_cast<std::size_t>(I);
  }
  return t;
}

// Calls fn(flat) for every outcome, keeping every tracker's cell index
// current via incremental odometer updates.
template <typename Fn>
void sweep(std::size_t n_vars, int I, std::vector<CellTracker>& trackers, Fn&& fn) {
  std::vector<int> digits(n_vars, 0);
  for (auto& t : trackers) t.current = 0;
  std::size_t flat = 0;
  for (;;) {
    fn(flat);
    ++flat;
    int pos = static_cast<int>(n_vars) - 1;
    for (; pos >= 0; --pos) {
      if (++digits[static_cast<std::size_t>(pos)] < I) {
        for (auto& t : trackers) t.current += t.contrib[static_cast<std::size_t>(pos)];
        break;
      }
      digits[static_cast<std::size_t>(pos)] = 0;
      for (auto& t : trackers) {
        t.current -= t.contrib[static_cast<std::size_t>(pos)] * static_cast<std::size_t>(I - 1);
      }
    }
    if (pos < 0) return;
  }
}

struct Workspace {
  const ConstraintSystem* system = nullptr;
  std::size_t n_vars = 0;
  int I = 0;
  std::size_t total = 0;
  std::vector<CellTracker> ctrack;  // marginal constraints
  std::vector<CellTracker> mtrack;  // moment constraints
  std::vector<std::vector<double>> targets;  // floored copies
  std::vector<double> moment_targets;
  std::vector<std::string> warnings;
};

Workspace make_workspace(const ConstraintSystem& system, bool floor_targets) {
  Workspace w;
  w.system = &system;
  w.n_vars = system.full_vars().size();
  w.I = system.alphabet().size();
  w.total = system.outcome_count();
  for (const auto& c : system.constraints()) {
    w.ctrack.push_back(make_tracker(system.full_vars(), c.vars(), w.I));
    std::vector<double> tgt = c.target().values();
    if (floor_targets) {
      std::size_t floored = 0;
      for (double& v : tgt) {
        if (v < kTargetFloor) {
          v = kTargetFloor;
          ++floored;
        }
      }
      if (floored > 0) {
        const double mass = std::accumulate(tgt.begin(), tgt.end(), 0.0);
        for (double& v : tgt) v /= mass;
        w.warnings.push_back("constraint " + std::to_string(w.targets.size()) + ": floored " +
                             std::to_string(floored) + " target cells below 1e-13");
      }
    }
    w.targets.push_back(std::move(tgt));
  }
  for (const auto& m : system.moments()) {
    w.mtrack.push_back(make_tracker(system.full_vars(), m.vars, w.I));
    w.moment_targets.push_back(m.target);
  }
  return w;
}

// e(x) = sum of multipliers at x's restricted indices.
std::vector<double> exponent_field(Workspace& w, const std::vector<std::vector<double>>& blocks,
                                   const std::vector<double>& moment_mults) {
  std::vector<double> e(w.total, 0.0);
  const auto& moments = w.system->moments();
  sweep(w.n_vars, w.I, w.ctrack, [&](std::size_t flat) {
    double acc = 0.0;
    for (std::size_t c = 0; c < blocks.size(); ++c) acc += blocks[c][w.ctrack[c].current];
    e[flat] = acc;
  });
  if (!moments.empty()) {
    sweep(w.n_vars, w.I, w.mtrack, [&](std::size_t flat) {
      double acc = 0.0;
      for (std::size_t m = 0; m < moments.size(); ++m) {
        acc += moment_mults[m] * moments[m].coefficients[w.mtrack[m].current];
      }
      e[flat] += acc;
    });
  }
  return e;
}

double log_partition(const std::vector<double>& e) {
  const double shift = *std::max_element(e.begin(), e.end());
  double z = 0.0;
  for (double v : e) z += std::exp(v - shift);
  return shift + std::log(z);
}

// f = exp(e - logZ), written in place over e.
void densify(std::vector<double>& e) {
  const double lz = log_partition(e);
  for (double& v : e) v = std::exp(v - lz);
}

// Marginals of a full table onto every constraint (and moment expectations).
void accumulate_marginals(Workspace& w, const std::vector<double>& f,
                          std::vector<std::vector<double>>& margs, std::vector<double>* moments,
                          std::vector<double>* moment_sq = nullptr) {
  margs.resize(w.ctrack.size());
  for (std::size_t c = 0; c < w.ctrack.size(); ++c) {
    margs[c].assign(w.targets[c].size(), 0.0);
  }
  sweep(w.n_vars, w.I, w.ctrack, [&](std::size_t flat) {
    for (std::size_t c = 0; c < margs.size(); ++c) margs[c][w.ctrack[c].current] += f[flat];
  });
  if (moments != nullptr && !w.mtrack.empty()) {
    const auto& ms = w.system->moments();
    moments->assign(ms.size(), 0.0);
    if (moment_sq != nullptr) moment_sq->assign(ms.size(), 0.0);
    sweep(w.n_vars, w.I, w.mtrack, [&](std::size_t flat) {
      for (std::size_t m = 0; m < ms.size(); ++m) {
        const double coeff = ms[m].coefficients[w.mtrack[m].current];
        (*moments)[m] += f[flat] * coeff;
        if (moment_sq != nullptr) (*moment_sq)[m] += f[flat] * coeff * coeff;
      }
    });
  } else if (moments != nullptr) {
    moments->clear();
    if (moment_sq != nullptr) moment_sq->clear();
  }
}

// Per-constraint max-abs violations, moments appended; returns overall max.
double residual_list(const Workspace& w, const std::vector<std::vector<double>>& margs,
                     const std::vector<double>& moments, std::vector<double>& out) {
  out.clear();
  double worst = 0.0;
  for (std::size_t c = 0; c < margs.size(); ++c) {
    double r = 0.0;
    for (std::size_t i = 0; i < margs[c].size(); ++i) {
      r = std::max(r, std::abs(margs[c][i] - w.targets[c][i]));
    }
    out.push_back(r);
    worst = std::max(worst, r);
  }
  for (std::size_t m = 0; m < moments.size(); ++m) {
    const double r = std::abs(moments[m] - w.moment_targets[m]);
    out.push_back(r);
    worst = std::max(worst, r);
  }
  return worst;
}

double objective_value(Workspace& w, const std::vector<std::vector<double>>& blocks,
                       const std::vector<double>& moment_mults) {
  const std::vector<double> e = exponent_field(w, blocks, moment_mults);
  double linear = 0.0;
  for (std::size_t c = 0; c < blocks.size(); ++c) {
    for (std::size_t i = 0; i < blocks[c].size(); ++i) linear += blocks[c][i] * w.targets[c][i];
  }
  for (std::size_t m = 0; m < moment_mults.size(); ++m) {
    linear += moment_mults[m] * w.moment_targets[m];
  }
  return log_partition(e) - linear;
}

struct NewtonRows {
  // kept marginal-constraint cells first, then one row per moment constraint
  std::vector<ReductionPlan::KeptCell> kept;
  std::size_t dim() const noexcept { return kept.size() + n_moments; }
  std::size_t n_moments = 0;
};

// Hessian-vector product: Cov_f(rows) * v.
std::vector<double> hessian_vec(Workspace& w, const NewtonRows& rows,
                                const std::vector<double>& f,
                                const std::vector<std::vector<double>>& margs,
                                const std::vector<double>& moments,
                                const std::vector<double>& v) {
  // u(x) = sum_r v_r row_r(x)
  std::vector<std::vector<double>> vblocks(w.targets.size());
  for (std::size_t c = 0; c < w.targets.size(); ++c) vblocks[c].assign(w.targets[c].size(), 0.0);
  std::vector<double> vmoments(rows.n_moments, 0.0);
  for (std::size_t r = 0; r < rows.kept.size(); ++r) {
    vblocks[static_cast<std::size_t>(rows.kept[r].constraint)][rows.kept[r].cell] = v[r];
  }
  for (std::size_t m = 0; m < rows.n_moments; ++m) vmoments[m] = v[rows.kept.size() + m];

  std::vector<double> u = exponent_field(w, vblocks, vmoments);
  double eu = 0.0;
  std::vector<double> fu(w.total);
  for (std::size_t i = 0; i < w.total; ++i) {
    fu[i] = f[i] * u[i];
    eu += fu[i];
  }

  std::vector<std::vector<double>> wmargs;
  std::vector<double> wmoments;
  accumulate_marginals(w, fu, wmargs, &wmoments);

  std::vector<double> out(rows.dim());
  for (std::size_t r = 0; r < rows.kept.size(); ++r) {
    const auto& kc = rows.kept[r];
    const auto c = static_cast<std::size_t>(kc.constraint);
    out[r] = wmargs[c][kc.cell] - margs[c][kc.cell] * eu;
  }
  for (std::size_t m = 0; m < rows.n_moments; ++m) {
    out[rows.kept.size() + m] = wmoments[m] - moments[m] * eu;
  }
  return out;
}

// Conjugate gradients on (H + ridge I) d = b. H is PSD with at most one flat
// direction (the kept rows span the constant function); the gradient of a
// consistent system is orthogonal to it, so CG is well behaved.
std::vector<double> cg_solve(Workspace& w, const NewtonRows& rows, const std::vector<double>& f,
                             const std::vector<std::vector<double>>& margs,
                             const std::vector<double>& moments, const std::vector<double>& b,
                             double ridge) {
  const std::size_t dim = b.size();
  std::vector<double> x(dim, 0.0), r = b, p = b;
  double rs = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
  const double stop = std::max(1e-28, 1e-24 * rs);
  const std::size_t max_cg = dim + 30;
  for (std::size_t it = 0; it < max_cg && rs > stop; ++it) {
    std::vector<double> ap = hessian_vec(w, rows, f, margs, moments, p);
    for (std::size_t i = 0; i < dim; ++i) ap[i] += ridge * p[i];
    const double pap = std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
    if (pap <= 0.0) break;
    const double alpha = rs / pap;
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rs_next = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    const double beta = rs_next / rs;
    rs = rs_next;
    for (std::size_t i = 0; i < dim; ++i) p[i] = r[i] + beta * p[i];
  }
  return x;
}

SolveResult finish(Workspace& w, std::vector<double> f, DualVariables dual, double max_res,
                   int iterations, bool converged, Strategy strategy,
                   std::vector<double> resid_list, std::vector<double> trace) {
  JointTable joint =
      JointTable(w.system->full_vars(), w.system->alphabet(), std::move(f)).normalized();
  const double h = joint.entropy();
  return SolveResult{std::move(joint),
                     std::move(dual),
                     max_res,
                     iterations,
                     h,
                     converged,
                     strategy,
                     0.0,
                     std::move(resid_list),
                     std::move(trace),
                     w.warnings};
}

SolveResult solve_newton(Workspace& w, const ReductionPlan& plan, const SolverConfig& config) {
  const int max_iters = config.max_iterations > 0 ? config.max_iterations : 200;
  NewtonRows rows{plan.kept, w.system->moments().size()};

  DualVariables dual;
  dual.blocks.resize(w.targets.size());
  for (std::size_t c = 0; c < w.targets.size(); ++c) dual.blocks[c].assign(w.targets[c].size(), 0.0);
  dual.moment_multipliers.assign(rows.n_moments, 0.0);

  std::vector<double> trace;
  std::vector<double> resid;
  double max_res = 0.0;
  int iter = 0;
  bool converged = false;
  std::vector<double> f;

  for (;;) {
    f = exponent_field(w, dual.blocks, dual.moment_multipliers);
    densify(f);
    std::vector<std::vector<double>> margs;
    std::vector<double> moments, moment_sq;
    accumulate_marginals(w, f, margs, &moments, &moment_sq);
    max_res = residual_list(w, margs, moments, resid);
    if (max_res <= config.residual_tolerance) {
      converged = true;
      break;
    }
    if (iter >= max_iters) break;
    ++iter;

    if (rows.dim() == 0) break;  // nothing to optimize

    std::vector<double> g(rows.dim());
    double trace_h = 0.0;
    for (std::size_t r = 0; r < rows.kept.size(); ++r) {
      const auto& kc = rows.kept[r];
      const auto c = static_cast<std::size_t>(kc.constraint);
      const double m = margs[c][kc.cell];
      g[r] = m - w.targets[c][kc.cell];
      trace_h += m * (1.0 - m);
    }
    for (std::size_t m = 0; m < rows.n_moments; ++m) {
      g[rows.kept.size() + m] = moments[m] - w.moment_targets[m];
      trace_h += moment_sq[m] - moments[m] * moments[m];
    }
    const double ridge = 1e-12 * (1.0 + trace_h / static_cast<double>(rows.dim()));

    std::vector<double> b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) b[i] = -g[i];
    const std::vector<double> d = cg_solve(w, rows, f, margs, moments, b, ridge);

    const double psi0 = objective_value(w, dual.blocks, dual.moment_multipliers);
    double alpha = config.damping;
    DualVariables trial = dual;
    double psi = 0.0;
    for (int halvings = 0;; ++halvings) {
      trial = dual;
      for (std::size_t r = 0; r < rows.kept.size(); ++r) {
        const auto& kc = rows.kept[r];
        trial.blocks[static_cast<std::size_t>(kc.constraint)][kc.cell] += alpha * d[r];
      }
      for (std::size_t m = 0; m < rows.n_moments; ++m) {
        trial.moment_multipliers[m] += alpha * d[rows.kept.size() + m];
      }
      psi = objective_value(w, trial.blocks, trial.moment_multipliers);
      if (psi <= psi0 || halvings >= 30) break;
      alpha *= 0.5;
    }
    dual = std::move(trial);
    trace.push_back(psi);
  }

  return finish(w, std::move(f), std::move(dual), max_res, iter, converged, Strategy::kNewton,
                std::move(resid), std::move(trace));
}

SolveResult solve_multiplicative(Workspace& w, const SolverConfig& config) {
  const int max_iters = config.max_iterations > 0 ? config.max_iterations : 10000;
  const auto& moments_def = w.system->moments();

  std::vector<double> f(w.total, 1.0 / static_cast<double>(w.total));
  DualVariables dual;
  dual.blocks.resize(w.targets.size());
  for (std::size_t c = 0; c < w.targets.size(); ++c) dual.blocks[c].assign(w.targets[c].size(), 0.0);
  dual.moment_multipliers.assign(moments_def.size(), 0.0);

  std::vector<double> resid;
  double max_res = 0.0;
  int cycle = 0;
  bool converged = false;

  for (;;) {
    std::vector<std::vector<double>> margs;
    std::vector<double> moments;
    accumulate_marginals(w, f, margs, &moments);
    max_res = residual_list(w, margs, moments, resid);
    if (max_res <= config.residual_tolerance) {
      converged = true;
      break;
    }
    if (cycle >= max_iters) break;
    ++cycle;

    for (std::size_t c = 0; c < w.targets.size(); ++c) {
      std::vector<double> marg(w.targets[c].size(), 0.0);
      std::vector<CellTracker> one{w.ctrack[c]};
      sweep(w.n_vars, w.I, one, [&](std::size_t flat) { marg[one[0].current] += f[flat]; });
      std::vector<double> ratio(marg.size(), 1.0);
      for (std::size_t i = 0; i < marg.size(); ++i) {
        if (marg[i] > 0.0) {
          ratio[i] = w.targets[c][i] / marg[i];
          dual.blocks[c][i] += std::log(ratio[i]);
        }
      }
      sweep(w.n_vars, w.I, one, [&](std::size_t flat) { f[flat] *= ratio[one[0].current]; });
    }

    for (std::size_t m = 0; m < moments_def.size(); ++m) {
      // exact 1-D dual coordinate step: match E[c] by scalar Newton
      std::vector<double> coeff(w.total);
      std::vector<CellTracker> one{w.mtrack[m]};
      sweep(w.n_vars, w.I, one,
            [&](std::size_t flat) { coeff[flat] = moments_def[m].coefficients[one[0].current]; });
      double delta = 0.0;
      for (int it = 0; it < 60; ++it) {
        double z = 0.0, e1 = 0.0, e2 = 0.0;
        const double shift = delta >= 0
                                 ? delta * *std::max_element(coeff.begin(), coeff.end())
                                 : delta * *std::min_element(coeff.begin(), coeff.end());
        for (std::size_t i = 0; i < w.total; ++i) {
          const double g = f[i] * std::exp(delta * coeff[i] - shift);
          z += g;
          e1 += g * coeff[i];
          e2 += g * coeff[i] * coeff[i];
        }
        const double mean = e1 / z;
        const double var = std::max(e2 / z - mean * mean, 1e-300);
        const double r = mean - w.moment_targets[m];
        if (std::abs(r) <= 1e-14 * std::max(1.0, std::abs(w.moment_targets[m]))) break;
        delta -= r / var;
      }
      double z = 0.0;
      const double shift = delta >= 0 ? delta * *std::max_element(coeff.begin(), coeff.end())
                                      : delta * *std::min_element(coeff.begin(), coeff.end());
      for (std::size_t i = 0; i < w.total; ++i) {
        f[i] *= std::exp(delta * coeff[i] - shift);
        z += f[i];
      }
      for (double& v : f) v /= z;
      dual.moment_multipliers[m] += delta;
    }

    // guard against slow normalization drift
    const double mass = std::accumulate(f.begin(), f.end(), 0.0);
    for (double& v : f) v /= mass;
  }

  return finish(w, std::move(f), std::move(dual), max_res, cycle, converged,
                Strategy::kMultiplicative, std::move(resid), {});
}

}  // namespace

std::string to_string(Strategy s) {
  return s == Strategy::kMultiplicative ? "multiplicative" : "newton";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "multiplicative") return Strategy::kMultiplicative;
  if (name == "newton") return Strategy::kNewton;
  throw ArgumentError("unknown strategy: " + name);
}

SolveResult solve(const ConstraintSystem& system, const ReductionPlan& plan,
                  const SolverConfig& config) {
  if (config.residual_tolerance <= 0.0) throw ArgumentError("solve: tolerance must be > 0");
  if (config.damping <= 0.0 || config.damping > 1.0) {
    throw ArgumentError("solve: damping must be in (0, 1]");
  }
  if (config.max_iterations < 0) throw ArgumentError("solve: max_iterations must be >= 1");

  const ConsistencyReport report = check_consistency(system);
  if (!report.consistent()) throw ConsistencyError("solve: " + report.summary());

  Workspace w = make_workspace(system, /*floor_targets=*/true);

  const auto start = std::chrono::steady_clock::now();
  SolveResult result = config.strategy == Strategy::kNewton ? solve_newton(w, plan, config)
                                                            : solve_multiplicative(w, config);
  const auto stop = std::chrono::steady_clock::now();
  result.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return result;
}

std::vector<double> residuals(const JointTable& joint, const ConstraintSystem& system) {
  {
    std::vector<int> a = joint.vars(), b = system.full_vars();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw ShapeError("residuals: joint variables do not match the system");
  }
  std::vector<double> out;
  for (const auto& c : system.constraints()) {
    const JointTable marg = joint.marginal(c.vars()).permuted(c.vars());
    double r = 0.0;
    for (std::size_t i = 0; i < marg.size(); ++i) {
      r = std::max(r, std::abs(marg.values()[i] - c.target().values()[i]));
    }
    out.push_back(r);
  }
  if (!system.moments().empty()) {
    Workspace w = make_workspace(system, /*floor_targets=*/false);
    const JointTable aligned =
        joint.vars() == system.full_vars() ? joint : joint.permuted(system.full_vars());
    std::vector<std::vector<double>> margs;
    std::vector<double> moments;
    accumulate_marginals(w, aligned.values(), margs, &moments);
    for (std::size_t m = 0; m < moments.size(); ++m) {
      out.push_back(std::abs(moments[m] - system.moments()[m].target));
    }
  }
  return out;
}

double dual_objective(const DualVariables& dual, const ConstraintSystem& system) {
  if (dual.blocks.size() != system.constraints().size()) {
    throw ShapeError("dual_objective: one block per constraint required");
  }
  for (std::size_t c = 0; c < dual.blocks.size(); ++c) {
    if (dual.blocks[c].size() != system.constraints()[c].cell_count()) {
      throw ShapeError("dual_objective: block shape mismatch at constraint " + std::to_string(c));
    }
  }
  if (dual.moment_multipliers.size() != system.moments().size()) {
    throw ShapeError("dual_objective: one multiplier per moment constraint required");
  }
  Workspace w = make_workspace(system, /*floor_targets=*/false);
  // keep the caller's targets: the linear term uses the unfloored tables
  return objective_value(w, dual.blocks, dual.moment_multipliers);
}

ConditionalSlice augmented_conditional(const SolveResult& result, int target,
                                       const Assignment& context) {
  return result.joint.condition(target, context);
}

}  // namespace maxent
