#include "maxent/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace maxent {

namespace {

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::string var_list(const std::vector<int>& vars) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < vars.size(); ++i) os << (i ? "," : "") << vars[i];
  os << ")";
  return os.str();
}

// Reorder a constraint's target to the canonical variable order `order`.
MarginalConstraint canonicalized(const MarginalConstraint& c, const std::vector<int>& order) {
  if (c.vars() == order) return c;
  return MarginalConstraint(order, c.target().permuted(order));
}

}  // namespace

std::string to_string(MethodTag tag) {
  switch (tag) {
    case MethodTag::kMepT: return "mep_t";
    case MethodTag::kGmep: return "gmep";
    case MethodTag::kSmep: return "smep";
    case MethodTag::kCustom: return "custom";
  }
  return "custom";
}

MethodTag method_tag_from_string(const std::string& name) {
  if (name == "mep_t") return MethodTag::kMepT;
  if (name == "gmep") return MethodTag::kGmep;
  if (name == "smep") return MethodTag::kSmep;
  if (name == "custom") return MethodTag::kCustom;
  throw ArgumentError("unknown method tag: " + name);
}

MarginalConstraint::MarginalConstraint(std::vector<int> vars, JointTable target)
    : vars_(std::move(vars)), target_(std::move(target)) {
  if (target_.vars() != vars_) {
    throw ShapeError("MarginalConstraint: target variables " + var_list(target_.vars()) +
                     " do not match " + var_list(vars_));
  }
  if (!target_.is_normalized()) {
    throw ArgumentError("MarginalConstraint: target must be normalized");
  }
}

ConstraintSystem::ConstraintSystem(std::vector<int> full_vars, Alphabet alphabet,
                                   std::vector<MarginalConstraint> constraints,
                                   MethodTag method_tag, std::vector<MomentConstraint> moments)
    : full_vars_(std::move(full_vars)),
      alphabet_(alphabet),
      constraints_(std::move(constraints)),
      moments_(std::move(moments)),
      method_tag_(method_tag) {
  if (full_vars_.empty()) throw ArgumentError("ConstraintSystem: empty variable set");
  std::set<int> seen(full_vars_.begin(), full_vars_.end());
  if (seen.size() != full_vars_.size()) {
    throw ArgumentError("ConstraintSystem: duplicate variable labels");
  }
  for (const auto& c : constraints_) {
    if (c.target().alphabet() != alphabet_) {
      throw ShapeError("ConstraintSystem: constraint alphabet mismatch");
    }
    for (int v : c.vars()) {
      if (!seen.contains(v)) {
        throw ShapeError("ConstraintSystem: constraint variable " + std::to_string(v) +
                         " outside full variable set");
      }
    }
  }
  for (const auto& m : moments_) {
    if (method_tag_ != MethodTag::kCustom) {
      throw ArgumentError("ConstraintSystem: moment constraints are CUSTOM-only");
    }
    for (int v : m.vars) {
      if (!seen.contains(v)) throw ShapeError("ConstraintSystem: moment variable outside set");
    }
    if (m.coefficients.size() != detail::pow_size(alphabet_.size(), m.vars.size())) {
      throw ShapeError("ConstraintSystem: moment coefficient table has wrong size");
    }
  }

  const int n = static_cast<int>(full_vars_.size());
  switch (method_tag_) {
    case MethodTag::kMepT: {
      if (n < 3 || n % 2 == 0) throw ShapeError("MEP[T]: needs 2T+1 variables");
      horizon_ = (n - 1) / 2;
      if (constraints_.size() != 3) throw ShapeError("MEP[T]: exactly 3 constraints required");
      break;
    }
    case MethodTag::kGmep: {
      horizon_ = n;
      const std::size_t want = static_cast<std::size_t>(n) * (n - 1) / 2;
      if (constraints_.size() != want) {
        throw ShapeError("GMEP: expected T(T-1)/2 = " + std::to_string(want) + " constraints");
      }
      break;
    }
    case MethodTag::kSmep: {
      if (n < 3 || n % 2 == 0) throw ShapeError("SMEP: needs 2T+1 variables");
      horizon_ = (n - 1) / 2;
      if (constraints_.size() != static_cast<std::size_t>(2 * horizon_ + 2)) {
        throw ShapeError("SMEP: expected 2T+2 constraints");
      }
      break;
    }
    case MethodTag::kCustom:
      horizon_ = 0;
      break;
  }
}

std::size_t ConstraintSystem::outcome_count() const noexcept {
  return detail::pow_size(alphabet_.size(), full_vars_.size());
}

std::size_t ConstraintSystem::dual_dimension() const noexcept {
  std::size_t total = 0;
  for (const auto& c : constraints_) total += c.cell_count();
  return total;
}

ConstraintSystem build_mep_t(int T, const MarginalConstraint& p_1g1,
                             const MarginalConstraint& p_1g2, const MarginalConstraint& p_2g2) {
  if (T < 1) throw ArgumentError("build_mep_t: T must be >= 1");

  std::vector<int> full_vars;
  for (int v = 1; v <= 2 * T + 1; ++v) full_vars.push_back(v);

  std::vector<int> v_1g1{1};                                   // {1} + g1
  for (int v = 2; v <= T + 1; ++v) v_1g1.push_back(v);
  std::vector<int> v_1g2{1};                                   // {1} + g2
  for (int v = T + 2; v <= 2 * T + 1; ++v) v_1g2.push_back(v);
  std::vector<int> v_2g2{2};                                   // {2} + g2
  for (int v = T + 2; v <= 2 * T + 1; ++v) v_2g2.push_back(v);

  auto check = [](const MarginalConstraint& c, const std::vector<int>& want, const char* name) {
    if (sorted(c.vars()) != want) {
      throw ShapeError(std::string("build_mep_t: ") + name + " must cover variables " +
                       var_list(want) + ", got " + var_list(c.vars()));
    }
  };
  check(p_1g1, v_1g1, "p(1,g1)");
  check(p_1g2, v_1g2, "p(1,g2)");
  check(p_2g2, v_2g2, "p(2,g2)");

  const Alphabet a = p_1g1.target().alphabet();
  std::vector<MarginalConstraint> cs;
  cs.push_back(canonicalized(p_2g2, v_2g2));
  cs.push_back(canonicalized(p_1g1, v_1g1));
  cs.push_back(canonicalized(p_1g2, v_1g2));
  return ConstraintSystem(std::move(full_vars), a, std::move(cs), MethodTag::kMepT);
}

ConstraintSystem build_gmep(int T, std::vector<MarginalConstraint> pairs) {
  if (T < 2) throw ArgumentError("build_gmep: T must be >= 2");
  std::vector<int> full_vars;
  for (int v = 1; v <= T; ++v) full_vars.push_back(v);

  std::map<std::pair<int, int>, const MarginalConstraint*> by_pair;
  for (const auto& c : pairs) {
    if (c.vars().size() != 2) {
      throw PairCoverageError("build_gmep: constraint " + var_list(c.vars()) + " is not a pair");
    }
    const auto s = sorted(c.vars());
    if (s[0] < 1 || s[1] > T) {
      throw PairCoverageError("build_gmep: pair " + var_list(s) + " outside 1.." + std::to_string(T));
    }
    if (!by_pair.emplace(std::make_pair(s[0], s[1]), &c).second) {
      throw PairCoverageError("build_gmep: duplicated pair " + var_list(s));
    }
  }
  const std::size_t want = static_cast<std::size_t>(T) * (T - 1) / 2;
  if (by_pair.size() != want) {
    throw PairCoverageError("build_gmep: expected " + std::to_string(want) + " pairs, got " +
                            std::to_string(by_pair.size()));
  }

  const Alphabet a = pairs.front().target().alphabet();
  std::vector<MarginalConstraint> cs;
  cs.reserve(want);
  for (int t = 1; t <= T; ++t) {
    for (int u = t + 1; u <= T; ++u) {
      cs.push_back(canonicalized(*by_pair.at({t, u}), std::vector<int>{t, u}));
    }
  }
  return ConstraintSystem(std::move(full_vars), a, std::move(cs), MethodTag::kGmep);
}

ConstraintSystem build_smep(int T, std::vector<MarginalConstraint> marginals) {
  if (T < 1) throw ArgumentError("build_smep: T must be >= 1");

  std::vector<int> full_vars;
  for (int v = -T; v <= T; ++v) full_vars.push_back(v);

  // canonical listing: p(-T,1..T) .. p(-1,1..T), p(0,1..T), p(0,-1..-T),
  // p(1,-1..-T) .. p(T,-1..-T)
  std::vector<std::vector<int>> wanted;
  for (int g = T; g >= 1; --g) {
    std::vector<int> v{-g};
    for (int t = 1; t <= T; ++t) v.push_back(t);
    wanted.push_back(sorted(std::move(v)));
  }
  {
    std::vector<int> v{0};
    for (int t = 1; t <= T; ++t) v.push_back(t);
    wanted.push_back(sorted(std::move(v)));
  }
  {
    std::vector<int> v{0};
    for (int t = 1; t <= T; ++t) v.push_back(-t);
    wanted.push_back(sorted(std::move(v)));
  }
  for (int g = 1; g <= T; ++g) {
    std::vector<int> v{g};
    for (int t = 1; t <= T; ++t) v.push_back(-t);
    wanted.push_back(sorted(std::move(v)));
  }

  if (marginals.size() != wanted.size()) {
    throw ShapeError("build_smep: expected " + std::to_string(wanted.size()) +
                     " constraints, got " + std::to_string(marginals.size()));
  }
  std::vector<bool> used(marginals.size(), false);
  const Alphabet a = marginals.front().target().alphabet();
  std::vector<MarginalConstraint> cs;
  cs.reserve(wanted.size());
  for (const auto& want : wanted) {
    bool found = false;
    for (std::size_t i = 0; i < marginals.size(); ++i) {
      if (used[i]) continue;
      if (sorted(marginals[i].vars()) == want) {
        cs.push_back(canonicalized(marginals[i], want));
        used[i] = true;
        found = true;
        break;
      }
    }
    if (!found) {
      throw ShapeError("build_smep: missing constraint over variables " + var_list(want));
    }
  }
  return ConstraintSystem(std::move(full_vars), a, std::move(cs), MethodTag::kSmep);
}

JointTable joint_from_conditional(const JointTable& context_marginal, int target_var,
                                  const std::vector<std::vector<double>>& rows_by_context) {
  if (context_marginal.has_var(target_var)) {
    throw ArgumentError("joint_from_conditional: target appears in the context marginal");
  }
  const int I = context_marginal.alphabet().size();
  if (rows_by_context.size() != context_marginal.size()) {
    throw ShapeError("joint_from_conditional: one row per context cell required");
  }
  std::vector<int> vars = context_marginal.vars();
  vars.push_back(target_var);
  std::vector<double> values(context_marginal.size() * static_cast<std::size_t>(I));
  for (std::size_t ctx = 0; ctx < rows_by_context.size(); ++ctx) {
    const auto& row = rows_by_context[ctx];
    if (row.size() != static_cast<std::size_t>(I)) {
      throw ShapeError("joint_from_conditional: conditional row has wrong length");
    }
    for (int s = 0; s < I; ++s) {
      values[ctx * I + s] = context_marginal.values()[ctx] * row[static_cast<std::size_t>(s)];
    }
  }
  return JointTable(std::move(vars), context_marginal.alphabet(), std::move(values));
}

std::string ConsistencyReport::summary() const {
  if (consistent()) return "consistent";
  std::ostringstream os;
  for (const auto& issue : issues) {
    if (issue.kind == ConsistencyIssue::Kind::kNotNormalized) {
      os << "constraint " << issue.constraint_a << " mass deviates from 1 by " << issue.magnitude
         << "; ";
    } else {
      os << "constraints " << issue.constraint_a << " and " << issue.constraint_b
         << " disagree on " << var_list(issue.shared_vars) << " by " << issue.magnitude << "; ";
    }
  }
  return os.str();
}

ConsistencyReport check_consistency(const ConstraintSystem& system) {
  constexpr double kTol = 1e-9;
  ConsistencyReport report;
  const auto& cs = system.constraints();

  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double dev = std::abs(cs[i].target().total_mass() - 1.0);
    if (dev > kTol) {
      report.issues.push_back({ConsistencyIssue::Kind::kNotNormalized, static_cast<int>(i), -1,
                               {}, dev});
    }
  }

  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      std::vector<int> shared;
      for (int v : cs[i].vars()) {
        if (std::find(cs[j].vars().begin(), cs[j].vars().end(), v) != cs[j].vars().end()) {
          shared.push_back(v);
        }
      }
      if (shared.empty()) continue;
      std::sort(shared.begin(), shared.end());
      const JointTable mi = cs[i].target().marginal(shared).permuted(shared);
      const JointTable mj = cs[j].target().marginal(shared).permuted(shared);
      double worst = 0.0;
      for (std::size_t k = 0; k < mi.size(); ++k) {
        worst = std::max(worst, std::abs(mi.values()[k] - mj.values()[k]));
      }
      if (worst > kTol) {
        report.issues.push_back({ConsistencyIssue::Kind::kOverlapMismatch, static_cast<int>(i),
                                 static_cast<int>(j), shared, worst});
      }
    }
  }
  return report;
}

namespace {

// Gaussian-elimination rank with partial pivoting; rows of indicator tables
// are well-scaled so an absolute pivot threshold suffices.
int ge_rank(std::vector<std::vector<double>> rows) {
  constexpr double kPivotTol = 1e-8;
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  int rank = 0;
  std::size_t col = 0;
  for (std::size_t r = 0; r < rows.size() && col < cols; ++col) {
    std::size_t pivot = r;
    for (std::size_t k = r + 1; k < rows.size(); ++k) {
      if (std::abs(rows[k][col]) > std::abs(rows[pivot][col])) pivot = k;
    }
    if (std::abs(rows[pivot][col]) <= kPivotTol) continue;
    std::swap(rows[r], rows[pivot]);
    const double inv = 1.0 / rows[r][col];
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == r || rows[k][col] == 0.0) continue;
      const double factor = rows[k][col] * inv;
      for (std::size_t c = col; c < cols; ++c) rows[k][c] -= factor * rows[r][c];
    }
    ++rank;
    ++r;
  }
  return rank;
}

// Indicator row of one constraint cell over the full outcome space.
std::vector<double> cell_row(const ConstraintSystem& system, int constraint, std::size_t cell) {
  const int I = system.alphabet().size();
  const auto& c = system.constraints()[static_cast<std::size_t>(constraint)];
  std::vector<int> positions;
  for (int v : c.vars()) {
    positions.push_back(static_cast<int>(
        std::find(system.full_vars().begin(), system.full_vars().end(), v) -
        system.full_vars().begin()));
  }
  std::vector<double> row(system.outcome_count(), 0.0);
  std::vector<int> digits(system.full_vars().size(), 0);
  std::size_t flat = 0;
  do {
    std::size_t idx = 0;
    for (int p : positions) {
      idx = idx * static_cast<std::size_t>(I) + static_cast<std::size_t>(digits[static_cast<std::size_t>(p)]);
    }
    if (idx == cell) row[flat] = 1.0;
    ++flat;
  } while (detail::next_index(digits, I));
  return row;
}

}  // namespace

ReductionPlan reduce_redundancy(const ConstraintSystem& system, EliminationMode mode) {
  const ConsistencyReport report = check_consistency(system);
  if (!report.consistent()) {
    throw ConsistencyError("reduce_redundancy: " + report.summary());
  }

  const int I = system.alphabet().size();
  const int corner = mode == EliminationMode::kRowBased ? I - 1 : 0;

  // Each variable subset is owned by the first constraint containing it.
  std::map<std::vector<int>, int> owner;
  const auto& cs = system.constraints();
  for (std::size_t c = 0; c < cs.size(); ++c) {
    const auto& vars = cs[c].vars();
    const std::size_t k = vars.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      std::vector<int> subset;
      for (std::size_t b = 0; b < k; ++b) {
        if (mask & (std::size_t{1} << b)) subset.push_back(vars[b]);
      }
      std::sort(subset.begin(), subset.end());
      owner.emplace(std::move(subset), static_cast<int>(c));
    }
  }

  ReductionPlan plan;
  plan.mode = mode;
  for (std::size_t c = 0; c < cs.size(); ++c) {
    const auto& vars = cs[c].vars();
    const std::size_t k = vars.size();
    std::vector<int> digits(k, 0);
    std::size_t cell = 0;
    do {
      std::vector<int> pattern;
      for (std::size_t b = 0; b < k; ++b) {
        if (digits[b] != corner) pattern.push_back(vars[b]);
      }
      std::sort(pattern.begin(), pattern.end());
      const int own = owner.at(pattern);
      if (own == static_cast<int>(c)) {
        plan.kept.push_back({static_cast<int>(c), cell});
      } else {
        plan.dropped.push_back({static_cast<int>(c), cell, std::move(pattern), own});
      }
      ++cell;
    } while (detail::next_index(digits, I));
  }

  // Rank self-check on small instances: kept rows must be independent and
  // span the same space as the full cell-row matrix.
  if (system.outcome_count() <= 4096) {
    std::vector<std::vector<double>> full_rows;
    for (std::size_t c = 0; c < cs.size(); ++c) {
      for (std::size_t cell = 0; cell < cs[c].cell_count(); ++cell) {
        full_rows.push_back(cell_row(system, static_cast<int>(c), cell));
      }
    }
    std::vector<std::vector<double>> kept_rows;
    for (const auto& kc : plan.kept) kept_rows.push_back(cell_row(system, kc.constraint, kc.cell));
    const int full_rank = ge_rank(std::move(full_rows));
    const int kept_rank = ge_rank(std::move(kept_rows));
    if (kept_rank != static_cast<int>(plan.kept.size()) || kept_rank != full_rank) {
      throw Error("reduce_redundancy: rank verification failed (kept " +
                  std::to_string(plan.kept.size()) + ", kept rank " + std::to_string(kept_rank) +
                  ", full rank " + std::to_string(full_rank) + ")");
    }
  }
  return plan;
}

}  // namespace maxent
