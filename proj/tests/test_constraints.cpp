#include <algorithm>
#include <random>

#include "doctest.h"
#include "maxent/constraints.hpp"
#include "maxent/synthetic.hpp"
#include "oracle.hpp"

using namespace maxent;

namespace {

MarginalConstraint from_truth(const JointTable& truth, std::vector<int> vars) {
  JointTable m = truth.marginal(vars).permuted(vars);
  return MarginalConstraint(std::move(vars), std::move(m));
}

// Independent cell-row matrix over the outcome space, test-side loops only.
std::vector<std::vector<double>> cell_rows(const ConstraintSystem& system,
                                           const std::vector<ReductionPlan::KeptCell>* only) {
  const int I = system.alphabet().size();
  const std::size_t n = system.full_vars().size();
  const std::size_t total = oracle::ipow(I, n);
  std::vector<std::vector<double>> rows;

  auto add_row = [&](int c, std::size_t cell) {
    const auto& vars = system.constraints()[static_cast<std::size_t>(c)].vars();
    std::vector<int> positions;
    for (int v : vars) {
      positions.push_back(static_cast<int>(
          std::find(system.full_vars().begin(), system.full_vars().end(), v) -
          system.full_vars().begin()));
    }
    std::vector<double> row(total, 0.0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      const std::vector<int> d = oracle::digits_of(flat, n, I);
      std::size_t idx = 0;
      for (int p : positions) idx = idx * static_cast<std::size_t>(I) + static_cast<std::size_t>(d[static_cast<std::size_t>(p)]);
      if (idx == cell) row[flat] = 1.0;
    }
    rows.push_back(std::move(row));
  };

  if (only != nullptr) {
    for (const auto& kc : *only) add_row(kc.constraint, kc.cell);
  } else {
    for (std::size_t c = 0; c < system.constraints().size(); ++c) {
      for (std::size_t cell = 0; cell < system.constraints()[c].cell_count(); ++cell) {
        add_row(static_cast<int>(c), cell);
      }
    }
  }
  return rows;
}

void check_reduction_ranks(const ConstraintSystem& system) {
  const ReductionPlan plan = reduce_redundancy(system);
  const int full_rank = oracle::rank(cell_rows(system, nullptr));
  const int kept_rank = oracle::rank(cell_rows(system, &plan.kept));
  CHECK(static_cast<int>(plan.kept.size()) == full_rank);
  CHECK(kept_rank == full_rank);
  CHECK(plan.kept.size() + plan.dropped.size() == system.dual_dimension());
}

}  // namespace

TEST_CASE("MEP[T] variable layout: T=1 and T=3") {
  const JointTable t3 = random_joint({1, 2, 3}, Alphabet(2), 5);
  const ConstraintSystem s1 = build_mep_t(1, from_truth(t3, {1, 2}), from_truth(t3, {1, 3}),
                                          from_truth(t3, {2, 3}));
  CHECK(s1.full_vars() == std::vector<int>{1, 2, 3});
  CHECK(s1.constraints().size() == 3);
  CHECK(s1.horizon() == 1);
  CHECK(s1.constraints()[0].vars() == std::vector<int>{2, 3});
  CHECK(s1.constraints()[1].vars() == std::vector<int>{1, 2});
  CHECK(s1.constraints()[2].vars() == std::vector<int>{1, 3});

  const JointTable t7 = random_joint({1, 2, 3, 4, 5, 6, 7}, Alphabet(2), 6);
  const ConstraintSystem s3 =
      build_mep_t(3, from_truth(t7, {1, 2, 3, 4}), from_truth(t7, {1, 5, 6, 7}),
                  from_truth(t7, {2, 5, 6, 7}));
  CHECK(s3.full_vars().size() == 7);
  CHECK(s3.constraints()[0].vars() == std::vector<int>{2, 5, 6, 7});
  CHECK(s3.constraints()[1].vars() == std::vector<int>{1, 2, 3, 4});
  CHECK(s3.constraints()[2].vars() == std::vector<int>{1, 5, 6, 7});
  CHECK(s3.dual_dimension() == 3 * 16);

  CHECK_THROWS_AS(build_mep_t(1, from_truth(t3, {1, 2}), from_truth(t3, {1, 2}),
                              from_truth(t3, {2, 3})),
                  ShapeError);
}

TEST_CASE("GMEP constraint counts follow T(T-1)/2") {
  for (int T = 2; T <= 8; ++T) {
    std::vector<int> vars;
    for (int v = 1; v <= T; ++v) vars.push_back(v);
    const JointTable truth = random_joint(vars, Alphabet(2), static_cast<std::uint64_t>(T));
    std::vector<MarginalConstraint> pairs;
    for (int t = 1; t <= T; ++t) {
      for (int u = t + 1; u <= T; ++u) pairs.push_back(from_truth(truth, {t, u}));
    }
    const ConstraintSystem s = build_gmep(T, std::move(pairs));
    CHECK(s.constraints().size() == static_cast<std::size_t>(T * (T - 1) / 2));
  }
}

TEST_CASE("GMEP rejects missing or duplicated pairs") {
  const JointTable truth = random_joint({1, 2, 3}, Alphabet(2), 9);
  std::vector<MarginalConstraint> missing{from_truth(truth, {1, 2}), from_truth(truth, {1, 3})};
  CHECK_THROWS_AS(build_gmep(3, missing), PairCoverageError);

  std::vector<MarginalConstraint> dup{from_truth(truth, {1, 2}), from_truth(truth, {1, 2}),
                                      from_truth(truth, {2, 3})};
  CHECK_THROWS_AS(build_gmep(3, dup), PairCoverageError);
}

TEST_CASE("SMEP shapes: T=3 worked example, T=2 split, T=1 formula") {
  auto smep_sets = [](int T) {
    std::vector<std::vector<int>> sets;
    for (int g = T; g >= 1; --g) {
      std::vector<int> v{-g};
      for (int t = 1; t <= T; ++t) v.push_back(t);
      std::sort(v.begin(), v.end());
      sets.push_back(v);
    }
    std::vector<int> pos{0}, neg;
    for (int t = 1; t <= T; ++t) pos.push_back(t);
    for (int t = T; t >= 1; --t) neg.push_back(-t);
    neg.push_back(0);
    sets.push_back(pos);
    sets.push_back(neg);
    for (int g = 1; g <= T; ++g) {
      std::vector<int> v;
      for (int t = T; t >= 1; --t) v.push_back(-t);
      v.push_back(g);
      std::sort(v.begin(), v.end());
      sets.push_back(v);
    }
    return sets;
  };

  for (int T = 1; T <= 3; ++T) {
    std::vector<int> vars;
    for (int v = -T; v <= T; ++v) vars.push_back(v);
    const JointTable truth = random_joint(vars, Alphabet(2), static_cast<std::uint64_t>(20 + T));
    std::vector<MarginalConstraint> ms;
    for (const auto& set : smep_sets(T)) ms.push_back(from_truth(truth, set));
    const ConstraintSystem s = build_smep(T, std::move(ms));

    CHECK(s.full_vars().size() == static_cast<std::size_t>(2 * T + 1));
    CHECK(s.constraints().size() == static_cast<std::size_t>(2 * T + 2));
    for (const auto& c : s.constraints()) {
      CHECK(c.vars().size() == static_cast<std::size_t>(T + 1));
    }
  }

  // T=2: the four split triplets plus the two order-(T+1) constraints
  {
    std::vector<int> vars{-2, -1, 0, 1, 2};
    const JointTable truth = random_joint(vars, Alphabet(2), 33);
    std::vector<MarginalConstraint> ms;
    for (const auto& set : smep_sets(2)) ms.push_back(from_truth(truth, set));
    const ConstraintSystem s = build_smep(2, std::move(ms));
    std::vector<std::vector<int>> got;
    for (const auto& c : s.constraints()) got.push_back(c.vars());
    const std::vector<std::vector<int>> want{{-2, 1, 2},  {-1, 1, 2},   {0, 1, 2},
                                             {-2, -1, 0}, {-2, -1, 1},  {-2, -1, 2}};
    CHECK(got == want);
  }

  // wrong input count
  {
    std::vector<int> vars{-1, 0, 1};
    const JointTable truth = random_joint(vars, Alphabet(2), 44);
    std::vector<MarginalConstraint> ms{from_truth(truth, {-1, 1})};
    CHECK_THROWS_AS(build_smep(1, std::move(ms)), ShapeError);
  }
}

TEST_CASE("consistency: marginals of one joint agree; a perturbed cell is flagged") {
  const JointTable truth = random_joint({1, 2, 3}, Alphabet(2), 17);
  const ConstraintSystem good = build_mep_t(1, from_truth(truth, {1, 2}),
                                            from_truth(truth, {1, 3}), from_truth(truth, {2, 3}));
  CHECK(check_consistency(good).consistent());

  // perturb one cell of p(1,2) by 0.05 and renormalize within the constraint
  std::vector<double> bumped = truth.marginal(std::vector<int>{1, 2}).values();
  bumped[0] += 0.05;
  double mass = 0.0;
  for (double v : bumped) mass += v;
  for (double& v : bumped) v /= mass;
  const MarginalConstraint bad({1, 2}, JointTable({1, 2}, Alphabet(2), bumped));
  const ConstraintSystem perturbed =
      build_mep_t(1, bad, from_truth(truth, {1, 3}), from_truth(truth, {2, 3}));
  const ConsistencyReport report = check_consistency(perturbed);
  REQUIRE_FALSE(report.consistent());
  bool names_overlap = false;
  for (const auto& issue : report.issues) {
    if (issue.kind == ConsistencyIssue::Kind::kOverlapMismatch) {
      names_overlap = true;
      CHECK(issue.magnitude > 1e-3);
    }
  }
  CHECK(names_overlap);
}

TEST_CASE("consistency: disjoint-variable constraints are vacuously consistent") {
  const JointTable truth = random_joint({1, 2, 3, 4}, Alphabet(2), 23);
  const ConstraintSystem s({1, 2, 3, 4}, Alphabet(2),
                           {from_truth(truth, {1, 2}), from_truth(truth, {3, 4})},
                           MethodTag::kCustom);
  CHECK(check_consistency(s).consistent());
}

TEST_CASE("reduction: kept size equals the rank of the constraint matrix") {
  // MEP[1], I=2: 12 cells, rank 7
  {
    const JointTable truth = random_joint({1, 2, 3}, Alphabet(2), 3);
    const ConstraintSystem s = build_mep_t(1, from_truth(truth, {1, 2}),
                                           from_truth(truth, {1, 3}), from_truth(truth, {2, 3}));
    CHECK(s.dual_dimension() == 12);
    const ReductionPlan plan = reduce_redundancy(s);
    CHECK(plan.kept.size() == 7);
    check_reduction_ranks(s);
  }
  // GMEP T=3, I=2: kept equals the rank of the 12-row matrix
  {
    const JointTable truth = random_joint({1, 2, 3}, Alphabet(2), 4);
    const ConstraintSystem s =
        build_gmep(3, {from_truth(truth, {1, 2}), from_truth(truth, {1, 3}),
                       from_truth(truth, {2, 3})});
    CHECK(s.dual_dimension() == 12);
    check_reduction_ranks(s);
  }
  // single constraint over all vars: every cell row is independent
  {
    const JointTable truth = random_joint({1, 2, 3}, Alphabet(2), 7);
    const ConstraintSystem s({1, 2, 3}, Alphabet(2), {from_truth(truth, {1, 2, 3})},
                             MethodTag::kCustom);
    const ReductionPlan plan = reduce_redundancy(s);
    CHECK(plan.kept.size() == 8);
    check_reduction_ranks(s);
  }
}

TEST_CASE("reduction: rank equality across method shapes and alphabets") {
  std::mt19937_64 seeds(321);
  for (int I = 2; I <= 3; ++I) {
    {
      std::vector<int> vars{1, 2, 3};
      const JointTable truth = random_joint(vars, Alphabet(I), seeds());
      check_reduction_ranks(build_mep_t(1, from_truth(truth, {1, 2}), from_truth(truth, {1, 3}),
                                        from_truth(truth, {2, 3})));
    }
    {
      std::vector<int> vars{1, 2, 3, 4, 5};
      const JointTable truth = random_joint(vars, Alphabet(I), seeds());
      check_reduction_ranks(build_mep_t(2, from_truth(truth, {1, 2, 3}),
                                        from_truth(truth, {1, 4, 5}), from_truth(truth, {2, 4, 5})));
    }
    {
      std::vector<int> vars{1, 2, 3, 4};
      const JointTable truth = random_joint(vars, Alphabet(I), seeds());
      std::vector<MarginalConstraint> pairs;
      for (int t = 1; t <= 4; ++t) {
        for (int u = t + 1; u <= 4; ++u) pairs.push_back(from_truth(truth, {t, u}));
      }
      check_reduction_ranks(build_gmep(4, std::move(pairs)));
    }
    {
      std::vector<int> vars{-1, 0, 1};
      const JointTable truth = random_joint(vars, Alphabet(I), seeds());
      std::vector<MarginalConstraint> ms{from_truth(truth, {-1, 1}), from_truth(truth, {0, 1}),
                                         from_truth(truth, {-1, 0}), from_truth(truth, {-1, 1})};
      const ConstraintSystem s = build_smep(1, std::move(ms));
      CHECK(s.constraints().size() == 4);
      check_reduction_ranks(s);
    }
  }
  // SMEP T=2, I=2 as the largest shape in range
  {
    std::vector<int> vars{-2, -1, 0, 1, 2};
    const JointTable truth = random_joint(vars, Alphabet(2), seeds());
    std::vector<MarginalConstraint> ms{
        from_truth(truth, {-2, 1, 2}), from_truth(truth, {-1, 1, 2}), from_truth(truth, {0, 1, 2}),
        from_truth(truth, {-2, -1, 0}), from_truth(truth, {-2, -1, 1}),
        from_truth(truth, {-2, -1, 2})};
    check_reduction_ranks(build_smep(2, std::move(ms)));
  }
}

TEST_CASE("reduction: row- and column-based corners keep the same count") {
  const JointTable truth = random_joint({1, 2, 3}, Alphabet(3), 63);
  const ConstraintSystem s = build_gmep(
      3, {from_truth(truth, {1, 2}), from_truth(truth, {1, 3}), from_truth(truth, {2, 3})});
  const ReductionPlan rows = reduce_redundancy(s, EliminationMode::kRowBased);
  const ReductionPlan cols = reduce_redundancy(s, EliminationMode::kColumnBased);
  CHECK(rows.kept.size() == cols.kept.size());
  CHECK(oracle::rank(cell_rows(s, &rows.kept)) == oracle::rank(cell_rows(s, &cols.kept)));
  // different corners pick different cells
  CHECK(rows.dropped.size() == cols.dropped.size());
}

TEST_CASE("reduction rejects an inconsistent system") {
  const JointTable truth = random_joint({1, 2, 3}, Alphabet(2), 29);
  std::vector<double> bumped = truth.marginal(std::vector<int>{1, 2}).values();
  bumped[1] += 0.07;
  double mass = 0.0;
  for (double v : bumped) mass += v;
  for (double& v : bumped) v /= mass;
  const ConstraintSystem s =
      build_mep_t(1, MarginalConstraint({1, 2}, JointTable({1, 2}, Alphabet(2), bumped)),
                  from_truth(truth, {1, 3}), from_truth(truth, {2, 3}));
  CHECK_THROWS_AS(reduce_redundancy(s), ConsistencyError);
}

TEST_CASE("dropped cells carry their pattern owner") {
  const JointTable truth = random_joint({1, 2, 3}, Alphabet(2), 41);
  const ConstraintSystem s = build_mep_t(1, from_truth(truth, {1, 2}), from_truth(truth, {1, 3}),
                                         from_truth(truth, {2, 3}));
  const ReductionPlan plan = reduce_redundancy(s);
  for (const auto& dc : plan.dropped) {
    CHECK(dc.pattern_owner >= 0);
    CHECK(dc.pattern_owner < static_cast<int>(s.constraints().size()));
    CHECK(dc.pattern_owner != dc.constraint);
    // the owner constraint really contains the pattern variables
    for (int v : dc.pattern_vars) {
      const auto& ov = s.constraints()[static_cast<std::size_t>(dc.pattern_owner)].vars();
      CHECK(std::find(ov.begin(), ov.end(), v) != ov.end());
    }
  }
}

TEST_CASE("joint_from_conditional multiplies rows with the context marginal") {
  const JointTable mc({1, 2, 3}, Alphabet(2), oracle::mc_joint_3var());
  const JointTable ctx = mc.marginal(std::vector<int>{2});
  const std::vector<std::vector<double>> rows{{0.9, 0.1}, {0.2, 0.8}};
  const JointTable joint = joint_from_conditional(ctx, 3, rows);
  const JointTable expect = mc.marginal(std::vector<int>{2, 3});
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(joint.values()[i] == doctest::Approx(expect.values()[i]).epsilon(1e-12));
  }
}
