#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "maxent/table.hpp"
#include "oracle.hpp"

using namespace maxent;

namespace {

JointTable mc3() { return JointTable({1, 2, 3}, Alphabet(2), oracle::mc_joint_3var()); }

constexpr double kLn2 = 0.6931471805599453;

}  // namespace

TEST_CASE("normalize rescales and preserves proportions") {
  JointTable t({1, 2}, Alphabet(2), {1, 1, 1, 1});
  const JointTable n = t.normalized();
  for (double v : n.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));

  JointTable degenerate({1}, Alphabet(2), {2, 0});
  CHECK(degenerate.normalized().values()[0] == doctest::Approx(1.0));
  CHECK(degenerate.normalized().values()[1] == 0.0);

  JointTable sym({1}, Alphabet(2), {0.3, 0.3});
  CHECK(sym.normalized().values()[0] == doctest::Approx(0.5));

  CHECK(std::abs(n.total_mass() - 1.0) <= 1e-12);
}

TEST_CASE("normalize rejects an all-zero table") {
  JointTable z({1}, Alphabet(3), {0, 0, 0});
  CHECK_THROWS_AS(z.normalized(), ZeroMassError);
}

TEST_CASE("table construction validates invariants") {
  CHECK_THROWS_AS(JointTable({1, 1}, Alphabet(2), std::vector<double>(4, 0.25)), ArgumentError);
  CHECK_THROWS_AS(JointTable({1}, Alphabet(2), {0.5, -0.5}), ArgumentError);
  CHECK_THROWS_AS(JointTable({1}, Alphabet(2), {0.5}), ShapeError);
  CHECK_THROWS_AS(Alphabet(0), ArgumentError);
}

TEST_CASE("marginalize: uniform, independence, and the enumeration oracle") {
  const JointTable u = JointTable::uniform({1, 2, 3}, Alphabet(2));
  const int keep1[] = {1};
  const JointTable m1 = u.marginal(keep1);
  CHECK(m1.values()[0] == doctest::Approx(0.5));
  CHECK(m1.values()[1] == doctest::Approx(0.5));

  // product joint p(x) p(y) with p = (0.9, 0.1)
  JointTable prod({7, 9}, Alphabet(2), {0.81, 0.09, 0.09, 0.01});
  const int keepy[] = {9};
  const JointTable my = prod.marginal(keepy);
  CHECK(my.values()[0] == doctest::Approx(0.9));
  CHECK(my.values()[1] == doctest::Approx(0.1));

  const JointTable mc = mc3();
  const int keep23[] = {2, 3};
  const JointTable m23 = mc.marginal(keep23);
  const std::vector<double> expected = oracle::marginal(oracle::mc_joint_3var(), 3, 2, {1, 2});
  REQUIRE(m23.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(m23.values()[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  }
  CHECK(m23.total_mass() == doctest::Approx(mc.total_mass()).epsilon(1e-14));

  const int bad[] = {4};
  CHECK_THROWS_AS(mc.marginal(bad), UnknownVariableError);
}

TEST_CASE("condition matches enumeration and flags null events") {
  // independent Bernoulli(0.5) pair
  const JointTable pair = JointTable::uniform({1, 2}, Alphabet(2));
  const ConditionalSlice s = pair.condition(2, {{1, 0}});
  CHECK(s.probs()[0] == doctest::Approx(0.5));

  const JointTable mc = mc3();
  const ConditionalSlice s2 = mc.condition(3, {{2, 0}});
  const std::vector<double> expect = oracle::conditional(oracle::mc_joint_3var(), 3, 2, 2, {{1, 0}});
  CHECK(s2.probs()[0] == doctest::Approx(expect[0]).epsilon(1e-13));
  CHECK(s2.probs()[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(s2.probs()[1] == doctest::Approx(0.1).epsilon(1e-12));

  // deterministic copy: P(x,y) = 0.5 * 1[x==y]
  JointTable copy({1, 2}, Alphabet(2), {0.5, 0, 0, 0.5});
  const ConditionalSlice s3 = copy.condition(2, {{1, 1}});
  CHECK(s3.probs()[0] == 0.0);
  CHECK(s3.probs()[1] == doctest::Approx(1.0));

  JointTable gap({1, 2}, Alphabet(2), {0.5, 0.5, 0, 0});
  CHECK_THROWS_AS(gap.condition(2, {{1, 1}}), ConditioningOnNullEventError);
  CHECK_THROWS_AS(gap.condition(2, {{2, 0}}), ArgumentError);
  CHECK_THROWS_AS(gap.condition(5, {}), UnknownVariableError);
}

TEST_CASE("entropy: uniform, point mass, direct evaluation") {
  CHECK(JointTable::uniform({1, 2, 3}, Alphabet(2)).entropy() ==
        doctest::Approx(3 * kLn2).epsilon(1e-12));

  JointTable point({1, 2}, Alphabet(2), {1, 0, 0, 0});
  CHECK(point.entropy() == 0.0);

  JointTable t({1}, Alphabet(3), {0.5, 0.25, 0.25});
  CHECK(t.entropy() == doctest::Approx(1.5 * kLn2).epsilon(1e-13));
  CHECK(t.entropy() == doctest::Approx(oracle::entropy(t.values())).epsilon(1e-14));

  JointTable unnorm({1}, Alphabet(2), {0.5, 0.1});
  CHECK_THROWS_AS(unnorm.entropy(), ArgumentError);
}

TEST_CASE("conditional entropy: independence, functional dependence, oracle") {
  const JointTable pair = JointTable::uniform({1, 2}, Alphabet(2));
  const int g1[] = {1};
  CHECK(pair.conditional_entropy(2, g1) == doctest::Approx(kLn2).epsilon(1e-12));

  JointTable copy({1, 2}, Alphabet(2), {0.5, 0, 0, 0.5});
  CHECK(copy.conditional_entropy(2, g1) == doctest::Approx(0.0).epsilon(1e-12));

  const JointTable mc = mc3();
  const int g2[] = {2};
  const std::vector<double> m23 = oracle::marginal(oracle::mc_joint_3var(), 3, 2, {1, 2});
  const std::vector<double> m2 = oracle::marginal(oracle::mc_joint_3var(), 3, 2, {1});
  const double expected = oracle::entropy(m23) - oracle::entropy(m2);
  CHECK(mc.conditional_entropy(3, g2) == doctest::Approx(expected).epsilon(1e-13));

  const int bad[] = {3};
  CHECK_THROWS_AS(mc.conditional_entropy(3, bad), ArgumentError);
}

TEST_CASE("spread") {
  const double a[] = {0.5, 0.5};
  CHECK(spread(a) == 0.0);
  const double b[] = {1.0, 0.0};
  CHECK(spread(b) == 1.0);
  const double c[] = {0.5, 0.25, 0.25};
  CHECK(spread(c) == doctest::Approx(0.25));
  CHECK_THROWS_AS(spread(std::span<const double>{}), ArgumentError);
}

TEST_CASE("sample: point mass, argmax limit, reproducibility, frequencies") {
  const ConditionalSlice point(1, {}, {0.0, 1.0});
  CHECK(sample(point, 1.0, 42) == 1);
  CHECK(sample(point, 1e-9, 7) == 1);

  const ConditionalSlice skew(1, {}, {0.9, 0.1});
  CHECK(sample(skew, 1e-13, 123) == 0);  // argmax limit
  CHECK(sample(skew, 1e-6, 123) == 0);

  const ConditionalSlice fair(1, {}, {0.5, 0.5});
  CHECK(sample(fair, 1.0, 99) == sample(fair, 1.0, 99));

  std::mt19937_64 rng(2024);
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += sample(fair, 1.0, rng);
  const double freq = static_cast<double>(ones) / n;
  CHECK(std::abs(freq - 0.5) < 0.01);

  CHECK_THROWS_AS(sample(fair, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(sample(fair, std::numeric_limits<double>::infinity(), 1), ArgumentError);
}

TEST_CASE("argmax tie-break picks the lowest symbol index") {
  const ConditionalSlice tie(1, {}, {0.25, 0.25, 0.25, 0.25});
  for (std::uint64_t seed = 0; seed < 8; ++seed) CHECK(sample(tie, 1e-13, seed) == 0);
}

TEST_CASE("property: marginalization commutes") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 2);
    const int I = 2 + static_cast<int>(rng() % 3);
    std::vector<int> vars;
    for (int v = 0; v < n; ++v) vars.push_back(v + 1);
    const JointTable joint(vars, Alphabet(I), oracle::random_simplex(oracle::ipow(I, n), rng));

    // random A subset of AB subset of vars
    std::vector<int> ab, a;
    for (int v : vars) {
      if (rng() % 2) ab.push_back(v);
    }
    if (ab.empty()) ab.push_back(vars[0]);
    for (int v : ab) {
      if (rng() % 2) a.push_back(v);
    }
    if (a.empty()) a.push_back(ab[0]);

    const JointTable two_step = joint.marginal(ab).marginal(a);
    const JointTable one_step = joint.marginal(a);
    REQUIRE(two_step.vars() == one_step.vars());
    for (std::size_t i = 0; i < one_step.size(); ++i) {
      CHECK(two_step.values()[i] == doctest::Approx(one_step.values()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: entropy chain rule") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const int I = 2 + static_cast<int>(rng() % 3);
    const JointTable joint({1, 2}, Alphabet(I), oracle::random_simplex(oracle::ipow(I, 2), rng));
    const int keep_x[] = {1}, given[] = {1};
    const double lhs = joint.entropy();
    const double rhs = joint.marginal(keep_x).entropy() + joint.conditional_entropy(2, given);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("property: conditioning reduces entropy (nested given sets)") {
  std::mt19937_64 rng(555);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 2);
    const int I = 2 + static_cast<int>(rng() % 3);
    std::vector<int> vars;
    for (int v = 0; v < n; ++v) vars.push_back(v + 1);
    const JointTable joint(vars, Alphabet(I), oracle::random_simplex(oracle::ipow(I, n), rng));

    const int target = vars.back();
    std::vector<int> g1;  // grows; every prefix is a subset of the next
    for (std::size_t k = 0; k + 1 < vars.size(); ++k) {
      std::vector<int> g2 = g1;
      g1.push_back(vars[k]);
      CHECK(joint.conditional_entropy(target, g1) <=
            joint.conditional_entropy(target, g2) + 1e-12);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("property: spread is zero iff uniform") {
  std::mt19937_64 rng(88);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> p = oracle::random_simplex(5, rng);
    const double s = spread(p);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    bool uniform = true;
    for (double v : p) uniform = uniform && std::abs(v - 0.2) < 1e-15;
    CHECK(uniform == (s < 1e-15));
  }
  const std::vector<double> u(4, 0.25);
  CHECK(spread(u) == 0.0);
}

TEST_CASE("permuted reorders axes consistently") {
  const JointTable mc = mc3();
  const int order[] = {3, 1, 2};
  const JointTable p = mc.permuted(order);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        const int src[] = {a, b, c};
        const int dst[] = {c, a, b};
        CHECK(mc.values()[mc.flat_index(src)] == p.values()[p.flat_index(dst)]);
      }
    }
  }
}
