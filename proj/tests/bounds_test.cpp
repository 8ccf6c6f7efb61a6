#include "joinforge/bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "joinforge/error.hpp"
#include "joinforge/rng.hpp"
#include "support/oracles.hpp"

namespace joinforge {
namespace {

const JoinShape& example_shape() {
  static const JoinShape shape = extract_shape(testing::example_config());
  return shape;
}

TEST(ValidateExponentsTest, AcceptsConjugateTriple) {
  EXPECT_FALSE(validate_exponents(example_shape(), bind_exponents(std::vector<double>{3, 3, 3})));
}

TEST(ValidateExponentsTest, CountMismatch) {
  const auto v = validate_exponents(example_shape(), bind_exponents(std::vector<double>{2, 2}));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, ExponentViolation::Kind::count);
  EXPECT_EQ(v->residual, -1.0);
}

TEST(ValidateExponentsTest, ConjugacyResidualIsSumMinusOne) {
  // 1/4 + 1/4 + 1/3 = 5/6.
  const auto v = validate_exponents(example_shape(), bind_exponents(std::vector<double>{4, 4, 3}));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, ExponentViolation::Kind::conjugacy);
  EXPECT_NEAR(v->residual, -1.0 / 6.0, 1e-15);
}

TEST(ValidateExponentsTest, PositivityAndCoexponent) {
  auto v = validate_exponents(example_shape(), bind_exponents(std::vector<double>{-3, 3, 3}));
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, ExponentViolation::Kind::positivity);
  ExponentAssignment pa{{3, 3, 3}, 1.5};
  v = validate_exponents(example_shape(), pa);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, ExponentViolation::Kind::coexponent);
  // With an inherited coexponent the slots only need the remainder.
  ExponentAssignment partial{{6, 6, 6}, 0.5};
  EXPECT_FALSE(validate_exponents(example_shape(), partial));
}

TEST(ValidateExponentsTest, ToleranceIsRelativeToOne) {
  EXPECT_FALSE(validate_exponents(example_shape(), bind_exponents(std::vector<double>{3, 3, 3 * (1 + 1e-14)})));
  EXPECT_TRUE(validate_exponents(example_shape(), bind_exponents(std::vector<double>{3, 3, 3 * (1 + 1e-9)})));
}

TEST(BindExponentsTest, SlotAssignmentPermutes) {
  const std::vector<double> p{1.5, 6, 12};
  const std::vector<int> slots{2, 0, 1};
  const ExponentAssignment pa = bind_exponents(p, slots);
  EXPECT_EQ(pa.exponents, (std::vector<double>{12, 1.5, 6}));
  EXPECT_THROW(bind_exponents(p, std::vector<int>{0, 0, 1}), ValidationError);
  EXPECT_THROW(bind_exponents(p, std::vector<int>{0, 1}), ValidationError);
  EXPECT_THROW(bind_exponents(p, std::vector<int>{0, 1, 3}), ValidationError);
}

TEST(LevelPowerSumTest, UnitBinaryTree) {
  const TreeParams tree(2, 3);
  const CylinderMassTable masses = cylinder_masses(tree, WeightAssignment::uniform(tree, 1.0));
  const LevelFunction f = LevelFunction::constant(tree, 1.0);
  for (double p : {0.5, 1.0, 2.0, 3.0, 7.25}) {
    EXPECT_NEAR(level_power_sum(tree, masses, f, Vertex::root(), 1, p), 2.0 * std::pow(4.0, 1 + p),
                1e-12 * std::pow(4.0, 1 + p));
  }
}

TEST(LevelPowerSumTest, RootLevelAndZeroWeights) {
  const TreeParams tree(3, 2);
  Rng rng(6);
  const WeightAssignment mu = testing::random_weights(tree, rng);
  const LevelFunction f = testing::random_function(tree, rng);
  const CylinderMassTable masses = cylinder_masses(tree, mu);
  const double total = masses.mass(Vertex::root());
  const double p = 2.5;
  const double expected = std::pow(f(Vertex::root()), p) * std::pow(total, 1 + p);
  EXPECT_NEAR(level_power_sum(tree, masses, f, Vertex::root(), 0, p), expected, 1e-12 * expected);
  EXPECT_NEAR(log_level_power_sum(tree, masses, f, Vertex::root(), 0, p), std::log(expected), 1e-12);

  const CylinderMassTable zero = cylinder_masses(tree, WeightAssignment::uniform(tree, 0.0));
  EXPECT_EQ(level_power_sum(tree, zero, f, Vertex::root(), 1, p), 0.0);
  EXPECT_EQ(log_level_power_sum(tree, zero, f, Vertex::root(), 1, p), -INFINITY);
}

TEST(LevelPowerSumTest, RestrictedToBaseAndRangeChecked) {
  const TreeParams tree(2, 3);
  const CylinderMassTable masses = cylinder_masses(tree, WeightAssignment::uniform(tree, 1.0));
  const LevelFunction f = LevelFunction::constant(tree, 1.0);
  EXPECT_NEAR(level_power_sum(tree, masses, f, Vertex{2}, 2, 1.0), 2.0 * 4.0, 1e-12);
  EXPECT_THROW(level_power_sum(tree, masses, f, Vertex{2}, 0, 1.0), UsageError);
  EXPECT_THROW(level_power_sum(tree, masses, f, Vertex::root(), 4, 1.0), UsageError);
}

TEST(LevelPowerSumTest, LogDomainSurvivesOverflow) {
  const TreeParams tree(2, 3);
  const CylinderMassTable masses = cylinder_masses(tree, WeightAssignment::uniform(tree, 1e200));
  const LevelFunction f = LevelFunction::constant(tree, 1.0);
  const double log_sum = log_level_power_sum(tree, masses, f, Vertex::root(), 1, 3.0);
  EXPECT_TRUE(std::isfinite(log_sum));
  EXPECT_NEAR(log_sum, std::log(2.0) + 4.0 * std::log(4e200), 1e-9);
}

TEST(RhsProductTest, WorkedExample) {
  const TreeParams tree(2, 3);
  const CylinderMassTable masses = cylinder_masses(tree, WeightAssignment::uniform(tree, 1.0));
  const LevelFunction f = LevelFunction::constant(tree, 1.0);
  const ExponentAssignment pa = bind_exponents(std::vector<double>{3, 3, 3});
  EXPECT_NEAR(rhs_product(example_shape(), Vertex::root(), masses, f, pa, 0.125), 64.0, 64.0 * 1e-12);
  EXPECT_EQ(rhs_product(example_shape(), Vertex::root(), masses, f, pa, 0.0), 0.0);
  EXPECT_THROW(rhs_product(example_shape(), Vertex::root(), masses, f, bind_exponents(std::vector<double>{4, 4, 3}), 1.0),
               ValidationError);
}

TEST(RhsProductTest, HomogeneousOfDegreeN) {
  const TreeParams tree(2, 3);
  Rng rng(9);
  const WeightAssignment mu = testing::random_weights(tree, rng);
  const LevelFunction f = testing::random_function(tree, rng);
  const ExponentAssignment pa = bind_exponents(std::vector<double>{2.5, 5, 2.5});
  const double one = rhs_product(example_shape(), Vertex::root(), cylinder_masses(tree, mu), f, pa, 1.0);
  const double two = rhs_product(example_shape(), Vertex::root(), cylinder_masses(tree, mu.scaled(2.0)), f, pa, 1.0);
  EXPECT_NEAR(two, 16.0 * one, 16.0 * one * 1e-12);
}

TEST(RhsProductTest, InvariantUnderOrbitRepresentative) {
  const Configuration c = testing::ternary_five();
  Rng rng(10);
  const WeightAssignment mu = testing::random_weights(c.tree(), rng);
  const LevelFunction f = testing::random_function(c.tree(), rng);
  const CylinderMassTable masses = cylinder_masses(c.tree(), mu);
  const ExponentAssignment pa = bind_exponents(std::vector<double>(4, 4.0));
  const double reference = rhs_product(extract_shape(c), c.base(), masses, f, pa, 1.0);
  const auto members = orbit_members(c);
  for (std::size_t i = 0; i < members.size(); i += 131) {
    const double other = rhs_product(extract_shape(members[i]), c.base(), masses, f, pa, 1.0);
    EXPECT_NEAR(other, reference, reference * 1e-12);
  }
}

TEST(GeneralConstantTest, Examples) {
  EXPECT_EQ(k_general(example_shape()).value, 1.0);
  EXPECT_EQ(k_general(example_shape()).crude, 1.0);
  const GeneralConstant ternary = k_general(extract_shape(testing::ternary_eight()));
  EXPECT_EQ(ternary.value, 32.0);
  EXPECT_EQ(ternary.crude, 128.0);
  for (int m = 2; m <= 6; ++m) {
    const Configuration pair(TreeParams(m, 2), Vertex::root(), {{1, 1}, {2, 1}});
    EXPECT_EQ(k_general(extract_shape(pair)).value, m - 1.0);
  }
}

TEST(BinaryConstantTest, Examples) {
  BinaryConstant b = k_binary(example_shape(), bind_exponents(std::vector<double>{3, 3, 3}));
  EXPECT_TRUE(b.condition_met);
  EXPECT_EQ(b.value, 0.125);

  b = k_binary(example_shape(), bind_exponents(std::vector<double>{1.5, 6, 6}));
  EXPECT_TRUE(b.condition_met);
  EXPECT_EQ(b.value, 0.125);

  // 1/1.5 sits in the left branch now.
  b = k_binary(example_shape(), bind_exponents(std::vector<double>{6, 1.5, 6}));
  EXPECT_FALSE(b.condition_met);
  EXPECT_FALSE(b.top_condition_met);
  EXPECT_EQ(b.value, 1.0);

  const Configuration pair(TreeParams(2, 3), Vertex::root(), {{1, 1, 1}, {2, 1, 1}});
  b = k_binary(extract_shape(pair), bind_exponents(std::vector<double>{1}));
  EXPECT_TRUE(b.condition_met);
  EXPECT_EQ(b.value, 0.5);

  EXPECT_THROW(k_binary(extract_shape(testing::ternary_eight()), bind_exponents(std::vector<double>(7, 7.0))),
               UsageError);
}

TEST(BinaryConstantTest, DeepConditionFollowsTopCondition) {
  // Sub-branch slot sets are subsets of the top branch slot sets.
  Rng rng(31);
  const TreeParams tree(2, 5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = rng.integer(2, 8);
    std::set<std::uint64_t> used;
    std::vector<Vertex> leaves;
    while (leaves.size() < n) {
      const auto pos = rng.integer(0, tree.leaf_count() - 1);
      if (used.insert(pos).second) leaves.push_back(tree.vertex_at(5, pos));
    }
    const JoinShape shape = extract_shape(Configuration(tree, Vertex::root(), leaves));
    std::vector<double> e(n - 1);
    double total = 0;
    for (double& x : e) total += (x = rng.exponential());
    std::vector<double> p;
    for (double x : e) p.push_back(total / x);
    const BinaryConstant b = k_binary(shape, bind_exponents(p));
    if (b.top_condition_met) EXPECT_TRUE(b.deep_condition_met);
    EXPECT_EQ(b.condition_met, b.top_condition_met && b.deep_condition_met);
  }
}

TEST(InductiveConstantTest, WorkedExampleNodeFactors) {
  const InductiveConstant k = k_inductive(example_shape(), bind_exponents(std::vector<double>{3, 3, 3}));
  EXPECT_NEAR(k.value, 0.125, 1e-15);
  EXPECT_FALSE(k.estimated);
  ASSERT_EQ(k.ledger.size(), 3u);
  for (const InductiveStep& step : k.ledger) {
    EXPECT_NEAR(step.factor, 0.5, 1e-15);
    double branch_sum = 0;
    for (double c : step.branch_coexponents) branch_sum += c;
    EXPECT_NEAR(branch_sum, step.branches - 1 + step.beta_coexponent, 1e-12);
  }
  EXPECT_NEAR(k.ledger[0].beta_coexponent, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(k.ledger[0].inherited_coexponent, 0.0);
  EXPECT_NEAR(k.ledger[1].inherited_coexponent, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(k.ledger[1].beta_coexponent, 1.0, 1e-15);
}

TEST(InductiveConstantTest, SingleJoinLedger) {
  for (int m = 2; m <= 4; ++m) {
    const Configuration pair(TreeParams(m, 2), Vertex::root(), {{1, 1}, {2, 1}});
    const InductiveConstant k = k_inductive(extract_shape(pair), bind_exponents(std::vector<double>{1}));
    ASSERT_EQ(k.ledger.size(), 1u);
    const InductiveStep& step = k.ledger[0];
    EXPECT_EQ(step.branch_coexponents, (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(step.beta_coexponent, 1.0);
    ASSERT_EQ(step.muirhead_exponents.size(), static_cast<std::size_t>(m));
    EXPECT_EQ(step.muirhead_exponents[0], 1.0);
    EXPECT_EQ(step.muirhead_exponents[1], 1.0);
    if (m == 2) EXPECT_NEAR(k.value, 0.5, 1e-15);
  }
}

TEST(InductiveConstantTest, ReproducesBinaryOptimalConstant) {
  Rng rng(41);
  const TreeParams tree(2, 5);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto n = rng.integer(2, 8);
    std::set<std::uint64_t> used;
    std::vector<Vertex> leaves;
    while (leaves.size() < n) {
      const auto pos = rng.integer(0, tree.leaf_count() - 1);
      if (used.insert(pos).second) leaves.push_back(tree.vertex_at(5, pos));
    }
    const JoinShape shape = extract_shape(Configuration(tree, Vertex::root(), leaves));
    std::vector<double> e(n - 1);
    double total = 0;
    for (double& x : e) total += (x = rng.exponential());
    std::vector<double> p;
    for (double x : e) p.push_back(total / x);
    const ExponentAssignment pa = bind_exponents(p);
    const InductiveConstant inductive = k_inductive(shape, pa);
    EXPECT_LE(inductive.value, k_general(shape).value * (1 + 1e-12));
    if (!k_binary(shape, pa).condition_met) continue;
    ++checked;
    EXPECT_NEAR(inductive.value, std::ldexp(1.0, -static_cast<int>(n - 1)), 1e-9 * inductive.value);
    for (const InductiveStep& step : inductive.ledger) EXPECT_LE(step.factor, 0.5 * (1 + 1e-12));
  }
  EXPECT_GT(checked, 20);
}

TEST(InductiveConstantTest, TernaryUsesBracketAndFlagsEstimate) {
  const JoinShape shape = extract_shape(testing::ternary_eight());
  const InductiveConstant k = k_inductive(shape, bind_exponents(std::vector<double>(7, 7.0)));
  ASSERT_EQ(k.ledger.size(), 5u);
  EXPECT_GT(k.value, 0.0);
  EXPECT_GE(k.certified_upper, k.value * (1 - 1e-12));
  bool any_estimated = false;
  for (const auto& step : k.ledger) {
    any_estimated |= step.estimated;
    EXPECT_GE(step.certified_factor, step.factor * (1 - 1e-12));
  }
  EXPECT_EQ(k.estimated, any_estimated);
  EXPECT_THROW(k_inductive(shape, bind_exponents(std::vector<double>(7, 2.0))), ValidationError);
}

}  // namespace
}  // namespace joinforge
