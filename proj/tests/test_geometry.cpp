#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "whitney/error.hpp"
#include "whitney/geometry.hpp"

namespace whitney {
namespace {

CellPtr parabola() {
  return Cell::graph(2, make_interval(0.0, 1.0), {ExprFn::variable(1, 0).pow(2)}, {0, 1});
}

CellPtr flat_segment() {
  return Cell::graph(2, make_interval(0.0, 1.0), {ExprFn::constant(1, Rational(1, 2))}, {0, 1});
}

TEST(Geometry, IntervalMembership) {
  const auto I = make_interval(0.0, 1.0);
  const std::vector<double> in = {0.5}, edge = {1.0}, out = {1.5};
  EXPECT_EQ(contains(*I, in), Membership::kInside);
  EXPECT_EQ(contains(*I, edge), Membership::kBoundary);
  EXPECT_EQ(contains(*I, out), Membership::kOutside);
  EXPECT_DOUBLE_EQ(boundary_distance(*I, in), 0.5);
}

TEST(Geometry, SlabBoundaryDistance) {
  const auto slab = make_slab(make_interval(-1.0, 1.0), ExprFn::constant(1, Rational(0)), ExprFn::constant(1, Rational(2)));
  const std::vector<double> u = {0.0, 0.5};
  EXPECT_NEAR(boundary_distance(*slab, u), 0.5, 1e-12);
}

TEST(Geometry, PointDistanceIsEuclidean) {
  const auto c = Cell::point({1.0, 2.0});
  const std::vector<double> x = {4.0, 6.0};
  EXPECT_DOUBLE_EQ(cell_distance(*c, x).value, 5.0);
}

TEST(Geometry, EmptySetDistanceIsOne) {
  const std::vector<double> x = {3.0};
  EXPECT_EQ(set_distance(SetDesc{}, x).value, 1.0);
}

TEST(Geometry, ParabolaDistanceBracketsTheTruth) {
  const auto c = parabola();
  // Nearest point of (0, 1) on y = x^2 solves 2x^3 - x = 0: x = 1/sqrt(2).
  const std::vector<double> x = {0.0, 1.0};
  DistanceOptions opts;
  opts.bracket = true;
  const auto d = cell_distance(*c, x, opts);
  const double want = std::sqrt(0.5 + 0.25);
  EXPECT_LE(d.lower, want + 1e-12);
  EXPECT_GE(d.upper, want - 1e-12);
  EXPECT_NEAR(d.value, want, 1e-9);
}

TEST(Geometry, ConstantGraphHasClosedFormDistance) {
  const auto c = flat_segment();
  EXPECT_TRUE(c->closed_form_distance());
  const std::vector<double> x = {0.25, 0.9};
  EXPECT_NEAR(cell_distance(*c, x).value, 0.4, 1e-15);
}

TEST(Geometry, SandwichHoldsOnParabola) {
  const auto c = parabola();
  const auto lip = lipschitz_estimate(c->map(), *c->base(), 200);
  EXPECT_NEAR(lip.m_hat, 2.0, 1e-2);
  Rng rng(7);
  const auto rep = distance_sandwich_check(*c, lip, sandwich_samples(*c, 300, rng));
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_GT(rep.inside_samples, 0u);
  EXPECT_GT(rep.outside_samples, 0u);
}

TEST(Geometry, SandwichIsTightForConstantGraph) {
  const auto c = flat_segment();
  const auto lip = lipschitz_estimate(c->map(), *c->base(), 100);
  Rng rng(8);
  const auto rep = distance_sandwich_check(*c, lip, sandwich_samples(*c, 300, rng));
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_LT(rep.max_equality_gap, 1e-9);
}

TEST(Geometry, PermutedGraphEmbedsSwapped) {
  const auto c = Cell::graph(2, make_interval(0.0, 1.0), {ExprFn::constant(1, Rational(1))}, {1, 0});
  const std::vector<double> u = {0.25};
  const auto x = c->embed(u);
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 0.25);
  EXPECT_EQ(contains(*c, x), Membership::kInside);
}

TEST(Geometry, RegularMapPassesRegularityProbe) {
  const auto rep = check_lambda_regular(ExprFn::variable(1, 0).pow(2), *make_interval(0.0, 1.0), 3);
  EXPECT_TRUE(rep.plausibly_regular);
}

TEST(Geometry, SeparatedSegmentsAreSimplySeparated) {
  SetDesc a_cap_b, b;
  a_cap_b.pieces.push_back(Cell::point({0.0, 0.0}));
  b.pieces.push_back(Cell::graph(2, make_interval(0.0, 1.0), {ExprFn::constant(1, Rational(0))}, {0, 1}));
  std::vector<std::vector<double>> samples_of_a;
  for (int k = 1; k <= 40; ++k) samples_of_a.push_back({0.0, std::ldexp(1.0, -k / 4)});
  const auto rep = simply_separated_check(a_cap_b, b, samples_of_a);
  EXPECT_TRUE(rep.simply_separated);
  EXPECT_GT(rep.m_coarse, 0.5);
}

}  // namespace
}  // namespace whitney
