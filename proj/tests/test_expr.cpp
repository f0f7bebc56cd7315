#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "whitney/error.hpp"
#include "whitney/expr.hpp"

namespace whitney {
namespace {

ExprFn x(int arity, int i) { return ExprFn::variable(arity, i); }
ExprFn c(int arity, long v) { return ExprFn::constant(arity, Rational(v)); }

TEST(Expr, EvaluatesPolynomial) {
  const auto f = x(2, 0).pow(2) + x(2, 1);
  EXPECT_DOUBLE_EQ(evaluate(f, {2.0, 1.0}), 5.0);
}

TEST(Expr, AbsAtZeroIsSingular) {
  const auto f = abs(x(1, 0));
  try {
    evaluate(f, {0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularPoint);
  }
}

TEST(Expr, MaxPicksActiveBranch) {
  const auto f = max(x(1, 0), c(1, 2) * x(1, 0) - c(1, 1));
  EXPECT_DOUBLE_EQ(evaluate(f, {0.7}), 0.7);
}

TEST(Expr, PowerRule) {
  const auto d = differentiate(x(1, 0).pow(3), MultiIndex({2}));
  EXPECT_DOUBLE_EQ(evaluate(d, {1.5}), 9.0);
}

}  // namespace
}  // namespace whitney
