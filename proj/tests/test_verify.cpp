#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "poly_oracle.hpp"
#include "whitney/error.hpp"
#include "whitney/extension.hpp"
#include "whitney/field.hpp"
#include "whitney/numdiff.hpp"
#include "whitney/scene_io.hpp"
#include "whitney/verify.hpp"

namespace whitney {
namespace {

std::vector<std::pair<double, double>> series(double (*f)(double), int from, int to) {
  std::vector<std::pair<double, double>> out;
  for (int j = from; j <= to; ++j) {
    const double s = std::ldexp(1.0, -j);
    out.emplace_back(s, f(s));
  }
  return out;
}

TEST(RateFit, SquareIsLittleOOfLinear) {
  const auto fit = rate_fit(series([](double s) { return s * s; }, 2, 16), 1.0);
  EXPECT_NEAR(fit.slope, 2.0, 1e-9);
  EXPECT_TRUE(fit.pass);
}

TEST(RateFit, LinearIsNotLittleOOfLinear) {
  const auto fit = rate_fit(series([](double s) { return s; }, 2, 16), 1.0);
  EXPECT_NEAR(fit.slope, 1.0, 1e-9);
  EXPECT_FALSE(fit.pass);
}

TEST(RateFit, LogFactorFails) {
  const auto fit = rate_fit(series([](double s) { return s * std::abs(std::log(s)); }, 2, 16), 1.0);
  EXPECT_FALSE(fit.pass);
  for (std::size_t k = 1; k < fit.normalized.size(); ++k) EXPECT_GT(fit.normalized[k], fit.normalized[k - 1]);
}

TEST(RateFit, SlopeVerdictIgnoresScaling) {
  for (double c : {1e-6, 1.0, 1e6}) {
    auto pts = series([](double s) { return s * s; }, 2, 16);
    for (auto& pt : pts) pt.second *= c;
    EXPECT_TRUE(rate_fit(pts, 1.0).slope_pass);
  }
}

TEST(RateFit, FewScalesAreDegenerate) {
  try {
    rate_fit(series([](double s) { return s; }, 1, 4), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateScales);
  }
}

TEST(WhitneyResidual, PolynomialFieldHasZeroResidual) {
  const auto cell = Cell::open(make_interval(-1.0, 1.0));
  const auto x = ExprFn::variable(1, 0);
  const auto field = taylor_field_spec(x.pow(2) - x, *cell, 2, "I");
  const std::vector<double> uc = {0.25};
  bool exact = false;
  for (const auto& r : whitney_residual(field, *cell, uc, MultiIndex({0}), {}, &exact)) EXPECT_EQ(r.R, 0.0);
  EXPECT_TRUE(exact);
}

TEST(WhitneyResidual, NextPowerGivesSquaredSeparation) {
  const auto cell = Cell::open(make_interval(-1.0, 1.0));
  const auto field = taylor_field_spec(ExprFn::variable(1, 0).pow(2), *cell, 1, "I");
  const std::vector<double> uc = {0.0};
  for (auto gen : {PairGenerator::kRadial, PairGenerator::kBall}) {
    ResidualOptions opts;
    opts.generator = gen;
    const auto samples = whitney_residual(field, *cell, uc, MultiIndex({0}), opts);
    for (const auto& r : samples) EXPECT_DOUBLE_EQ(r.R, (r.a[0] - r.b[0]) * (r.a[0] - r.b[0]));
    const auto fit = rate_fit(max_residual_per_scale(samples), 1.0);
    EXPECT_GE(fit.slope, 1.75);
    EXPECT_TRUE(fit.pass);
  }
}

TEST(WhitneyResidual, AbsAndSignAreFlagged) {
  const auto scene = load_scene(std::string(WHITNEY_SCENE_DIR) + "/defect_abs_sign.json");
  EXPECT_FALSE(check_whitney(scene).pass);
  const auto& s = scene.stratum("middle");
  const std::vector<double> uc = {0.0};
  const auto samples = whitney_residual(scene.field("middle"), *s.cell, uc, MultiIndex({1}), {});
  for (const auto& r : samples) EXPECT_DOUBLE_EQ(std::abs(r.R), 2.0);
}

TEST(FiniteDifference, SecondDerivativeOfSquare) {
  const ScalarFn f = [](std::span<const double> x) { return x[0] * x[0]; };
  const std::vector<double> x = {0.7};
  EXPECT_NEAR(finite_difference(f, MultiIndex({2}), x, 1e-2).value, 2.0, 1e-8);
}

TEST(FiniteDifference, SlopeOfCubeAtZero) {
  const ScalarFn f = [](std::span<const double> x) { return x[0] * x[0] * x[0]; };
  const std::vector<double> x = {0.0};
  EXPECT_NEAR(finite_difference(f, MultiIndex({1}), x, 1e-2).value, 0.0, 1e-10);
}

TEST(FiniteDifference, MatchesSymbolicOnRandomPolynomials) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const auto poly = oracle::random_poly(n, 4, rng);
    const auto f = oracle::to_expr(poly, n);
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    for (int k = static_cast<int>(rng.below(3)); k > 0; --k) ++a[rng.below(static_cast<std::size_t>(n))];
    const MultiIndex alpha(a);
    std::vector<double> x;
    for (int i = 0; i < n; ++i) x.push_back(rng.uniform(-1.0, 1.0));
    const ScalarFn fn = [&](std::span<const double> y) { return evaluate(f, y); };
    const double want = evaluate(differentiate(f, alpha), x);
    EXPECT_NEAR(finite_difference(fn, alpha, x, 1e-2).value, want, 1e-7 * (1.0 + std::abs(want)));
  }
}

TEST(FiniteDifference, ErrorEstimateShrinksWithStep) {
  const ScalarFn f = [](std::span<const double> x) { return 1.0 / (1.0 + x[0] * x[0]); };
  const std::vector<double> x = {0.3};
  const double coarse = finite_difference(f, MultiIndex({1}), x, 1e-1).error;
  const double fine = finite_difference(f, MultiIndex({1}), x, 5e-2).error;
  EXPECT_GE(coarse / fine, 3.0);
}

TEST(FiniteDifference, EvaluationFailureIsReported) {
  const ScalarFn f = [](std::span<const double> x) {
    if (x[0] < 0) fail(ErrorCode::kSingularPoint, "negative");
    return std::sqrt(x[0]);
  };
  const std::vector<double> x = {1e-3};
  try {
    finite_difference(f, MultiIndex({1}), x, 1e-2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStencilOutOfDomain);
  }
}

TEST(CheckExtension, EmptySceneIsVacuouslyFine) {
  Scene empty;
  const ScalarFn f = [](std::span<const double>) { return 0.0; };
  const auto rep = check_extension(f, empty);
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.strata.empty());
}

TEST(CheckExtension, VerdictStableUnderReseeding) {
  const auto scene = load_scene(std::string(WHITNEY_SCENE_DIR) + "/parabola.json");
  const auto f = extend_field(scene).as_function();
  CheckOptions a, b;
  a.samples_per_stratum = b.samples_per_stratum = 40;
  a.seed = 1;
  b.seed = 2;
  EXPECT_EQ(check_extension(f, scene, a).pass, check_extension(f, scene, b).pass);
}

TEST(CheckWhitney, CorpusFieldsSatisfyTheCondition) {
  for (const char* name : {"parabola", "square_boundary"}) {
    const auto scene = load_scene(std::string(WHITNEY_SCENE_DIR) + "/" + name + ".json");
    EXPECT_TRUE(check_whitney(scene).pass) << name;
  }
}

}  // namespace
}  // namespace whitney
