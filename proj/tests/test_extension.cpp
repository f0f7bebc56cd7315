#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "whitney/error.hpp"
#include "whitney/extension.hpp"
#include "whitney/scene_io.hpp"
#include "whitney/verify.hpp"

namespace whitney {
namespace {

Scene scene(const std::string& name) { return load_scene(std::string(WHITNEY_SCENE_DIR) + "/" + name + ".json"); }

TEST(Extension, FiniteSetInterpolatesJets) {
  const auto s = scene("finite_set");
  const auto f = extend_field(s);
  const auto fn = f.as_function();
  const std::vector<double> zero = {0.0}, one = {1.0};
  EXPECT_NEAR(f.value(zero), 0.0, 1e-12);
  EXPECT_NEAR(f.value(one), 1.0, 1e-12);
  EXPECT_NEAR(finite_difference(fn, MultiIndex({1}), one, 1e-3).value, 2.0, 1e-6);
  EXPECT_NEAR(finite_difference(fn, MultiIndex({1}), zero, 1e-3).value, 0.0, 1e-6);
}

TEST(Extension, HalfLineAgreesWhereCutoffIsOne) {
  const auto s = scene("half_line");
  const auto h = extend_on_cell(s, "ray");
  const std::vector<double> two = {2.0};
  EXPECT_NEAR(h.value(two), 8.0, 1e-12);
  const std::vector<double> neg = {-0.25};
  EXPECT_EQ(h.value(neg), 0.0);
}

TEST(Extension, OnCellNeedsFlatnessDeclaration) {
  auto s = scene("half_line");
  s.flat_on.clear();
  try {
    extend_on_cell(s, "ray");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFlatnessDeclarationMissing);
  }
}

TEST(Extension, JetMatchesFiniteDifferences) {
  const auto s = scene("parabola");
  const auto f = extend_field(s);
  const auto fn = f.as_function();
  for (const std::vector<double> x : {std::vector<double>{0.3, 0.2}, std::vector<double>{0.9, 0.7}, std::vector<double>{0.1, 0.05}}) {
    const auto jet = f.jet(x, 2);
    for (std::size_t k = 0; k < jet.indices().size(); ++k) {
      const auto fd = finite_difference_adaptive(fn, jet.indices()[k], x, 1e-3);
      EXPECT_NEAR(jet.at(k), fd.value, 1e-5 * (1.0 + std::abs(fd.value))) << jet.indices()[k].to_string();
    }
  }
}

TEST(Extension, SubtractingAnExactExtensionLeavesZero) {
  const auto s = scene("parabola");
  const auto f = extend_field(s);
  const auto residual = subtract_taylor(s, f);
  double worst = 0.0;
  for (int k = 1; k < 100; ++k) {
    const std::vector<double> u = {k / 100.0};
    for (double c : residual.coeffs_at("arc", u)) worst = std::max(worst, std::abs(c));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Extension, ZeroExtensionLeavesFieldUnchanged) {
  const auto s = scene("parabola");
  const auto residual = subtract_taylor(s, ExtensionFn(2));
  const std::vector<double> u = {0.5};
  const auto c = residual.coeffs_at("arc", u);
  EXPECT_DOUBLE_EQ(c[0], 0.25);
  EXPECT_DOUBLE_EQ(c[2], 1.0);
}

class CorpusAgreement : public ::testing::TestWithParam<const char*> {};

TEST_P(CorpusAgreement, ExtensionMatchesField) {
  const auto s = scene(GetParam());
  const auto f = extend_field(s);
  const auto rep = check_extension(f.as_function(), s);
  for (const auto& st : rep.strata) EXPECT_TRUE(st.pass) << st.stratum << " max rel " << st.max_rel;
  EXPECT_LT(rep.max_rel, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Scenes, CorpusAgreement,
                         ::testing::Values("finite_set", "half_line", "parabola", "square_boundary", "full_space"));

TEST(Extension, WrongCoefficientFailsAgreement) {
  const auto s = scene("defect_wrong_coefficient");
  const auto f = extend_field(s);
  EXPECT_FALSE(check_extension(f.as_function(), s).pass);
}

TEST(Extension, MissingBoundaryIsRejected) {
  try {
    extend_field(scene("defect_missing_boundary"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStratificationInvalid);
  }
}

TEST(Flatness, PlantedIdentityIsNotFlat) {
  SetDesc Z, lambda;
  Z.pieces.push_back(Cell::point({0.0}));
  lambda.pieces.push_back(Cell::open(make_interval(0.0, kInf)));
  std::vector<std::vector<double>> seq;
  for (int j = 3; j <= 14; ++j) seq.push_back({std::ldexp(1.0, -j)});
  const ScalarFn id = [](std::span<const double> x) { return x[0]; };
  const auto rep = flatness_rate_probe(id, Z, lambda, 0.5, 1, seq);
  EXPECT_FALSE(rep.flat);
  const ScalarFn zero = [](std::span<const double>) { return 0.0; };
  EXPECT_TRUE(flatness_rate_probe(zero, Z, lambda, 0.5, 1, seq).flat);
}

TEST(Flatness, SequenceOutsideConeIsRejected) {
  SetDesc Z, lambda;
  Z.pieces.push_back(Cell::point({0.0}));
  lambda.pieces.push_back(Cell::open(make_interval(0.0, kInf)));
  const std::vector<std::vector<double>> seq = {{-0.125}};
  const ScalarFn zero = [](std::span<const double>) { return 0.0; };
  try {
    flatness_rate_probe(zero, Z, lambda, 0.5, 1, seq);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSequenceLeavesCone);
  }
}

}  // namespace
}  // namespace whitney
