#include <gtest/gtest.h>

#include <string>

#include "whitney/error.hpp"
#include "whitney/scene_io.hpp"

namespace whitney {
namespace {

std::string corpus(const std::string& name) { return std::string(WHITNEY_SCENE_DIR) + "/" + name + ".json"; }

std::string parse_error(const std::string& text) {
  try {
    parse_scene(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.what();
  }
  ADD_FAILURE() << "no parse error";
  return {};
}

TEST(SceneIo, CorpusLoadsAndValidates) {
  for (const char* name : {"finite_set", "half_line", "parabola", "square_boundary", "full_space"}) {
    const auto scene = load_scene(corpus(name));
    const auto rep = validate_scene(scene);
    EXPECT_TRUE(rep.ok()) << name << ": " << (rep.issues.empty() ? "" : rep.issues.front().message);
  }
}

TEST(SceneIo, RationalStringsAreExact) {
  const auto scene = parse_scene(R"({"schema": "whitney-scene/1", "name": "t", "n": 1, "p": 0, "q": 1,
    "strata": [{"id": "a", "dim": 0, "cell": {"type": "point", "coords": [0]}}],
    "fields": [{"stratum": "a", "coeffs": [{"alpha": [0], "f": ["const", "1/3"]}]}]})");
  EXPECT_EQ(scene.field("a").coeffs[0].constant_value(), Rational(1, 3));
}

TEST(SceneIo, ErrorsCarryAPointer) {
  const auto msg = parse_error(R"({"schema": "whitney-scene/1", "name": "t", "n": 1, "p": 0, "q": 1,
    "strata": [{"id": "a", "dim": 0, "cell": {"type": "blob"}}], "fields": []})");
  EXPECT_NE(msg.find("/strata/0/cell"), std::string::npos) << msg;
}

TEST(SceneIo, UnknownOperatorIsRejected) {
  const auto msg = parse_error(R"({"schema": "whitney-scene/1", "name": "t", "n": 1, "p": 0, "q": 1,
    "strata": [{"id": "a", "dim": 0, "cell": {"type": "point", "coords": [0]}}],
    "fields": [{"stratum": "a", "coeffs": [{"alpha": [0], "f": ["sin", ["var", 0]]}]}]})");
  EXPECT_NE(msg.find("/fields/0/coeffs/0/f"), std::string::npos) << msg;
}

TEST(SceneIo, WrongSchemaIsRejected) {
  parse_error(R"({"schema": "whitney-scene/9", "name": "t", "n": 1, "p": 0, "q": 1, "strata": [], "fields": []})");
}

TEST(SceneIo, MalformedJsonIsAParseError) { parse_error("{\"schema\": "); }

TEST(SceneIo, MissingFileNamesThePath) {
  try {
    load_scene("/nonexistent/scene.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/scene.json"), std::string::npos);
  }
}

TEST(SceneIo, EmptyStrataListFailsValidation) {
  const auto scene = parse_scene(R"({"schema": "whitney-scene/1", "name": "t", "n": 1, "p": 0, "q": 1,
    "strata": [], "fields": []})");
  EXPECT_FALSE(validate_scene(scene).ok());
}

TEST(SceneIo, MissingBoundaryIsNotClosed) {
  const auto rep = validate_scene(load_scene(corpus("defect_missing_boundary")));
  ASSERT_FALSE(rep.structurally_valid());
  bool found = false;
  for (const auto& issue : rep.issues) found = found || issue.message.find("stratification not closed") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(SceneIo, WrongCoefficientFailsSliceConsistency) {
  const auto rep = validate_scene(load_scene(corpus("defect_wrong_coefficient")));
  EXPECT_TRUE(rep.structurally_valid());
  EXPECT_FALSE(rep.ok());
}

TEST(SceneIo, CutoffSpecsLoad) {
  const auto specs = load_cutoff_specs(corpus("cutoffs"));
  ASSERT_EQ(specs.size(), 3u);
  for (const auto& s : specs) EXPECT_LE(s.spec.q, 3);
}

}  // namespace
}  // namespace whitney
