#pragma once

// Reading scenes ("whitney-scene/1") and cutoff specs ("whitney-cutoffs/1")
// from JSON. Parse and schema errors raise ErrorCode::kParse with the JSON
// pointer of the offending value.

#include <filesystem>
#include <string>
#include <vector>

#include "whitney/cutoff.hpp"
#include "whitney/scene.hpp"

namespace whitney {

Scene parse_scene(const std::string& text);
Scene load_scene(const std::filesystem::path& path);

struct NamedCutoff {
  std::string name;
  CutoffSpec spec;
};

std::vector<NamedCutoff> parse_cutoff_specs(const std::string& text);
std::vector<NamedCutoff> load_cutoff_specs(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

}  // namespace whitney
