#pragma once

// The four subcommands of the `whitney` tool. Each returns the process exit
// code: 0 all PASS, 1 verification FAIL, 2 input error, 3 engine error.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "whitney/error.hpp"

namespace whitney::cli {

enum Exit : int { kPass = 0, kFail = 1, kInputError = 2, kEngineError = 3 };

int exit_code_for(ErrorCode code);

int cmd_validate(const std::filesystem::path& scene, std::ostream& out);

struct ExtendArgs {
  std::filesystem::path scene;
  std::filesystem::path out_dir;
  /// "a:b:step", one per axis or a single one for every axis.
  std::vector<std::string> grid;
  std::optional<std::uint64_t> seed;
};

int cmd_extend(const ExtendArgs& args, std::ostream& out);

struct VerifyArgs {
  std::filesystem::path scene;
  /// Run directory written by `extend`, or its report.json.
  std::filesystem::path artifact;
  std::optional<std::vector<std::string>> checks;
  std::optional<double> tol;
  std::optional<std::size_t> samples;
};

int cmd_verify(const VerifyArgs& args, std::ostream& out);

/// Selectors: "extension", "derivative:alpha=a,b,..", "distance",
/// "flatness:kappa=k" (k a total order or a comma-separated multi-index).
int cmd_plotdata(const std::filesystem::path& report, const std::string& selector,
                 const std::optional<std::filesystem::path>& output, std::ostream& out);

}  // namespace whitney::cli
