#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace whitney::cli;
  CLI::App app{"Whitney extension engine: validate scenes, build extensions, verify them."};
  app.require_subcommand(1);

  std::string scene, artifact, report, selector, out_dir, output, checks;
  std::vector<std::string> grid;
  std::uint64_t seed = 0;
  double tol = 0;
  std::size_t samples = 0;

  auto* validate = app.add_subcommand("validate", "Structural and sampling checks of a scene");
  validate->add_option("scene", scene, "Scene file")->required();

  auto* extend = app.add_subcommand("extend", "Build the extension and sample it on a grid");
  extend->add_option("scene", scene, "Scene file")->required();
  extend->add_option("-o,--out", out_dir, "Run directory")->required();
  extend->add_option("--grid", grid, "a:b:step, once per axis or once for all axes (default +-WHITNEY_BBOX)");
  auto* seed_opt = extend->add_option("--seed", seed, "Seed (default: the scene's plan seed)");

  auto* verify = app.add_subcommand("verify", "Check an extension against its scene");
  verify->add_option("scene", scene, "Scene file")->required();
  verify->add_option("artifact", artifact, "Run directory or report.json from extend")->required();
  auto* checks_opt = verify->add_option("--checks", checks, "Comma-separated: extension,whitney");
  auto* tol_opt = verify->add_option("--tol", tol, "Relative tolerance for the agreement check");
  auto* samples_opt = verify->add_option("--samples", samples, "Samples per stratum");

  auto* plot = app.add_subcommand("plotdata", "Extract a CSV table from a run");
  plot->add_option("report", report, "Run directory or report.json")->required();
  plot->add_option("--select", selector, "extension | derivative:alpha=.. | distance | flatness:kappa=..")->required();
  plot->add_option("-o,--output", output, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(scene, std::cout);
    if (*extend) {
      ExtendArgs args{scene, out_dir, grid, std::nullopt};
      if (*seed_opt) args.seed = seed;
      return cmd_extend(args, std::cout);
    }
    if (*verify) {
      VerifyArgs args{scene, artifact, std::nullopt, std::nullopt, std::nullopt};
      if (*checks_opt) {
        std::vector<std::string> list;
        std::string item;
        for (char c : checks + ",") {
          if (c == ',') {
            if (!item.empty()) list.push_back(item);
            item.clear();
          } else {
            item += c;
          }
        }
        args.checks = list;
      }
      if (*tol_opt) args.tol = tol;
      if (*samples_opt) args.samples = samples;
      return cmd_verify(args, std::cout);
    }
    std::optional<std::filesystem::path> out;
    if (!output.empty()) out = output;
    return cmd_plotdata(report, selector, out, std::cout);
  } catch (const whitney::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEngineError;
  }
}
