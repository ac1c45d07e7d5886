// Command-line driver for the p-harmonic flow library: run a flow, denoise a
// color image, sweep a parameter axis, or run numerical self-checks.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pharmonic/errors.hpp"
#include "pharmonic/runner.hpp"
#include "pharmonic/version.hpp"

namespace {

struct CommonArgs {
  std::optional<std::string> config;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
};

void add_common(CLI::App* sub, CommonArgs& args, bool with_out) {
  sub->add_option("--config", args.config, "settings file of key = value lines");
  sub->add_option("--set", args.overrides, "override one setting, e.g. --set tau=0.005")
      ->allow_extra_args(false);
  if (with_out) sub->add_option("--out", args.out_dir, "output directory (default: out)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat flow of generalized p-harmonic maps into the unit sphere"};
  app.set_version_flag("--version", pharmonic::kVersion);
  app.require_subcommand(1);

  CommonArgs args;
  std::string input_ppm, output_ppm;

  CLI::App* run = app.add_subcommand("run", "evolve an initial field and write a trace");
  add_common(run, args, true);
  CLI::App* denoise =
      app.add_subcommand("denoise", "denoise the chromaticity of a PPM color image");
  add_common(denoise, args, true);
  denoise->add_option("input", input_ppm, "input PPM image")->required();
  denoise->add_option("output", output_ppm, "output PPM image")->required();
  CLI::App* sweep = app.add_subcommand("sweep", "run a family of flows along one parameter axis");
  add_common(sweep, args, true);
  CLI::App* check = app.add_subcommand("check", "numerical self-consistency suites");
  add_common(check, args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const pharmonic::RunSettings settings = pharmonic::load_settings(args.config, args.overrides);
    if (run->parsed()) return pharmonic::cmd_run(settings, args.out_dir);
    if (denoise->parsed())
      return pharmonic::cmd_denoise(settings, input_ppm, output_ppm, args.out_dir);
    if (sweep->parsed()) return pharmonic::cmd_sweep(settings, args.out_dir);
    return pharmonic::cmd_check(settings);
  } catch (const pharmonic::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pharmonic::NonConvergence& e) {
    std::cerr << "error: solver did not converge";
    if (e.step_index >= 0) std::cerr << " at step " << e.step_index;
    std::cerr << ": " << e.what() << "\n";
    return 3;
  } catch (const pharmonic::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
