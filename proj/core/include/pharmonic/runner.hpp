#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pharmonic/config.hpp"

namespace pharmonic {

/// Fully resolved run settings: model parameters plus mesh, initial-data, and
/// output knobs. The field defaults are the CLI defaults; a config file and
/// then command-line overrides are applied on top (later wins).
struct RunSettings {
  SolverConfig solver;

  int nx = 32;
  int ny = 32;
  double lx = 1.0;
  double ly = 1.0;
  int n_components = 3;
  std::string preset = "smoothed-vortex";
  std::string g_preset = "same";  // "same" reuses the initial field as data
  std::uint64_t seed = 1;

  bool stop_when_stationary = false;  // cmd_run only; denoise always stops early
  double stationarity_tol = 1e-6;
  int vtk_every = 0;  // snapshot period in steps; 0 disables snapshots

  std::string sweep_axis = "delta";  // one of delta, eps, tau, h
  std::vector<double> sweep_values;

  std::string check_perturb = "none";  // falsifiability hook: "gradient"

  /// Path of the config file these settings came from ("" when none). Not a
  /// settable key; recorded in manifests for provenance.
  std::string loaded_from;
};

/// Apply one key=value setting. `line` > 0 reports a config-file line number
/// in errors; 0 marks a command-line override. Unknown keys and malformed
/// values throw ConfigError.
void apply_setting(RunSettings& settings, const std::string& key, const std::string& value,
                   int line);

/// Defaults, then the config file (if given), then overrides of the form
/// "key=value". The result is validated; all failures throw ConfigError.
RunSettings load_settings(const std::optional<std::string>& config_path,
                          const std::vector<std::string>& overrides);

/// Throws ConfigError on out-of-range or inconsistent settings.
void validate_settings(const RunSettings& settings);

/// The resolved settings as ordered key/value text. Values round-trip: feeding
/// them back through apply_setting reproduces the run bit-identically.
std::vector<std::pair<std::string, std::string>> settings_to_pairs(const RunSettings& settings);

/// Flow run: trace.csv, final.vtk, optional u_NNNNNN.vtk snapshots, and
/// manifest.txt under out_dir. Returns 0; failures throw.
int cmd_run(const RunSettings& settings, const std::string& out_dir);

/// Chromaticity denoising pipeline: reads input_ppm, evolves the chroma field,
/// writes output_ppm plus trace.csv and manifest.txt under out_dir.
int cmd_denoise(const RunSettings& settings, const std::string& input_ppm,
                const std::string& output_ppm, const std::string& out_dir);

/// One run per sweep value (all else fixed) in per-value subdirectories, plus
/// summary.csv and manifest.txt under out_dir. The delta axis also reports the
/// log-log slope of the terminal constraint violation against delta.
int cmd_sweep(const RunSettings& settings, const std::string& out_dir);

/// Numerical self-consistency suites (quadrature exactness, convex-splitting
/// identity, gradient and Hessian finite-difference checks) on fixed seeds.
/// Prints one verdict line per suite; returns 0 iff all pass.
int cmd_check(const RunSettings& settings);

}  // namespace pharmonic
