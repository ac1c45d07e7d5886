#include "pharmonic/runner.hpp"

#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pharmonic/energy.hpp"
#include "pharmonic/errors.hpp"
#include "pharmonic/flow.hpp"
#include "pharmonic/imaging.hpp"
#include "pharmonic/mesh.hpp"
#include "pharmonic/ppm.hpp"
#include "pharmonic/presets.hpp"
#include "pharmonic/rng.hpp"
#include "pharmonic/sphere.hpp"
#include "pharmonic/trace_io.hpp"
#include "pharmonic/version.hpp"
#include "pharmonic/vtk.hpp"

namespace pharmonic {

namespace {

namespace fs = std::filesystem;
using KvList = std::vector<std::pair<std::string, std::string>>;

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::string where(int line) {
  return line > 0 ? "config line " + std::to_string(line) + ": " : "config override: ";
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, int line,
                            const char* expected) {
  throw ConfigError(where(line) + "key '" + key + "': expected " + expected + ", got '" + value +
                    "'");
}

double parse_real(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(parsed)) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    bad_value(key, value, line, "a real number");
  }
}

int parse_int(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const long parsed = std::stol(value, &used);
    if (used != value.size() || parsed < INT_MIN || parsed > INT_MAX)
      throw std::invalid_argument(value);
    return static_cast<int>(parsed);
  } catch (const std::exception&) {
    bad_value(key, value, line, "an integer");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const std::uint64_t parsed = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    bad_value(key, value, line, "an unsigned integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, line, "true or false");
}

std::vector<double> parse_real_list(const std::string& key, const std::string& value, int line) {
  std::vector<double> out;
  std::string item;
  std::istringstream stream(value);
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_value(key, value, line, "a comma-separated list of reals");
    out.push_back(parse_real(key, item, line));
  }
  return out;
}

std::string join_reals(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size) {
  std::uint64_t hash = 1469598103934665603ull;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= data[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "(unreadable)";
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size())));
  return buf;
}

class StageTimer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_ = Clock::now();
};

void write_kv_file(const std::string& path, const KvList& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::string value_tag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void apply_setting(RunSettings& s, const std::string& key, const std::string& value, int line) {
  if (key == "p") s.solver.p = parse_real(key, value, line);
  else if (key == "eps") s.solver.eps = parse_real(key, value, line);
  else if (key == "alpha") s.solver.alpha = parse_real(key, value, line);
  else if (key == "delta") s.solver.delta = parse_real(key, value, line);
  else if (key == "lambda") s.solver.lambda = parse_real(key, value, line);
  else if (key == "tau") s.solver.tau = parse_real(key, value, line);
  else if (key == "t_final") s.solver.t_final = parse_real(key, value, line);
  else if (key == "newton_tol") s.solver.newton_tol = parse_real(key, value, line);
  else if (key == "newton_max_iter") s.solver.newton_max_iter = parse_int(key, value, line);
  else if (key == "quad_degree_zero_order")
    s.solver.quad_degree_zero_order = parse_int(key, value, line);
  else if (key == "linear_solver") {
    if (value == "direct") s.solver.linear_solver = LinearSolverKind::Direct;
    else if (value == "cg") s.solver.linear_solver = LinearSolverKind::ConjugateGradient;
    else bad_value(key, value, line, "'direct' or 'cg'");
  } else if (key == "nx") s.nx = parse_int(key, value, line);
  else if (key == "ny") s.ny = parse_int(key, value, line);
  else if (key == "lx") s.lx = parse_real(key, value, line);
  else if (key == "ly") s.ly = parse_real(key, value, line);
  else if (key == "n_components") s.n_components = parse_int(key, value, line);
  else if (key == "preset") s.preset = value;
  else if (key == "g_preset") s.g_preset = value;
  else if (key == "seed") s.seed = parse_u64(key, value, line);
  else if (key == "stop_when_stationary") s.stop_when_stationary = parse_bool(key, value, line);
  else if (key == "stationarity_tol") s.stationarity_tol = parse_real(key, value, line);
  else if (key == "vtk_every") s.vtk_every = parse_int(key, value, line);
  else if (key == "sweep_axis") s.sweep_axis = value;
  else if (key == "sweep_values") s.sweep_values = parse_real_list(key, value, line);
  else if (key == "check_perturb") s.check_perturb = value;
  else throw ConfigError(where(line) + "unknown key '" + key + "'");
}

RunSettings load_settings(const std::optional<std::string>& config_path,
                          const std::vector<std::string>& overrides) {
  RunSettings s;
  if (config_path) {
    s.loaded_from = *config_path;
    std::ifstream in(*config_path);
    if (!in) throw ConfigError("cannot open config file " + *config_path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string stripped = trim(line);
      if (stripped.empty()) continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value, got '" +
                          stripped + "'");
      const std::string key = trim(stripped.substr(0, eq));
      const std::string value = trim(stripped.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": missing key before '='");
      apply_setting(s, key, value, lineno);
    }
  }
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config override '" + item + "': expected key=value");
    apply_setting(s, trim(item.substr(0, eq)), trim(item.substr(eq + 1)), 0);
  }
  validate_settings(s);
  return s;
}

void validate_settings(const RunSettings& s) {
  try {
    s.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (s.nx < 1 || s.ny < 1) throw ConfigError("config: nx and ny must be >= 1");
  if (!(s.lx > 0.0) || !(s.ly > 0.0)) throw ConfigError("config: lx and ly must be positive");
  if (s.n_components != 2 && s.n_components != 3)
    throw ConfigError("config: n_components must be 2 or 3");
  if (s.vtk_every < 0) throw ConfigError("config: vtk_every must be >= 0");
  if (!(s.stationarity_tol >= 0.0)) throw ConfigError("config: stationarity_tol must be >= 0");
  if (s.sweep_axis != "delta" && s.sweep_axis != "eps" && s.sweep_axis != "tau" &&
      s.sweep_axis != "h")
    throw ConfigError("config: sweep_axis must be one of delta, eps, tau, h");
  if (s.check_perturb != "none" && s.check_perturb != "gradient")
    throw ConfigError("config: check_perturb must be 'none' or 'gradient'");
}

std::vector<std::pair<std::string, std::string>> settings_to_pairs(const RunSettings& s) {
  KvList kv;
  kv.emplace_back("p", format_double(s.solver.p));
  kv.emplace_back("eps", format_double(s.solver.eps));
  kv.emplace_back("alpha", format_double(s.solver.alpha));
  kv.emplace_back("delta", format_double(s.solver.delta));
  kv.emplace_back("lambda", format_double(s.solver.lambda));
  kv.emplace_back("tau", format_double(s.solver.tau));
  kv.emplace_back("t_final", format_double(s.solver.t_final));
  kv.emplace_back("newton_tol", format_double(s.solver.newton_tol));
  kv.emplace_back("newton_max_iter", std::to_string(s.solver.newton_max_iter));
  kv.emplace_back("quad_degree_zero_order", std::to_string(s.solver.quad_degree_zero_order));
  kv.emplace_back("linear_solver",
                  s.solver.linear_solver == LinearSolverKind::Direct ? "direct" : "cg");
  kv.emplace_back("nx", std::to_string(s.nx));
  kv.emplace_back("ny", std::to_string(s.ny));
  kv.emplace_back("lx", format_double(s.lx));
  kv.emplace_back("ly", format_double(s.ly));
  kv.emplace_back("n_components", std::to_string(s.n_components));
  kv.emplace_back("preset", s.preset);
  kv.emplace_back("g_preset", s.g_preset);
  kv.emplace_back("seed", std::to_string(s.seed));
  kv.emplace_back("stop_when_stationary", s.stop_when_stationary ? "true" : "false");
  kv.emplace_back("stationarity_tol", format_double(s.stationarity_tol));
  kv.emplace_back("vtk_every", std::to_string(s.vtk_every));
  kv.emplace_back("sweep_axis", s.sweep_axis);
  kv.emplace_back("sweep_values", join_reals(s.sweep_values));
  kv.emplace_back("check_perturb", s.check_perturb);
  return kv;
}

namespace {

struct RunArtifacts {
  TriMesh mesh;
  NodalField g;
  FlowResult flow;
  std::string trace_path;
  std::string vtk_path;
  std::string resolved_config_path;
  int snapshots = 0;
  double setup_ms = 0.0;
  double flow_ms = 0.0;
  double io_ms = 0.0;
};

// Everything cmd_run and each sweep leg share: build inputs, run the flow,
// emit trace.csv, final.vtk, and a re-loadable resolved config.
RunArtifacts do_run(const RunSettings& s, const std::string& dir) {
  ensure_directory(dir);
  RunArtifacts art;

  const StageTimer setup;
  art.mesh = build_rect_mesh(s.nx, s.ny, s.lx, s.ly);
  const NodalField u0 = make_preset(s.preset, art.mesh, s.n_components, s.seed);
  // A preset-generated datum draws from a decorrelated seed so that
  // g_preset=random-unit does not coincide with a random-unit initial field.
  art.g = s.g_preset == "same"
              ? u0
              : make_preset(s.g_preset, art.mesh, s.n_components, s.seed ^ 0x9e3779b97f4a7c15ull);
  const ConvexSplitting splitting = ConvexSplitting::default_quartic();

  RunControl control;
  control.stop_when_stationary = s.stop_when_stationary;
  control.stationarity_tol = s.stationarity_tol;
  const auto snapshot_path = [&dir](int step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "u_%06d.vtk", step);
    return dir + "/" + buf;
  };
  if (s.vtk_every > 0) {
    write_vtk(snapshot_path(0), art.mesh, &u0, "u");
    ++art.snapshots;
    control.on_step = [&](int step, const NodalField& u) {
      if (step % s.vtk_every == 0) {
        write_vtk(snapshot_path(step), art.mesh, &u, "u");
        ++art.snapshots;
      }
    };
  }
  art.setup_ms = setup.ms();

  const StageTimer flow_timer;
  art.flow = run_flow(art.mesh, u0, art.g, s.solver, splitting, control);
  art.flow_ms = flow_timer.ms();

  const StageTimer io;
  art.trace_path = dir + "/trace.csv";
  write_trace_csv(art.trace_path, art.flow.trace);
  art.vtk_path = dir + "/final.vtk";
  write_vtk(art.vtk_path, art.mesh, &art.flow.field, "u");
  art.resolved_config_path = dir + "/config_resolved.txt";
  write_kv_file(art.resolved_config_path, settings_to_pairs(s));
  art.io_ms = io.ms();
  return art;
}

KvList manifest_header(const char* command, const RunSettings& s) {
  KvList kv;
  kv.emplace_back("command", command);
  kv.emplace_back("version", kVersion);
  kv.emplace_back("config_file", s.loaded_from.empty() ? "(none)" : s.loaded_from);
  kv.emplace_back("config_file_hash",
                  s.loaded_from.empty() ? "(none)" : file_hash_hex(s.loaded_from));
  for (auto& pair : settings_to_pairs(s)) kv.push_back(std::move(pair));
  return kv;
}

void append_run_results(KvList& kv, const RunSettings& s, const RunArtifacts& art) {
  kv.emplace_back("mesh_nodes", std::to_string(art.mesh.num_nodes()));
  kv.emplace_back("mesh_elements", std::to_string(art.mesh.num_elements()));
  kv.emplace_back("mesh_h", format_double(art.mesh.mesh_size()));
  kv.emplace_back("mesh_area", format_double(art.mesh.total_area()));
  kv.emplace_back("steps_requested", std::to_string(s.solver.num_steps()));
  kv.emplace_back("adjusted_t_final", format_double(s.solver.adjusted_t_final()));
  kv.emplace_back("steps_taken", std::to_string(art.flow.trace.steps_taken()));
  kv.emplace_back("stopped_early", art.flow.trace.stopped_early ? "true" : "false");
  kv.emplace_back("trace_csv", art.trace_path);
  kv.emplace_back("final_vtk", art.vtk_path);
  kv.emplace_back("config_resolved", art.resolved_config_path);
  kv.emplace_back("vtk_snapshots", std::to_string(art.snapshots));

  const TraceRow& last = art.flow.trace.rows.back();
  kv.emplace_back("final_e_diffusion", format_double(last.energy.diffusion));
  kv.emplace_back("final_e_pterm", format_double(last.energy.p_term));
  kv.emplace_back("final_e_penalty", format_double(last.energy.penalty));
  kv.emplace_back("final_e_fidelity", format_double(last.energy.fidelity));
  kv.emplace_back("final_e_total", format_double(last.energy.total));
  kv.emplace_back("final_constraint_l2", format_double(last.constraint_l2));
  kv.emplace_back("final_scaled_constraint",
                  format_double(last.constraint_l2 / std::sqrt(s.solver.delta)));
  kv.emplace_back("final_max_modulus", format_double(last.max_modulus));
  kv.emplace_back("cum_dissipation", format_double(last.cum_dissipation));
  kv.emplace_back("j_unreg_final", format_double(total_energy_unregularized(
                                       art.mesh, art.flow.field, art.g, s.solver)));
  kv.emplace_back("wall_ms_setup", format_double(art.setup_ms));
  kv.emplace_back("wall_ms_flow", format_double(art.flow_ms));
  kv.emplace_back("wall_ms_io", format_double(art.io_ms));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

}  // namespace

int cmd_run(const RunSettings& s, const std::string& out_dir) {
  const RunArtifacts art = do_run(s, out_dir);

  KvList kv = manifest_header("run", s);
  append_run_results(kv, s, art);
  write_kv_file(out_dir + "/manifest.txt", kv);

  const TraceRow& last = art.flow.trace.rows.back();
  std::cout << "run: " << s.nx << "x" << s.ny << " mesh, " << art.mesh.num_nodes()
            << " nodes, p = " << format_double(s.solver.p) << ", " << art.flow.trace.steps_taken()
            << " steps" << (art.flow.trace.stopped_early ? " (stopped early)" : "") << "\n"
            << "run: final total energy " << format_double(last.energy.total)
            << ", constraint L2 " << format_double(last.constraint_l2) << "\n"
            << "run: wrote " << art.trace_path << "\n";
  return 0;
}

int cmd_denoise(const RunSettings& s, const std::string& input_ppm, const std::string& output_ppm,
                const std::string& out_dir) {
  ensure_directory(out_dir);

  const StageTimer setup;
  const RgbImage input = read_ppm(input_ppm);
  const ChromaImage observed = decompose(input);
  const ImageFieldBundle bundle = image_to_field(observed);
  const ConvexSplitting splitting = ConvexSplitting::default_quartic();
  const double j_initial =
      total_energy_unregularized(bundle.mesh, bundle.u0, bundle.g, s.solver);
  const double setup_ms = setup.ms();

  // Denoising always uses the stationarity early stop; the threshold comes
  // from the settings.
  RunControl control;
  control.stop_when_stationary = true;
  control.stationarity_tol = s.stationarity_tol;

  const StageTimer flow_timer;
  const FlowResult flow = run_flow(bundle.mesh, bundle.u0, bundle.g, s.solver, splitting, control);
  const double flow_ms = flow_timer.ms();
  const double j_final = total_energy_unregularized(bundle.mesh, flow.field, bundle.g, s.solver);

  const StageTimer io;
  const ChromaImage denoised = field_to_chroma(flow.field, bundle.mesh, observed.width,
                                               observed.height, observed.brightness);
  const RecomposeResult recomposed = recompose(denoised);
  write_ppm(output_ppm, recomposed.image, PpmFormat::P6);
  const std::string trace_path = out_dir + "/trace.csv";
  write_trace_csv(trace_path, flow.trace);
  write_kv_file(out_dir + "/config_resolved.txt", settings_to_pairs(s));
  const double io_ms = io.ms();

  KvList kv = manifest_header("denoise", s);
  kv.emplace_back("input_ppm", input_ppm);
  kv.emplace_back("input_ppm_hash", file_hash_hex(input_ppm));
  kv.emplace_back("image_width", std::to_string(observed.width));
  kv.emplace_back("image_height", std::to_string(observed.height));
  kv.emplace_back("decompose_fallbacks", std::to_string(observed.fallback_count));
  kv.emplace_back("steps_requested", std::to_string(s.solver.num_steps()));
  kv.emplace_back("adjusted_t_final", format_double(s.solver.adjusted_t_final()));
  kv.emplace_back("steps_taken", std::to_string(flow.trace.steps_taken()));
  kv.emplace_back("stopped_early", flow.trace.stopped_early ? "true" : "false");
  kv.emplace_back("output_ppm", output_ppm);
  kv.emplace_back("output_ppm_hash", file_hash_hex(output_ppm));
  kv.emplace_back("trace_csv", trace_path);
  kv.emplace_back("config_resolved", out_dir + "/config_resolved.txt");
  kv.emplace_back("projection_fallbacks", std::to_string(denoised.fallback_count));
  kv.emplace_back("clamped_channels", std::to_string(recomposed.clamp_count));
  kv.emplace_back("j_unreg_initial", format_double(j_initial));
  kv.emplace_back("j_unreg_final", format_double(j_final));
  kv.emplace_back("final_constraint_l2",
                  format_double(flow.trace.rows.back().constraint_l2));
  kv.emplace_back("wall_ms_setup", format_double(setup_ms));
  kv.emplace_back("wall_ms_flow", format_double(flow_ms));
  kv.emplace_back("wall_ms_io", format_double(io_ms));
  write_kv_file(out_dir + "/manifest.txt", kv);

  std::cout << "denoise: " << observed.width << "x" << observed.height << " image, "
            << flow.trace.steps_taken() << " steps"
            << (flow.trace.stopped_early ? " (stopped early)" : "") << "\n"
            << "denoise: unregularized J initial " << format_double(j_initial) << ", final "
            << format_double(j_final) << "\n"
            << "denoise: wrote " << output_ppm << "\n";
  return 0;
}

int cmd_sweep(const RunSettings& s, const std::string& out_dir) {
  if (s.sweep_values.empty())
    throw ConfigError("sweep: sweep_values must be a nonempty descending list of positive reals");
  for (std::size_t i = 0; i < s.sweep_values.size(); ++i) {
    if (!(s.sweep_values[i] > 0.0))
      throw ConfigError("sweep: values must be positive, got " +
                        format_double(s.sweep_values[i]));
    if (i > 0 && !(s.sweep_values[i] < s.sweep_values[i - 1]))
      throw ConfigError("sweep: values must be sorted strictly descending");
  }
  ensure_directory(out_dir);

  const StageTimer total_timer;
  std::string summary =
      "axis,value,nx,ny,tau,steps,e_diffusion,e_pterm,e_penalty,e_fidelity,e_total,"
      "e_p_unreg,e_unreg_total,cum_dissipation,constraint_l2,scaled_constraint,max_modulus\n";
  std::vector<double> terminal_violation;
  std::vector<std::string> run_dirs;

  for (const double value : s.sweep_values) {
    RunSettings leg = s;
    if (s.sweep_axis == "delta") leg.solver.delta = value;
    else if (s.sweep_axis == "eps") leg.solver.eps = value;
    else if (s.sweep_axis == "tau") leg.solver.tau = value;
    else {  // h axis: value is the target grid spacing
      leg.nx = std::max(1, static_cast<int>(std::llround(s.lx / value)));
      leg.ny = std::max(1, static_cast<int>(std::llround(s.ly / value)));
    }
    const std::string dir = out_dir + "/sweep_" + s.sweep_axis + "_" + value_tag(value);
    run_dirs.push_back(dir);

    RunArtifacts art;
    try {
      art = do_run(leg, dir);
    } catch (const NonConvergence& e) {
      NonConvergence annotated("sweep " + s.sweep_axis + " = " + value_tag(value) + ": " +
                                   e.what(),
                               e.iterations, e.residual);
      annotated.step_index = e.step_index;
      throw annotated;
    }

    KvList kv = manifest_header("sweep-run", leg);
    kv.emplace_back("sweep_value", format_double(value));
    append_run_results(kv, leg, art);
    write_kv_file(dir + "/manifest.txt", kv);

    // E_p alone (lambda = 0 copy) and the full unregularized objective.
    SolverConfig no_fid = leg.solver;
    no_fid.lambda = 0.0;
    const double e_p_unreg =
        total_energy_unregularized(art.mesh, art.flow.field, art.g, no_fid);
    const double e_unreg =
        total_energy_unregularized(art.mesh, art.flow.field, art.g, leg.solver);
    const TraceRow& last = art.flow.trace.rows.back();
    terminal_violation.push_back(last.constraint_l2);

    summary += s.sweep_axis;
    summary += ',';
    summary += format_double(value);
    summary += ',';
    summary += std::to_string(leg.nx);
    summary += ',';
    summary += std::to_string(leg.ny);
    summary += ',';
    summary += format_double(leg.solver.tau);
    summary += ',';
    summary += std::to_string(art.flow.trace.steps_taken());
    summary += ',';
    summary += format_double(last.energy.diffusion);
    summary += ',';
    summary += format_double(last.energy.p_term);
    summary += ',';
    summary += format_double(last.energy.penalty);
    summary += ',';
    summary += format_double(last.energy.fidelity);
    summary += ',';
    summary += format_double(last.energy.total);
    summary += ',';
    summary += format_double(e_p_unreg);
    summary += ',';
    summary += format_double(e_unreg);
    summary += ',';
    summary += format_double(last.cum_dissipation);
    summary += ',';
    summary += format_double(last.constraint_l2);
    summary += ',';
    summary += format_double(last.constraint_l2 / std::sqrt(leg.solver.delta));
    summary += ',';
    summary += format_double(last.max_modulus);
    summary += '\n';

    std::cout << "sweep: " << s.sweep_axis << " = " << value_tag(value) << " done, constraint L2 "
              << format_double(last.constraint_l2) << "\n";
  }

  double slope = std::numeric_limits<double>::quiet_NaN();
  if (s.sweep_axis == "delta" && s.sweep_values.size() >= 2) {
    slope = loglog_slope(s.sweep_values, terminal_violation);
    summary += "# loglog_slope_constraint_vs_delta = " + format_double(slope) + "\n";
    std::cout << "sweep: log-log slope of constraint L2 vs delta = " << format_double(slope)
              << "\n";
  }

  const std::string summary_path = out_dir + "/summary.csv";
  {
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + summary_path + " for writing");
    out << summary;
    out.flush();
    if (!out) throw IoError("write failed for " + summary_path);
  }

  KvList kv = manifest_header("sweep", s);
  kv.emplace_back("summary_csv", summary_path);
  kv.emplace_back("runs", std::to_string(s.sweep_values.size()));
  for (std::size_t i = 0; i < run_dirs.size(); ++i)
    kv.emplace_back("run_dir_" + std::to_string(i), run_dirs[i]);
  if (s.sweep_axis == "delta")
    kv.emplace_back("delta_loglog_slope", format_double(slope));
  kv.emplace_back("wall_ms_total", format_double(total_timer.ms()));
  write_kv_file(out_dir + "/manifest.txt", kv);

  std::cout << "sweep: wrote " << summary_path << "\n";
  return 0;
}

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

bool suite_quadrature(const RunSettings&, std::string& detail) {
  double worst = 0.0;
  for (const int degree : {1, 2, 4}) {
    const QuadratureRule& rule = quadrature_rule(degree);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    if (std::abs(wsum - 1.0) > 1e-14) {
      detail = "degree " + std::to_string(degree) + " weights sum to " + format_double(wsum);
      return false;
    }
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        // int_T x^a y^b over the reference triangle = a! b! / (a + b + 2)!
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        double approx = 0.0;
        for (int q = 0; q < rule.num_points(); ++q)
          approx += rule.weights[q] * std::pow(rule.points[q][1], a) *
                    std::pow(rule.points[q][2], b);
        approx *= 0.5;  // reference triangle area
        const double err = std::abs(approx - exact);
        worst = std::max(worst, err);
        if (err > 1e-14) {
          detail = "degree " + std::to_string(degree) + " monomial x^" + std::to_string(a) +
                   " y^" + std::to_string(b) + " error " + format_double(err);
          return false;
        }
      }
  }
  detail = "worst monomial error " + format_double(worst);
  return true;
}

bool suite_splitting(const RunSettings&, std::string& detail) {
  const ConvexSplitting sp = ConvexSplitting::default_quartic();
  Rng rng(314159);
  const auto draw = [&rng]() {
    Eigen::VectorXd v(3);
    for (int c = 0; c < 3; ++c) v[c] = 4.0 * rng.uniform() - 2.0;
    return v;
  };
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::VectorXd v = draw();
    const double err = std::abs(sp.w_plus(v) - sp.w_minus(v) - penalty_density(v));
    worst = std::max(worst, err);
    if (err > 1e-12) {
      detail = "identity error " + format_double(err);
      return false;
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd a = draw(), b = draw();
    const Eigen::VectorXd mid = 0.5 * (a + b);
    if (sp.w_plus(mid) > 0.5 * (sp.w_plus(a) + sp.w_plus(b)) + 1e-12 ||
        sp.w_minus(mid) > 0.5 * (sp.w_minus(a) + sp.w_minus(b)) + 1e-12) {
      detail = "midpoint convexity violated";
      return false;
    }
  }
  detail = "identity worst error " + format_double(worst);
  return true;
}

struct CheckProblem {
  TriMesh mesh;
  NodalField u, u_prev, g;
  SolverConfig config;
  ConvexSplitting splitting = ConvexSplitting::default_quartic();
};

CheckProblem draw_problem(Rng& rng, double p) {
  CheckProblem prob;
  prob.mesh = build_rect_mesh(1, 1);
  const int n = 3;
  prob.u = NodalField(prob.mesh.num_nodes(), n);
  prob.u_prev = NodalField(prob.mesh.num_nodes(), n);
  prob.g = NodalField(prob.mesh.num_nodes(), n);
  for (NodalField* f : {&prob.u, &prob.u_prev, &prob.g})
    for (Eigen::Index i = 0; i < f->values.size(); ++i)
      f->values[i] = 2.4 * rng.uniform() - 1.2;
  prob.config.p = p;
  prob.config.eps = 0.1;
  prob.config.delta = 0.5;
  prob.config.lambda = 0.7;
  prob.config.tau = 0.2;
  prob.config.t_final = 0.2;
  return prob;
}

bool suite_gradient(const RunSettings& s, std::string& detail) {
  Rng rng(20240817);
  double worst = 0.0;
  for (const double p : {1.0, 1.3, 2.0, 3.7}) {
    for (int draw = 0; draw < 25; ++draw) {
      CheckProblem prob = draw_problem(rng, p);
      Eigen::VectorXd analytic =
          gk_gradient(prob.mesh, prob.u, prob.u_prev, prob.g, prob.config, prob.splitting);
      if (s.check_perturb == "gradient") analytic[0] += 1e-3;
      Eigen::VectorXd fd(analytic.size());
      const double h = 1e-6;
      NodalField mod = prob.u;
      for (Eigen::Index i = 0; i < analytic.size(); ++i) {
        const double saved = mod.values[i];
        mod.values[i] = saved + h;
        const double plus = gk_value(prob.mesh, mod, prob.u_prev, prob.g, prob.config,
                                     prob.splitting);
        mod.values[i] = saved - h;
        const double minus = gk_value(prob.mesh, mod, prob.u_prev, prob.g, prob.config,
                                      prob.splitting);
        mod.values[i] = saved;
        fd[i] = (plus - minus) / (2.0 * h);
      }
      const double rel = (analytic - fd).norm() / std::max(1.0, fd.norm());
      worst = std::max(worst, rel);
      if (rel > 1e-6) {
        detail = "p = " + format_double(p) + ", draw " + std::to_string(draw) +
                 ": relative error " + format_double(rel);
        return false;
      }
    }
  }
  detail = "100 draws, worst relative error " + format_double(worst);
  return true;
}

bool suite_hessian(const RunSettings&, std::string& detail) {
  Rng rng(790331);
  double worst = 0.0;
  for (const double p : {1.0, 1.3, 2.0, 3.7}) {
    for (int draw = 0; draw < 10; ++draw) {
      CheckProblem prob = draw_problem(rng, p);
      const Eigen::SparseMatrix<double> hess =
          gk_hessian(prob.mesh, prob.u, prob.u_prev, prob.g, prob.config, prob.splitting);
      Eigen::VectorXd dir(prob.u.values.size());
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = 2.0 * rng.uniform() - 1.0;
      dir.normalize();
      const double h = 1e-6;
      NodalField mod = prob.u;
      mod.values = prob.u.values + h * dir;
      const Eigen::VectorXd plus =
          gk_gradient(prob.mesh, mod, prob.u_prev, prob.g, prob.config, prob.splitting);
      mod.values = prob.u.values - h * dir;
      const Eigen::VectorXd minus =
          gk_gradient(prob.mesh, mod, prob.u_prev, prob.g, prob.config, prob.splitting);
      const Eigen::VectorXd fd = (plus - minus) / (2.0 * h);
      const Eigen::VectorXd hv = hess * dir;
      const double rel = (hv - fd).norm() / std::max(1.0, fd.norm());
      worst = std::max(worst, rel);
      if (rel > 1e-5) {
        detail = "p = " + format_double(p) + ", draw " + std::to_string(draw) +
                 ": relative error " + format_double(rel);
        return false;
      }
    }
  }
  detail = "40 products, worst relative error " + format_double(worst);
  return true;
}

}  // namespace

int cmd_check(const RunSettings& s) {
  struct Suite {
    const char* name;
    bool (*fn)(const RunSettings&, std::string&);
  };
  const Suite suites[] = {
      {"quadrature", suite_quadrature},
      {"splitting", suite_splitting},
      {"gradient", suite_gradient},
      {"hessian", suite_hessian},
  };
  bool all_ok = true;
  for (const Suite& suite : suites) {
    std::string detail;
    const bool ok = suite.fn(s, detail);
    all_ok = all_ok && ok;
    std::cout << (ok ? "[ ok ] " : "[FAIL] ") << suite.name << ": " << detail << "\n";
  }
  std::cout << (all_ok ? "check: all suites passed\n" : "check: FAILURE\n");
  return all_ok ? 0 : 1;
}

}  // namespace pharmonic
