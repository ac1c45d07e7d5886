// End-to-end tests of the pharmonic command-line tool: exit codes, config
// handling, artifact layout, and reproducibility. The binary path and a
// scratch directory come in as compile definitions.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string scratch_root() {
  static const std::string root = [] {
    const std::string dir = std::string(PHARMONIC_TEST_SCRATCH) + "/cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
  }();
  return root;
}

std::string fresh_dir(const std::string& name) {
  const std::string dir = scratch_root() + "/" + name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open " << path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  REQUIRE(bool(out));
}

CliResult run_cli(const std::string& args, const std::string& tag) {
  const std::string out_file = scratch_root() + "/" + tag + ".out";
  const std::string err_file = scratch_root() + "/" + tag + ".err";
  const std::string cmd =
      std::string(PHARMONIC_BIN) + " " + args + " >" + out_file + " 2>" + err_file;
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

std::map<std::string, std::string> parse_kv(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

// Column values of a CSV with a header row; comment lines are skipped.
std::vector<std::string> csv_column(const std::string& path, const std::string& column) {
  std::istringstream in(slurp(path));
  std::string line;
  REQUIRE(std::getline(in, line));
  std::vector<std::string> header;
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) header.push_back(cell);
  std::size_t index = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == column) index = i;
  REQUIRE_MESSAGE(index < header.size(), "no column " << column << " in " << path);
  std::vector<std::string> values;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == header.size());
    values.push_back(cells[index]);
  }
  return values;
}

const std::string kQuickRun = "--set nx=8 --set ny=8 --set t_final=0.05";

}  // namespace

TEST_CASE("help and version exit cleanly") {
  CHECK(run_cli("--version", "version").exit_code == 0);
  CHECK(run_cli("--help", "help").exit_code == 0);
  CHECK(run_cli("run --help", "help_run").exit_code == 0);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("", "nosub").exit_code == 2);
  CHECK(run_cli("evolve", "badsub").exit_code == 2);
  CHECK(run_cli("denoise only_one.ppm", "missing_pos").exit_code == 2);
}

TEST_CASE("unknown and malformed settings are fatal with a helpful message") {
  const CliResult unknown = run_cli("run --set lamda=1", "unknown_key");
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("lamda") != std::string::npos);

  CHECK(run_cli("run --set tau", "no_equals").exit_code == 2);

  const CliResult bad_value = run_cli("run --set tau=fast", "bad_value");
  CHECK(bad_value.exit_code == 2);
  CHECK(bad_value.err.find("tau") != std::string::npos);

  const CliResult bad_range = run_cli("run --set delta=0", "bad_range");
  CHECK(bad_range.exit_code == 2);
  CHECK(run_cli("run --set p=0.5", "bad_p").exit_code == 2);
  CHECK(run_cli("run --set quad_degree_zero_order=3", "bad_quad").exit_code == 2);
  CHECK(run_cli("run --set preset=spiral " + kQuickRun, "bad_preset").exit_code == 2);
}

TEST_CASE("config files report offending line numbers") {
  const std::string dir = fresh_dir("config_lines");
  const std::string config = dir + "/settings.cfg";
  spit(config, "# comment\ntau = 0.01\nlamda = 1\n");
  const CliResult result = run_cli("run --config " + config, "config_line");
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("line 3") != std::string::npos);
  CHECK(result.err.find("lamda") != std::string::npos);

  spit(config, "tau 0.01\n");
  CHECK(run_cli("run --config " + config, "config_noeq").exit_code == 2);
  CHECK(run_cli("run --config " + dir + "/absent.cfg", "config_missing").exit_code == 2);
}

TEST_CASE("command-line overrides win over the config file") {
  const std::string dir = fresh_dir("precedence");
  const std::string config = dir + "/settings.cfg";
  spit(config, "tau = 0.02\nnx = 8\nny = 8\nt_final = 0.06\n");
  const CliResult result =
      run_cli("run --config " + config + " --set tau=0.03 --out " + dir + "/out", "precedence");
  REQUIRE(result.exit_code == 0);
  const auto manifest = parse_kv(dir + "/out/manifest.txt");
  CHECK(manifest.at("tau") == "0.03");
  CHECK(manifest.at("nx") == "8");
  CHECK(manifest.at("steps_taken") == "2");
  CHECK(manifest.at("config_file") == config);
  CHECK(manifest.at("config_file_hash").size() == 16);
}

TEST_CASE("runs are reproducible and the resolved config reproduces them") {
  const std::string a = fresh_dir("repro_a"), b = fresh_dir("repro_b"), c = fresh_dir("repro_c");
  const std::string args = "run --set preset=random-unit --set seed=7 " + kQuickRun + " --out ";
  REQUIRE(run_cli(args + a, "repro1").exit_code == 0);
  REQUIRE(run_cli(args + b, "repro2").exit_code == 0);
  CHECK(slurp(a + "/trace.csv") == slurp(b + "/trace.csv"));
  CHECK(slurp(a + "/final.vtk") == slurp(b + "/final.vtk"));

  // Feeding the emitted resolved config back in reproduces the run bitwise.
  REQUIRE(run_cli("run --config " + a + "/config_resolved.txt --out " + c, "repro3").exit_code ==
          0);
  CHECK(slurp(a + "/trace.csv") == slurp(c + "/trace.csv"));
}

TEST_CASE("run artifacts: trace header, snapshots, manifest bookkeeping") {
  const std::string dir = fresh_dir("artifacts");
  REQUIRE(run_cli("run " + kQuickRun + " --set vtk_every=2 --out " + dir, "artifacts").exit_code ==
          0);
  for (const char* name : {"trace.csv", "final.vtk", "manifest.txt", "config_resolved.txt",
                           "u_000000.vtk", "u_000002.vtk", "u_000004.vtk"})
    CHECK_MESSAGE(fs::exists(dir + "/" + name), name);

  const std::string trace = slurp(dir + "/trace.csv");
  CHECK(trace.rfind("step,time,e_diffusion,e_pterm,e_penalty,e_fidelity,e_total,dt_norm_sq,"
                    "cum_dissipation,constraint_l2,max_modulus,orth_defect,newton_iters\n",
                    0) == 0);

  const auto manifest = parse_kv(dir + "/manifest.txt");
  CHECK(manifest.at("command") == "run");
  CHECK(manifest.at("vtk_snapshots") == "3");
  CHECK(manifest.at("mesh_nodes") == "81");
  CHECK(manifest.at("steps_taken") == "5");
  CHECK(manifest.at("stopped_early") == "false");

  const std::string vtk = slurp(dir + "/final.vtk");
  CHECK(vtk.rfind("# vtk DataFile Version 3.0", 0) == 0);
  CHECK(vtk.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(vtk.find("VECTORS u double") != std::string::npos);
}

TEST_CASE("a Newton budget of zero exits with the convergence code") {
  const CliResult result =
      run_cli("run " + kQuickRun + " --set newton_max_iter=0 --out " + fresh_dir("nc"), "nc");
  CHECK(result.exit_code == 3);
  CHECK(result.err.find("step 1") != std::string::npos);
}

TEST_CASE("denoising a constant image is the identity and stops early") {
  const std::string dir = fresh_dir("denoise_const");
  const std::string input = dir + "/in.ppm";
  std::string raster;
  for (int i = 0; i < 8 * 8; ++i) raster += std::string(1, char(40)) + char(80) + char(200);
  spit(input, "P6\n8 8\n255\n" + raster);

  const CliResult result = run_cli(
      "denoise " + input + " " + dir + "/out.ppm --set t_final=1 --out " + dir + "/work",
      "denoise_const");
  REQUIRE(result.exit_code == 0);
  CHECK(slurp(input) == slurp(dir + "/out.ppm"));
  const auto manifest = parse_kv(dir + "/work/manifest.txt");
  CHECK(manifest.at("stopped_early") == "true");
  CHECK(manifest.at("command") == "denoise");
  CHECK(manifest.at("input_ppm_hash").size() == 16);
}

TEST_CASE("denoising failure modes map to the documented exit codes") {
  const std::string dir = fresh_dir("denoise_bad");
  CHECK(run_cli("denoise " + dir + "/nope.ppm " + dir + "/out.ppm --out " + dir, "den_missing")
            .exit_code == 4);

  const std::string thin = dir + "/thin.ppm";
  spit(thin, "P6\n2 1\n255\n" + std::string(6, char(100)));
  CHECK(run_cli("denoise " + thin + " " + dir + "/out.ppm --out " + dir, "den_thin").exit_code ==
        2);
}

TEST_CASE("denoising a noisy image decreases the unregularized objective") {
  const std::string dir = fresh_dir("denoise_noisy");
  const std::string input = dir + "/in.ppm";
  std::string raster;
  unsigned state = 123456789;  // tiny LCG; the image just has to be rough
  for (int i = 0; i < 10 * 10 * 3; ++i) {
    state = state * 1664525u + 1013904223u;
    raster += char(40 + (state >> 24) % 180);
  }
  spit(input, "P6\n10 10\n255\n" + raster);

  const CliResult result = run_cli("denoise " + input + " " + dir + "/out.ppm --set p=1 " +
                                       "--set t_final=0.2 --out " + dir + "/work",
                                   "denoise_noisy");
  REQUIRE(result.exit_code == 0);
  const auto manifest = parse_kv(dir + "/work/manifest.txt");
  CHECK(std::stod(manifest.at("j_unreg_final")) < std::stod(manifest.at("j_unreg_initial")));
}

TEST_CASE("a single-value sweep leg matches a plain run bitwise") {
  const std::string run_dir = fresh_dir("sweep_vs_run_run");
  const std::string sweep_dir = fresh_dir("sweep_vs_run_sweep");
  REQUIRE(run_cli("run " + kQuickRun + " --set tau=0.01 --out " + run_dir, "svr1").exit_code == 0);
  REQUIRE(run_cli("sweep " + kQuickRun +
                      " --set sweep_axis=tau --set sweep_values=0.01 --out " + sweep_dir,
                  "svr2")
              .exit_code == 0);
  CHECK(slurp(run_dir + "/trace.csv") == slurp(sweep_dir + "/sweep_tau_0.01/trace.csv"));
}

TEST_CASE("an eps sweep reports the p-term approaching its unregularized value") {
  const std::string dir = fresh_dir("sweep_eps");
  REQUIRE(run_cli("sweep --set sweep_axis=eps --set sweep_values=0.2,0.1,0.05 --set p=1 " +
                      kQuickRun + " --out " + dir,
                  "sweep_eps")
              .exit_code == 0);
  const auto eps_values = csv_column(dir + "/summary.csv", "value");
  const auto p_terms = csv_column(dir + "/summary.csv", "e_pterm");
  const auto unreg = csv_column(dir + "/summary.csv", "e_p_unreg");
  REQUIRE(eps_values.size() == 3);
  for (std::size_t i = 0; i < eps_values.size(); ++i) {
    const double eps = std::stod(eps_values[i]);
    const double gap = std::stod(p_terms[i]) - std::stod(unreg[i]);
    CHECK(gap >= -1e-12);          // the regularized term dominates pointwise
    CHECK(gap <= eps * 1.0 + 1e-9);  // and exceeds it by at most eps * area
  }
}

TEST_CASE("a delta sweep emits the log-log slope of the constraint violation") {
  const std::string dir = fresh_dir("sweep_delta");
  REQUIRE(run_cli("sweep --set sweep_axis=delta --set sweep_values=1e-2,1e-3 " + kQuickRun +
                      " --out " + dir,
                  "sweep_delta")
              .exit_code == 0);
  const auto manifest = parse_kv(dir + "/manifest.txt");
  const double slope = std::stod(manifest.at("delta_loglog_slope"));
  CHECK(std::isfinite(slope));
  CHECK(slurp(dir + "/summary.csv").find("# loglog_slope_constraint_vs_delta = ") !=
        std::string::npos);
  CHECK(fs::exists(dir + "/sweep_delta_0.01/manifest.txt"));
  CHECK(fs::exists(dir + "/sweep_delta_0.001/manifest.txt"));
}

TEST_CASE("sweep rejects unusable value lists") {
  const std::string dir = fresh_dir("sweep_bad");
  CHECK(run_cli("sweep --set sweep_values=0.1,0.2 --out " + dir, "sweep_unsorted").exit_code ==
        2);
  CHECK(run_cli("sweep --set sweep_values=-1 --out " + dir, "sweep_negative").exit_code == 2);
  CHECK(run_cli("sweep --out " + dir, "sweep_empty").exit_code == 2);
  CHECK(run_cli("sweep --set sweep_axis=sigma --set sweep_values=1 --out " + dir, "sweep_axis")
            .exit_code == 2);
}

TEST_CASE("the check command reports suite verdicts and honors the falsifiability hook") {
  const CliResult ok = run_cli("check", "check_ok");
  CHECK(ok.exit_code == 0);
  for (const char* suite : {"quadrature", "splitting", "gradient", "hessian"})
    CHECK_MESSAGE(ok.out.find(std::string("[ ok ] ") + suite) != std::string::npos, suite);

  const CliResult broken = run_cli("check --set check_perturb=gradient", "check_perturbed");
  CHECK(broken.exit_code == 1);
  CHECK(broken.out.find("[FAIL] gradient") != std::string::npos);
  CHECK(broken.out.find("[ ok ] quadrature") != std::string::npos);
}
