#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lcfgrad/run.hpp"
#include "lcfgrad/surrogate.hpp"

using namespace lcfgrad;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes a self-contained run setup (mesh, materials, config) into dir.
fs::path write_fixture(const fs::path& dir, int threads = 1,
                       const std::string& extra = "") {
  fs::create_directories(dir);
  write_mesh_json(bent_rod_mesh(ElementKind::Hex8, 5, 2, 2), dir / "rod.json");
  write_elastic_json({70000.0, 0.3, 2.65e-9}, dir / "elastic.json");
  write_lcf_json({443.9, 0.064, 2536.0, 0.254, -0.593, -0.07, 2.0, 1.0},
                 dir / "lcf.json");
  std::ofstream cfg(dir / "config.json");
  cfg << R"({
  "mesh": "rod.json",
  "elastic": "elastic.json",
  "lcf": "lcf.json",
  "load": {"traction": {"type": "force", "total": [18.85, 0, 0]}},
  "pof_times": [1000, 2000, 4000],
  "output": {"directory": "out"},
  "calibration": {"sigma_f_prime": 487, "eps_f_prime": 0.209,
                  "b": -0.593, "c": -0.07, "m_bar": 2, "area": 377},
  "threads": )"
      << threads << extra << "\n}\n";
  return dir / "config.json";
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides and rejection") {
  const fs::path dir = fs::temp_directory_path() / "lcfgrad_run_cfg";
  const fs::path cfg_path = write_fixture(dir);
  const RunConfig cfg = read_config(cfg_path);
  CHECK(cfg.threads == 1);
  CHECK(cfg.pof_times == std::vector<double>{1000, 2000, 4000});
  CHECK(std::holds_alternative<LoadCase::ForceControlled>(cfg.load.traction));
  CHECK(!cfg.config_hash.empty());

  {
    std::ofstream bad(dir / "bad.json");
    bad << R"({"solver": {"method": "gmres"}})";
  }
  CHECK_THROWS_AS(read_config(dir / "bad.json"), ConfigError);
  {
    std::ofstream bad(dir / "bad2.json");
    bad << R"({"pof_times": [-5]})";
  }
  CHECK_THROWS_AS(read_config(dir / "bad2.json"), ConfigError);
  {
    std::ofstream bad(dir / "bad3.json");
    bad << R"({"validation": {"threshold_total": 0.0}})";
  }
  CHECK_THROWS_AS(read_config(dir / "bad3.json"), ConfigError);
  CHECK_THROWS_AS(read_config(dir / "nonexistent.json"), ConfigError);
  CHECK(run_command("frobnicate", cfg) == kExitConfig);
}

TEST_CASE("solve, pof, sensitivity and calibrate commands run end to end") {
  const fs::path dir = fs::temp_directory_path() / "lcfgrad_run_e2e";
  fs::remove_all(dir);
  RunConfig cfg = read_config(write_fixture(dir));
  cfg.debug_dump = true;

  CHECK(cmd_solve(cfg) == kExitOk);
  CHECK(fs::exists(dir / "out" / "u.csv"));
  CHECK(fs::exists(dir / "out" / "u.vtk"));
  CHECK(fs::exists(dir / "out" / "system.mtx"));
  CHECK(fs::exists(dir / "out" / "run_manifest.json"));
  CHECK(slurp(dir / "out" / "u.vtk").rfind("# vtk DataFile Version 3.0", 0) == 0);
  CHECK(slurp(dir / "out" / "system.mtx").rfind("%%MatrixMarket", 0) == 0);

  CHECK(cmd_pof(cfg) == kExitOk);
  const std::string pof_csv = slurp(dir / "out" / "pof.csv");
  CHECK(pof_csv.rfind("t,pof", 0) == 0);
  CHECK(fs::exists(dir / "out" / "intensity.vtk"));

  CHECK(cmd_sensitivity(cfg) == kExitOk);
  const std::string grad = slurp(dir / "out" / "gradient.csv");
  CHECK(grad.rfind("node,x,y,z,gx,gy,gz,gn", 0) == 0);
  CHECK(fs::exists(dir / "out" / "gradient.vtk"));

  CHECK(cmd_calibrate(cfg) == kExitOk);
  const std::string cal = slurp(dir / "out" / "calibration.csv");
  CHECK(cal.find("probabilistic") != std::string::npos);

  // zero-adjoint debug flag still runs
  cfg.debug_zero_adjoint = true;
  CHECK(cmd_sensitivity(cfg) == kExitOk);
}

TEST_CASE("zero load solves to the zero field with exit 0") {
  const fs::path dir = fs::temp_directory_path() / "lcfgrad_run_zeroload";
  fs::remove_all(dir);
  RunConfig cfg = read_config(write_fixture(dir));
  cfg.load = LoadCase{};  // no volume force, no traction
  CHECK(run_command("solve", cfg) == kExitOk);
  const std::string u = slurp(dir / "out" / "u.csv");
  // every displacement entry is exactly zero
  std::istringstream lines(u);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    const auto last = line.rfind(",0,0,0");
    CHECK(last != std::string::npos);
    CHECK(last == line.size() - 6);
  }
}

TEST_CASE("missing input files map to the config exit code") {
  const fs::path dir = fs::temp_directory_path() / "lcfgrad_run_missing";
  fs::remove_all(dir);
  RunConfig cfg = read_config(write_fixture(dir));
  cfg.mesh_path = dir / "nope.json";
  CHECK(run_command("solve", cfg) == kExitConfig);

  RunConfig no_cal = read_config(write_fixture(dir));
  no_cal.calibration.reset();
  CHECK(run_command("calibrate", no_cal) == kExitConfig);
}

TEST_CASE("solver failures map to the solver exit code") {
  const fs::path dir = fs::temp_directory_path() / "lcfgrad_run_singular";
  fs::remove_all(dir);
  // no dirichlet set: floating structure
  fs::create_directories(dir);
  Mesh rod = bent_rod_mesh(ElementKind::Hex8, 4, 2, 2);
  rod.dirichlet_nodes.clear();
  write_mesh_json(rod, dir / "rod.json");
  write_elastic_json({70000.0, 0.3, 2.65e-9}, dir / "elastic.json");
  write_lcf_json({443.9, 0.064, 2536.0, 0.254, -0.593, -0.07, 2.0, 1.0}, dir / "lcf.json");
  std::ofstream cfg(dir / "config.json");
  cfg << R"({"mesh": "rod.json", "elastic": "elastic.json", "lcf": "lcf.json",
             "load": {"traction": {"type": "fixed", "density": [12, 0, 0]}},
             "output": {"directory": "out"}})";
  cfg.close();
  CHECK(run_command("solve", read_config(dir / "config.json")) == kExitSolver);
}

TEST_CASE("validate command emits reports and exit code 0 on a sound build") {
  const fs::path dir = fs::temp_directory_path() / "lcfgrad_run_validate";
  fs::remove_all(dir);
  const RunConfig cfg = read_config(write_fixture(dir));
  CHECK(cmd_validate(cfg) == kExitOk);
  const std::string csv = slurp(dir / "out" / "fd_reports.csv");
  CHECK(csv.rfind("name,eps,fd_value,valid,analytic", 0) == 0);
  for (const char* ing : {"dJ_dU", "dJ_dX", "lam_dB_dX_u", "lam_dF_dX", "total"})
    CHECK(csv.find(ing) != std::string::npos);
}

TEST_CASE("validate exits with code 4 when a threshold is breached") {
  const fs::path dir = fs::temp_directory_path() / "lcfgrad_run_threshold";
  fs::remove_all(dir);
  // an absurdly tight total threshold cannot be met
  write_fixture(dir, 1, R"(,
  "validation": {"threshold_total": 1e-14})");
  CHECK(run_command("validate", read_config(dir / "config.json")) == kExitValidation);
}

TEST_CASE("run manifest records hash, version and wall time") {
  const fs::path dir = fs::temp_directory_path() / "lcfgrad_run_manifest";
  fs::remove_all(dir);
  const RunConfig cfg = read_config(write_fixture(dir));
  REQUIRE(cmd_calibrate(cfg) == kExitOk);
  const std::string manifest = slurp(dir / "out" / "run_manifest.json");
  CHECK(manifest.find("\"config_hash\"") != std::string::npos);
  CHECK(manifest.find(cfg.config_hash) != std::string::npos);
  CHECK(manifest.find("\"version\"") != std::string::npos);
  CHECK(manifest.find("\"wall_time_s\"") != std::string::npos);
  CHECK(manifest.find("calibration.csv") != std::string::npos);
}

TEST_CASE("CSV outputs are byte-identical across reruns and thread counts") {
  const fs::path base = fs::temp_directory_path() / "lcfgrad_run_det";
  fs::remove_all(base);
  std::vector<std::string> grads, reports;
  for (int threads : {1, 4, 12}) {
    const fs::path dir = base / ("t" + std::to_string(threads));
    RunConfig cfg = read_config(write_fixture(dir, threads));
    REQUIRE(cmd_sensitivity(cfg) == kExitOk);
    REQUIRE(cmd_validate(cfg) == kExitOk);
    grads.push_back(slurp(dir / "out" / "gradient.csv"));
    reports.push_back(slurp(dir / "out" / "fd_reports.csv"));
  }
  CHECK(grads[0] == grads[1]);
  CHECK(grads[0] == grads[2]);
  CHECK(reports[0] == reports[1]);
  CHECK(reports[0] == reports[2]);

  // rerun with the same thread count: identical again
  const fs::path dir = base / "t4b";
  RunConfig cfg = read_config(write_fixture(dir, 4));
  REQUIRE(cmd_sensitivity(cfg) == kExitOk);
  CHECK(slurp(dir / "out" / "gradient.csv") == grads[1]);
}
