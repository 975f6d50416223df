#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "lcfgrad/errors.hpp"
#include "lcfgrad/fdcheck.hpp"
#include "lcfgrad/io.hpp"
#include "lcfgrad/solve.hpp"

namespace lcfgrad {

/// One JSON document drives every subcommand; CLI flags override single keys.
struct RunConfig {
  std::filesystem::path mesh_path;
  std::filesystem::path elastic_path;
  std::filesystem::path lcf_path;
  LoadCase load;
  QuadratureConfig quadrature;
  SolverOptions solver;
  std::vector<double> pof_times;  // cycles
  std::filesystem::path output_dir = "out";
  bool write_vtk_files = true;
  bool write_csv_files = true;
  SuiteThresholds thresholds;
  unsigned validation_seed = 20240608;
  int threads = 0;  // 0 = hardware concurrency
  bool debug_dump = false;
  bool debug_zero_adjoint = false;

  // calibrate inputs (deterministic CMB row + specimen area)
  struct Calibration {
    double sigma_f_prime = 0, eps_f_prime = 0, b = 0, c = 0, m_bar = 0, area = 0;
  };
  std::optional<Calibration> calibration;

  std::string config_hash;  // FNV-1a of the raw config bytes
  std::filesystem::path config_path;

  int effective_threads() const;
};

RunConfig read_config(const std::filesystem::path& path);

/// Exit codes shared by the commands: 0 ok, 2 config, 3 solver, 4 validation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitValidation = 4;

int cmd_solve(const RunConfig& cfg);
int cmd_pof(const RunConfig& cfg);
int cmd_sensitivity(const RunConfig& cfg);
int cmd_validate(const RunConfig& cfg);
int cmd_calibrate(const RunConfig& cfg);

/// Maps an exception to the documented exit code and prints the reason.
int run_command(const std::string& name, const RunConfig& cfg);

extern const char* kVersion;

}  // namespace lcfgrad
