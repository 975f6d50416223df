#include <CLI11.hpp>
#include <iostream>

#include "lcfgrad/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Failure-probability objective, PoF and discrete-adjoint shape "
               "gradients for LCF crack initiation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  int threads = -1;
  bool debug_dump = false;

  for (const char* name : {"solve", "pof", "sensitivity", "validate", "calibrate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_option("--output", output_dir, "output directory override");
    sub->add_flag("--debug-dump", debug_dump, "dump the assembled system (MatrixMarket)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  lcfgrad::RunConfig cfg;
  try {
    cfg = lcfgrad::read_config(config_path);
  } catch (const lcfgrad::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lcfgrad::kExitConfig;
  }
  if (threads >= 0) cfg.threads = threads;
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (debug_dump) cfg.debug_dump = true;

  return lcfgrad::run_command(command, cfg);
}
