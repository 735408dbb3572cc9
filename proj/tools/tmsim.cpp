#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tmsim/cli/config.hpp"
#include "tmsim/cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Transverse-mode entanglement simulator"};
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  unsigned threads = 1;
  bool quiet = false;
  app.add_option("--config", config_path, "key = value run configuration")->required();
  auto* seed_opt = app.add_option("--seed", seed, "base seed, overrides the config");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "only report errors");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tmsim::cli::kExitConfig;
  }

  tmsim::cli::RunConfig config;
  try {
    config = tmsim::cli::load_config(config_path);
  } catch (const tmsim::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return tmsim::cli::kExitConfig;
  }
  if (*seed_opt) config.seed = seed;
  config.output_path = out_dir;
  config.threads = threads;
  config.quiet = quiet;
  return tmsim::cli::run(config, std::cout, std::cerr);
}
