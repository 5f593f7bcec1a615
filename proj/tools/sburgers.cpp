#include "sburgers/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

int main(int argc, char** argv) {
  CLI::App app{"Spectral Galerkin laboratory for the stochastic Burgers equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out_dir;

  for (const auto& name : sburgers::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key = value experiment file");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory (default $SBURGERS_OUT_DIR or ./sburgers-out)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sburgers::kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  if (out_dir.empty()) {
    const char* env = std::getenv("SBURGERS_OUT_DIR");
    out_dir = env && *env ? env : "sburgers-out";
  }

  std::string text;
  sburgers::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw sburgers::ConfigError("cannot open config file '" + config_path + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    std::istringstream is(text);
    cfg = sburgers::parse_run_config(is);
    if (seed) cfg.sim.master_seed = *seed;
    if (workers) cfg.sim.workers = *workers;
    cfg.sim.validate();
  } catch (const sburgers::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return sburgers::kExitConfig;
  }
  return sburgers::run_command(command, cfg, text, out_dir, std::cout);
}
