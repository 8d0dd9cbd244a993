#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "hvp/config.hpp"
#include "hvp/dispatch.hpp"
#include "hvp/errors.hpp"

int main(int argc, char** argv) {
  if (const char* lvl = std::getenv("HVP_LOG")) {
    spdlog::set_level(spdlog::level::from_str(lvl));
  } else {
    spdlog::set_level(spdlog::level::warn);
  }

  CLI::App app{"Viscous-plastic sea-ice solver and verification harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, grid;
  std::uint64_t seed = 42;
  int threads = 1, samples = 0;
  double T = 0.0, dt = 0.0;
  bool seed_set = false;

  for (const auto& name : hvp::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "TOML configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { seed = s; seed_set = true; },
                                            "seed of randomized probes (default 42)");
    sub->add_option("--threads", threads, "worker threads for independent solves")->check(CLI::PositiveNumber);
    sub->add_option("--T", T, "final time override");
    sub->add_option("--dt", dt, "time step override");
    sub->add_option("--grid", grid, "grid override, N or NXxNY");
    sub->add_option("--samples", samples, "probe-symbol sample count override");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  hvp::RunConfig cfg;
  try {
    cfg = hvp::parse_config(config_path);
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (seed_set) cfg.seed = seed;
    cfg.threads = threads;
    if (T != 0.0) cfg.solver.T = T;
    if (dt != 0.0) cfg.solver.dt = dt;
    if (samples != 0) cfg.studies.probe_samples = samples;
    if (!grid.empty()) {
      const auto x = grid.find('x');
      cfg.grid.nx = std::stoi(grid.substr(0, x));
      cfg.grid.ny = x == std::string::npos ? cfg.grid.nx : std::stoi(grid.substr(x + 1));
    }
    hvp::validate_config(cfg);
  } catch (const std::exception& e) {
    std::cerr << "hvp: " << e.what() << "\n";
    return 1;
  }
  return hvp::dispatch(subcommand, cfg);
}
