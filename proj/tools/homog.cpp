#include "homog_harness/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Periodic homogenization experiments: cell problems, fiber checks and convergence sweeps"};
  app.require_subcommand(1);
  std::string config;
  homog::harness::Overrides ov;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
  for (const std::string& name : homog::harness::command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    sub->add_option("--config", config, "experiment config (key = value with [sections])")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory, overrides run.out");
    sub->add_option("--threads", threads, "worker threads, overrides run.threads and HOMOG_THREADS")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed, overrides run.seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--out")) ov.out = out;
  if (sub->count("--threads")) ov.threads = threads;
  if (sub->count("--seed")) ov.seed = seed;
  return homog::harness::run_cli(sub->get_name(), config, ov, std::cerr);
}
