#include <CLI11.hpp>
#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"memory-constrained convex optimization lower-bound toolkit"};
  app.require_subcommand(1, 1);
  memlb::cli::Options opts;
  std::string config;
  std::uint64_t seed = 0;
  std::string out = "out";
  unsigned jobs = 1;
  app.add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();
  for (const char* name : {"gen", "run", "game", "verify", "encode", "frontier"}) {
    app.add_subcommand(name)->fallthrough();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; usage errors share the error exit code.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (!config.empty()) opts.config_path = config;
  if (*seed_opt) opts.seed = seed;
  opts.out_dir = out;
  opts.jobs = jobs;
  return memlb::cli::dispatch(app.get_subcommands().front()->get_name(), opts);
}
