// Command line front end. All numerics live behind the C API; this file only
// parses arguments, matches the config to the chosen subcommand and reports
// errors.
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapetensor.h"

namespace {

struct SubArgs {
  std::string config;
  std::string out;
  int threads = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, SubArgs& args) {
  cmd->add_option("--config", args.config, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "output directory (default: the config's output_dir)");
  cmd->add_option("--threads", args.threads, "threads for the linear algebra (default 1)");
  cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

int run(const SubArgs& args, const std::set<std::string>& experiments) {
  std::ifstream in(args.config);
  if (!in) {
    std::cerr << "cannot open config: " << args.config << "\n";
    return 1;
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  // Peek at the experiment so a config for another subcommand fails fast;
  // full validation happens inside the library.
  std::string experiment;
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.is_object() && j.contains("experiment") && j["experiment"].is_string())
      experiment = j["experiment"].get<std::string>();
  } catch (const nlohmann::json::parse_error&) {
  }
  if (!experiment.empty() && !experiments.count(experiment)) {
    std::cerr << "config experiment \"" << experiment
              << "\" does not belong to this subcommand\n";
    return 1;
  }

  st_status rc = st_run_experiment_json(text.c_str(), args.out.empty() ? nullptr : args.out.c_str(),
                                        args.threads, args.quiet ? 0 : 1);
  if (rc != ST_OK) {
    std::cerr << st_status_string(rc) << ": " << st_last_error() << "\n";
    return static_cast<int>(rc);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shape optimization by L^p best approximation of the shape tensor"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(st_version()));

  SubArgs eta_args, descent_args, volume_args, custom_args;
  CLI::App* eta = app.add_subcommand(
      "example1-eta", "Stationarity study: eta for fixed polygons and disk approximations");
  add_common(eta, eta_args);
  CLI::App* descent = app.add_subcommand(
      "descent", "Shape gradient iteration; writes history, final mesh and boundary");
  add_common(descent, descent_args);
  CLI::App* volume = app.add_subcommand(
      "example3", "Volume-constrained stationarity of disks (eta and multiplier alpha)");
  add_common(volume, volume_args);
  CLI::App* custom = app.add_subcommand("custom", "User-configured run");
  add_common(custom, custom_args);

  CLI11_PARSE(app, argc, argv);

  if (eta->parsed()) return run(eta_args, {"example1-eta"});
  if (descent->parsed()) return run(descent_args, {"example1-descent", "example2"});
  if (volume->parsed()) return run(volume_args, {"example3-volume"});
  return run(custom_args, {"custom"});
}
