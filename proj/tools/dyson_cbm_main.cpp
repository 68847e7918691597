#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dyson/cli_runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dyson-cbm: interacting Brownian particle simulators, correlation kernels and "
               "statistical verification suites"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_prefix;
  std::optional<std::string> build_id;

  const std::vector<std::string> commands = {"simulate",  "density",    "kernel",
                                             "correlate", "mgf",        "verify",
                                             "conditions", "truncation"};
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "override the RNG seed");
    sub->add_option("--workers", workers, "override the worker count");
    sub->add_option("--out", out_prefix, "output path prefix");
    sub->add_option("--build-id", build_id, "build identifier embedded in reports");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  return dyson::cli::run_from_file(command, config_path, seed, workers, out_prefix, build_id);
}
