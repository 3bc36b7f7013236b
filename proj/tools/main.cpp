#include <CLI11.hpp>

#include "rps/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rpsim: pull-back simulation of random periodic solutions of "
               "dissipative SDEs"};
  app.require_subcommand(1);

  rps::CliOptions opts;
  std::string command;
  for (const char* name : {"simulate", "converge", "diagnose", "measure", "floquet"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "config file (key = value)")
        ->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
    sub->add_option("--seed-offset", opts.seed_offset, "offset added to every seed");
    if (std::string(name) == "converge") {
      sub->add_option("--assert-order", opts.assert_order,
                      "exit 4 unless the fitted slope is within --band of this");
      sub->add_option("--band", opts.band, "assertion half-width (default 0.1)");
    }
    sub->callback([&command, name]() { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rps::kExitConfig;
  }
  return rps::run_command(command, opts);
}
