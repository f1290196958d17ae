// tvflow: batch front end for the Kirchhoff total variation flow.
//
//   tvflow solve|analytic|verify|sweep --config <path> [--out <dir>]

#include "ktv/commands.hpp"
#include "ktv/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char **argv)
{
  CLI::App app{"Kirchhoff total variation flow: solver, explicit solutions and verification"};
  app.footer(ktv::config_reference());
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  for (auto const *name : {"solve", "analytic", "verify", "sweep"}) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides the 'out' key)");
  }

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? ktv::exit_ok : ktv::exit_usage;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot read " << config_path << "\n";
    return ktv::exit_usage;
  }
  std::ostringstream text;
  text << in.rdbuf();

  ktv::RunConfig cfg;
  try {
    cfg = ktv::parse_config(text.str());
  } catch (ktv::ConfigError const &e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return ktv::exit_usage;
  }

  auto const cmd = ktv::parse_command(app.get_subcommands().front()->get_name());
  return ktv::run_command(cmd, cfg, out_dir.empty() ? cfg.out : out_dir, std::cout, std::cerr);
}
