#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "swarmkin/commands.hpp"
#include "swarmkin/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"swarmkin: BDG and CL swarm dynamics on the circle"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> overrides;

  for (const char* name : {"simulate", "oracle", "hierarchy", "master", "compare"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", overrides, "key=value override (repeatable)");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  swarmkin::ExperimentConfig cfg;
  try {
    std::ifstream in(config_path);
    std::stringstream text;
    text << in.rdbuf();
    cfg = swarmkin::parse_config(text.str());
    cfg.command = swarmkin::parse_command(command);
    if (seed) cfg.master_seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    for (const auto& o : overrides) swarmkin::apply_override(cfg, o);
  } catch (const std::exception& e) {
    std::cerr << "swarmkin: " << e.what() << '\n';
    return 2;
  }

  const auto manifest = swarmkin::run_command(cfg);
  if (!manifest.ok()) {
    std::cerr << "swarmkin " << command << ": " << manifest.json["error"].get<std::string>() << '\n';
    return 1;
  }
  std::cout << manifest.json["metrics"].dump(2) << '\n';
  return 0;
}
