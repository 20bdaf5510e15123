/**
 * @file cfiot_main.cpp
 * @brief Command-line front end: one subcommand per registered experiment
 * plus a scenario generator utility.
 */
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "cfiot/config_io.hpp"
#include "cfiot/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  std::size_t trials = 0;
  std::string out_dir;
  std::string preset = "desk";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON radio config overriding the defaults");
  cmd->add_option("--seed", args.seed, "master RNG seed");
  cmd->add_option("--trials", args.trials, "scenario count (0 = preset default)");
  cmd->add_option("--out", args.out_dir, "output directory for CSV/JSON results");
  cmd->add_option("--preset", args.preset, "desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
}

int run_one(const std::string& name, const CommonArgs& args) {
  cfiot::ExperimentSpec spec;
  spec.id = cfiot::experiment_id_from_string(name);
  spec.preset = args.preset == "paper" ? cfiot::Preset::paper : cfiot::Preset::desk;
  spec.seed = args.seed;
  spec.trials = args.trials;
  spec.out_dir = args.out_dir;
  if (!args.config_path.empty()) {
    spec.radio = cfiot::load_radio_config(args.config_path);
  }
  const cfiot::ResultTable table = cfiot::run_experiment(spec);
  std::printf("%s: %zu rate rows\n", name.c_str(), table.rows.size());
  for (const auto& [key, value] : table.scalars) {
    std::printf("  %s = %.6g\n", key.c_str(), value);
  }
  for (const auto& note : table.notes) std::printf("  note: %s\n", note.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfiot - cell-free massive MIMO IoT simulator"};
  app.set_version_flag("--version", std::string(cfiot::artifact_version()));
  app.require_subcommand(1);

  std::map<std::string, CommonArgs> args;
  for (const std::string& name : cfiot::experiment_registry()) {
    CLI::App* cmd = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(cmd, args[name]);
  }

  // scenario dump utility
  CommonArgs gen_args;
  std::size_t gen_m = 64, gen_k = 8;
  double gen_side = 500.0;
  std::string gen_out = "scenario.json";
  CLI::App* gen = app.add_subcommand("gen-scenario", "generate and dump one scenario");
  gen->add_option("--config", gen_args.config_path, "JSON radio config");
  gen->add_option("--seed", gen_args.seed, "RNG seed");
  gen->add_option("-M", gen_m, "number of APs");
  gen->add_option("-K", gen_k, "number of things");
  gen->add_option("--side", gen_side, "square side, m");
  gen->add_option("--out", gen_out, "output JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      cfiot::RadioConfig cfg;
      if (!gen_args.config_path.empty()) cfg = cfiot::load_radio_config(gen_args.config_path);
      const cfiot::Scenario scn =
          cfiot::generate_scenario(gen_m, gen_k, gen_side, cfg, gen_args.seed);
      cfiot::dump_scenario(scn, gen_out);
      std::printf("wrote %s\n", gen_out.c_str());
      return 0;
    }
    for (const std::string& name : cfiot::experiment_registry()) {
      if (app.get_subcommand(name)->parsed()) return run_one(name, args[name]);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
