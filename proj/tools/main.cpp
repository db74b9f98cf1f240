#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "qmcts/errors.hpp"

using namespace qmcts;
using namespace qmcts::cli;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> outdir;
  std::optional<std::string> protocol;
  std::optional<int> p_max;
  std::optional<int> branching;
  std::vector<double> noise;
  std::optional<int> cycles_initial;
  std::optional<int> cycles_per_turn;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "experiment JSON config")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--outdir", o.outdir, "output root (default $QMCTS_OUTDIR or ./results)");
  cmd->add_option("--protocol", o.protocol,
                  "vanilla | sp | ssr | ssr_sp | hybrid_init | hybrid_basin");
  cmd->add_option("--p-max", o.p_max, "largest circuit depth")->check(CLI::PositiveNumber);
  cmd->add_option("--branching", o.branching, "grid points per angle")->check(CLI::PositiveNumber);
  cmd->add_option("--noise", o.noise, "noise level(s) n_s");
  cmd->add_option("--cycles-initial", o.cycles_initial, "extra cycles before the first move");
  cmd->add_option("--cycles-per-turn", o.cycles_per_turn, "cycles per move");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.outdir) c.outdir = *o.outdir;
  if (o.protocol) c.protocol = parse_protocol(*o.protocol);
  if (o.p_max) {
    c.p_max = *o.p_max;
    c.p_min = std::min(c.p_min, c.p_max);
  }
  if (o.branching) c.mcts.branching = *o.branching;
  if (!o.noise.empty()) c.noise = o.noise;
  if (o.cycles_initial) c.mcts.budget.initial = *o.cycles_initial;
  if (o.cycles_per_turn) c.mcts.budget.per_turn = *o.cycles_per_turn;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QAOA parameter search with Monte Carlo tree search", "qaoa-mcts"};
  app.require_subcommand(1);

  Overrides gen_o, run_o, land_o, noise_o, hybrid_o;
  auto* gen = app.add_subcommand("generate", "write generated instances and a manifest");
  add_common(gen, gen_o);
  auto* run = app.add_subcommand("run", "run the configured protocol over all instances");
  add_common(run, run_o);
  auto* land = app.add_subcommand("landscape", "enumerate every leaf of a search space");
  add_common(land, land_o);
  auto* noise = app.add_subcommand("noise-study", "P -> P+1 restricted games under reward noise");
  add_common(noise, noise_o);
  auto* hybrid = app.add_subcommand("hybrid", "MCTS combined with local descent");
  add_common(hybrid, hybrid_o);
  std::optional<std::string> mode;
  hybrid->add_option("--mode", mode, "init (descend from MCTS) | basin (basin rollouts)")
      ->check(CLI::IsMember({"init", "basin"}));
  auto* agg = app.add_subcommand("aggregate", "summarize results CSVs");
  std::vector<std::string> inputs;
  agg->add_option("inputs", inputs, "results-style CSV files")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      run_generate(resolve(gen_o), std::cerr);
    } else if (*run) {
      run_experiment(resolve(run_o), std::cerr);
    } else if (*land) {
      run_landscape(resolve(land_o), std::cerr);
    } else if (*noise) {
      run_noise_study(resolve(noise_o), std::cerr);
    } else if (*hybrid) {
      if (mode) hybrid_o.protocol = *mode == "basin" ? "hybrid_basin" : "hybrid_init";
      ExperimentConfig c = resolve(hybrid_o);
      if (c.protocol != Protocol::hybrid_init && c.protocol != Protocol::hybrid_basin)
        throw ConfigError("hybrid needs protocol hybrid_init or hybrid_basin");
      run_experiment(c, std::cerr);
    } else if (*agg) {
      std::vector<fs::path> paths(inputs.begin(), inputs.end());
      aggregate_csv(paths, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: parse: " << e.what() << '\n';
    return 3;
  } catch (const ResourceLimit& e) {
    std::cerr << "error: resource limit: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
