#pragma once

// Experiment orchestration behind the qaoa-mcts command line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmcts/analysis.hpp"
#include "qmcts/hybrid.hpp"
#include "qmcts/mcts.hpp"
#include "qmcts/problem.hpp"
#include "qmcts/ssr.hpp"

namespace qmcts::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum class ProblemKind { sat, maxcut };

struct GeneratorSpec {
  int count = 1;
  int n = 7;
  double alpha = 3.0;  ///< 3-SAT clause density
  int degree = 3;      ///< MaxCut regular degree
  std::uint64_t seed = 0;
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::sat;
  std::vector<fs::path> files;  ///< resolved, existing
  std::optional<GeneratorSpec> generate;
};

enum class Protocol { vanilla, sp, ssr, ssr_sp, hybrid_init, hybrid_basin };
std::string to_string(Protocol p);
Protocol parse_protocol(const std::string& s);

struct LandscapeSpec {
  int depth = 1;
  /// depth_<P>.json of a depth-(depth-1) optimum; empty = unrestricted.
  fs::path restrict_from;
  double delta = 0.0;
  std::uint64_t max_leaves = 10'000'000;
  int threads = 1;
  bool periodic_distance = false;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ProblemSpec problem;
  Protocol protocol = Protocol::ssr;
  MctsConfig mcts;                        ///< variant/final_move follow the protocol
  std::optional<FinalMove> final_move;    ///< explicit override
  int p_min = 1;
  int p_max = 1;
  SofteningSchedule softening = SofteningSchedule::standard();
  RestrictionEdges edges;
  std::vector<double> noise{0.0};
  std::vector<int> noise_steps{1};        ///< P of each P -> P+1 noise step
  int repeats = 1;
  std::uint64_t seed = 0;
  fs::path outdir;
  LocalMinimizerConfig minimizer;
  int hybrid_repeats = 10;
  LandscapeSpec landscape;
  int jobs = 1;
  bool resume = false;

  void validate() const;
};

/// Parses a config document. Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const Json& doc, const fs::path& base_dir);
ExperimentConfig load_config(const fs::path& file);

struct NamedInstance {
  std::string name;
  ProblemInstance problem;
};

std::vector<NamedInstance> load_instances(const ProblemSpec& spec);

/// MctsConfig for a protocol with the experiment's overrides applied.
MctsConfig protocol_config(const ExperimentConfig& cfg);

struct RunRecord {
  std::string instance;
  std::string protocol;
  int repeat = 0;
  double noise = 0.0;
  int depth = 0;
  std::uint64_t seed = 0;
  double energy = 0.0;
  double best_rollout_energy = 0.0;
  long n_fev = 0;
  long minimizer_fev = 0;
  double ratio = 0.0;  ///< MaxCut approximation ratio, NaN for 3-SAT
  Schedule schedule;
  std::vector<int> choices;  ///< grid indices; empty for descended schedules
};

/// Seed of one (instance, repeat, depth) run.
std::uint64_t run_seed(std::uint64_t master, std::size_t instance, int repeat, int depth);

/// Executes the configured protocol over instances x repeats, writing
/// depth_<P>.json files and results.csv / summary.csv under
/// <outdir>/<name>/. Returns the records in (instance, repeat, depth) order.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Noiseless iterative SSR up to each step's P, then P -> P+1 SSR games at
/// every noise level and repeat.
std::vector<RunRecord> run_noise_study(const ExperimentConfig& cfg, std::ostream& log);

/// Leaf CSV per instance at <outdir>/<name>/<instance>/landscape_P<d>.csv.
std::vector<LandscapeSummary> run_landscape(const ExperimentConfig& cfg, std::ostream& log);

/// Writes instance files and manifest.json into <outdir>/<name>/instances.
std::vector<fs::path> run_generate(const ExperimentConfig& cfg, std::ostream& log);

/// Groups rows of results-style CSVs (columns protocol, noise, depth, energy;
/// optional ratio) and writes a summary CSV.
void aggregate_csv(const std::vector<fs::path>& inputs, std::ostream& out);

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<RunRecord>& records);

Json to_json(const RunRecord& r);
/// Reads a depth_<P>.json record back (exact angles).
RunRecord read_record(const fs::path& file);

/// Default output root: $QMCTS_OUTDIR, else ./results.
fs::path default_outdir();

}  // namespace qmcts::cli
