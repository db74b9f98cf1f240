#pragma once

// MCTS combined with gradient-based local descent: descending from MCTS
// suggestions, and MCTS whose rollout reward is the energy at the bottom of
// the leaf's basin of attraction.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qmcts/mcts.hpp"
#include "qmcts/qaoa.hpp"
#include "qmcts/search_space.hpp"

namespace qmcts {

struct LocalMinimizerConfig {
  double step = 1e-5;        ///< central-difference step h (radians)
  double tolerance = 1e-6;   ///< stop when |grad| <= tolerance
  int max_iterations = 500;
  double max_step = 1.0;     ///< first trial step length of the line search

  void validate() const;
};

enum class MinimizerStop { converged, max_iterations, no_progress };
std::string to_string(MinimizerStop s);

struct MinimizeResult {
  std::vector<double> point;
  double energy = 0.0;
  double start_energy = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  long evaluations = 0;
  MinimizerStop stop = MinimizerStop::converged;
};

using ContinuousCost = std::function<double(std::span<const double>)>;

/// Central-difference gradient; 2 * dim evaluations.
std::vector<double> finite_difference_gradient(const ContinuousCost& f,
                                               std::span<const double> x, double h);

/// GSL vector_bfgs2 with central-difference gradients; `max_step` is the
/// first trial step length. The returned energy never exceeds the start
/// energy. Throws MinimizerFailure on a non-finite cost.
MinimizeResult minimize_bfgs(const ContinuousCost& f, std::vector<double> start,
                             const LocalMinimizerConfig& config);

struct LocalMinimum {
  Schedule schedule;
  double energy = 0.0;
  MinimizeResult details;
};

/// minimize_bfgs on F_P.
LocalMinimum local_minimize(const DiagonalCost& cost, const Schedule& start,
                            const LocalMinimizerConfig& config);

struct DescentRecord {
  GameResult game;          ///< raw MCTS result
  LocalMinimum descended;
};

struct HybridResult {
  Schedule schedule;
  double energy = 0.0;
  std::vector<DescentRecord> runs;  ///< one per repeat
  std::size_t best_run = 0;
  long mcts_evaluations = 0;
  long minimizer_evaluations = 0;
};

/// `repeats` unrestricted depth-P MCTS games (seeds derived from
/// config.seed and the repeat index), each followed by local_minimize from
/// the suggested schedule. The lowest descended energy wins.
HybridResult mcts_then_descend(const DiagonalCost& cost, int depth,
                               const MctsConfig& config,
                               const LocalMinimizerConfig& minimizer, int repeats);

/// Memoized basin energies keyed by leaf grid indices.
class BasinCache {
 public:
  BasinCache(ContinuousCost cost, LocalMinimizerConfig config);

  const LocalMinimum& lookup(std::span<const int> choices, std::span<const double> angles);

  std::size_t size() const { return cache_.size(); }
  long evaluations() const { return evaluations_; }
  long hits() const { return hits_; }

 private:
  ContinuousCost cost_;
  LocalMinimizerConfig config_;
  std::map<std::vector<int>, LocalMinimum> cache_;
  long evaluations_ = 0;
  long hits_ = 0;
};

struct BasinResult {
  GameResult game;  ///< schedule/energy are the minimized ones of the chosen leaf
  Schedule leaf_schedule;
  double leaf_energy = 0.0;  ///< F_P at the chosen grid point itself
  long mcts_evaluations = 0;       ///< rollouts (cached or not)
  long minimizer_evaluations = 0;  ///< cost calls inside local descents
  std::size_t distinct_leaves = 0;
};

/// MCTS where a rollout's energy is the local minimum reached from the leaf.
BasinResult basin_rollout_game(const ContinuousCost& cost, const SearchSpace& space,
                               const MctsConfig& config,
                               const LocalMinimizerConfig& minimizer);
BasinResult basin_rollout_game(const DiagonalCost& cost, const SearchSpace& space,
                               const MctsConfig& config,
                               const LocalMinimizerConfig& minimizer);

}  // namespace qmcts
