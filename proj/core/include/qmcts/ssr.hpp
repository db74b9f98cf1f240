#pragma once

// Search-space restriction: the depth-(P+1) grids are built between
// consecutive depth-P optimal angles,
//
//   theta~_i in [theta*_{i-1} (1 - delta), theta*_i (1 + delta)],  i = 1..P+1,
//
// where theta*_0 and theta*_{P+1} are edge values, and the protocol iterates
// this from an unrestricted P = 1 game.

#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "qmcts/mcts.hpp"
#include "qmcts/search_space.hpp"

namespace qmcts {

/// delta_P per depth P (1-based). Depths past the end reuse the last value.
struct SofteningSchedule {
  std::vector<double> deltas;

  static SofteningSchedule standard();
  double at(int depth) const;
};

enum class Trend { increasing, decreasing };

/// Stand-ins for theta*_0 and theta*_{P+1}. For an increasing family the low
/// edge plays theta*_0 and the high edge theta*_{P+1}; a decreasing family
/// swaps them. With the mixer exp(-i beta X), smooth optimal schedules have
/// both families increasing (beta approaches pi from below).
struct RestrictionEdges {
  double gamma_low = 0.0;
  double gamma_high = 2.0 * std::numbers::pi;
  double beta_low = 0.0;
  double beta_high = 2.0 * std::numbers::pi;
  Trend gamma_trend = Trend::increasing;
  Trend beta_trend = Trend::increasing;
  /// Edge pinch epsilon in [0, 1): an edge value e next to optimum t becomes
  /// e + epsilon (t - e). 0 leaves the edges unrestricted.
  double pinch = 0.0;

  void validate() const;
};

/// Closed interval of one restricted grid.
struct AngleInterval {
  double low = 0.0;
  double high = 0.0;
};

/// Softened interval between two neighbouring optima: the pair is ordered,
/// then each end moves outwards by delta times its magnitude (delta * pi / b
/// when that end is exactly 0).
AngleInterval soften(double a, double b, double delta, int branching);

/// Per-turn intervals of the depth-(P+1) space built from a depth-P optimum.
std::vector<AngleInterval> restriction_intervals(const Schedule& previous, double delta,
                                                 const RestrictionEdges& edges,
                                                 int branching);

/// The depth-(P+1) search space: b evenly spaced points on each interval
/// (no mirror halving).
SearchSpace restrict_space(const Schedule& previous, double delta,
                           const RestrictionEdges& edges, int branching);

/// Runs one game on a space with a given config.
using GameRunner = std::function<GameResult(const SearchSpace&, const MctsConfig&)>;

/// GameRunner for plain MCTS on a QAOA cost.
GameRunner qaoa_game_runner(const DiagonalCost& cost);

struct IterativeOptions {
  int p_max = 1;
  MctsConfig base;
  SofteningSchedule softening = SofteningSchedule::standard();
  RestrictionEdges edges;
  /// Results for depths 1..k already available (checkpoint restart).
  std::vector<GameResult> completed;
  /// Called after every newly played depth.
  std::function<void(const GameResult&)> on_depth;
};

/// Seed used for depth P of an iterative run.
std::uint64_t depth_seed(std::uint64_t base_seed, int depth);

/// Iterative SSR-MCTS for depths 1..p_max. Depth 1 searches the
/// unrestricted halved space; depth P+1 searches restrict_space() around the
/// depth-P result. Each depth uses the base budget.
std::vector<GameResult> run_iterative(const GameRunner& runner,
                                      const IterativeOptions& options);
std::vector<GameResult> run_iterative(const DiagonalCost& cost,
                                      const IterativeOptions& options);

}  // namespace qmcts
