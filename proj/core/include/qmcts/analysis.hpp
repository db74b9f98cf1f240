#pragma once

// Landscape and result diagnostics.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qmcts/mcts.hpp"
#include "qmcts/qaoa.hpp"
#include "qmcts/search_space.hpp"

namespace qmcts {

/// Euclidean distance between grid-index vectors. With `period` set, each
/// component difference d is replaced by min(|d|, period - |d|).
double tree_distance(std::span<const int> a, std::span<const int> b,
                     std::optional<int> period = std::nullopt);

/// tau = sum_i |gamma_i| + |beta_i|.
double run_time(const Schedule& schedule);

/// (N_E - energy) / (N_E - ground_energy) for a MaxCut diagonal.
double approximation_ratio(const DiagonalCost& maxcut, double energy);

/// Goemans-Williamson guarantee for 3-regular graphs.
inline constexpr double kGoemansWilliamsonCubic = 0.9326;

struct LeafRecord {
  std::uint64_t leaf_index = 0;  ///< position in lexicographic leaf order
  std::vector<int> choices;
  double energy = 0.0;
  double energy_gap = 0.0;     ///< energy - optimum energy
  double tree_distance = 0.0;  ///< to the optimum leaf
  double run_time = 0.0;
};

struct LandscapeOptions {
  std::uint64_t max_leaves = 10'000'000;
  bool periodic_distance = false;
  int threads = 1;
};

struct LandscapeSummary {
  std::uint64_t leaves = 0;
  std::vector<int> optimum;  ///< lowest energy, lowest lexicographic on ties
  double optimum_energy = 0.0;
};

/// Calls `fn(choices)` for every leaf of `space` in
/// lexicographic order. Throws ResourceLimit above `max_leaves`.
void for_each_leaf(const SearchSpace& space, std::uint64_t max_leaves,
                   const std::function<void(std::span<const int>)>& fn);

/// Evaluates every leaf once, then emits one record per leaf (lexicographic
/// order) referenced to the optimum. Work is split by first-turn choice
/// across `threads`; output order does not depend on the thread count.
LandscapeSummary enumerate_leaves(const DiagonalCost& cost, const SearchSpace& space,
                                  const std::function<void(const LeafRecord&)>& sink,
                                  const LandscapeOptions& options = {});

/// Streams enumerate_leaves as CSV: leaf_index,c_1..c_T,energy,energy_gap,
/// tree_distance,run_time.
LandscapeSummary write_landscape_csv(std::ostream& out, const DiagonalCost& cost,
                                     const SearchSpace& space,
                                     const LandscapeOptions& options = {});

struct Statistics {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation
  double best = 0.0; ///< minimum
};

/// Throws ContractViolation on empty input.
Statistics summarize(std::span<const double> values);

struct SeriesPoint {
  double key = 0.0;  ///< depth or noise level
  Statistics stats;
};

/// Groups (key, energy) samples by key (ascending) and summarizes each group.
std::vector<SeriesPoint> aggregate(std::span<const std::pair<double, double>> samples);

/// Per-depth series of game energies.
std::vector<SeriesPoint> aggregate(std::span<const GameResult> results);

/// CSV with header key_name,count,mean,std,best.
void write_series_csv(std::ostream& out, std::span<const SeriesPoint> series,
                      const std::string& key_name);

/// Formats with 12 significant digits.
std::string format_number(double v);

}  // namespace qmcts
