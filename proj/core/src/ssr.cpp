#include "qmcts/ssr.hpp"

#include <cmath>

#include "qmcts/errors.hpp"
#include "qmcts/rng.hpp"

namespace qmcts {

SofteningSchedule SofteningSchedule::standard() {
  return {{0.0, 0.0, 0.1, 0.05, 0.04, 0.03, 0.02, 0.01, 0.01}};
}

double SofteningSchedule::at(int depth) const {
  if (depth < 1) throw ContractViolation("softening depth must be >= 1");
  if (deltas.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(depth - 1);
  return k < deltas.size() ? deltas[k] : deltas.back();
}

void RestrictionEdges::validate() const {
  if (!(gamma_low <= gamma_high) || !(beta_low <= beta_high))
    throw ConfigError("restriction edges need low <= high");
  if (!(pinch >= 0.0 && pinch < 1.0)) throw ConfigError("edge pinch must lie in [0, 1)");
}

AngleInterval soften(double a, double b, double delta, int branching) {
  if (a > b) std::swap(a, b);
  auto margin = [&](double x) {
    return x != 0.0 ? delta * std::abs(x) : delta * std::numbers::pi / branching;
  };
  if (delta == 0.0) return {a, b};
  return {a - margin(a), b + margin(b)};
}

std::vector<AngleInterval> restriction_intervals(const Schedule& previous, double delta,
                                                 const RestrictionEdges& edges,
                                                 int branching) {
  edges.validate();
  if (previous.depth() < 1) throw ContractViolation("restriction needs a depth >= 1 optimum");
  if (!(delta >= 0.0)) throw ConfigError("softening delta must be >= 0");
  for (double a : previous.angles)
    if (!std::isfinite(a)) throw ContractViolation("non-finite previous optimum");

  const int p = previous.depth();
  std::vector<AngleInterval> out(2 * static_cast<std::size_t>(p + 1));
  for (int family = 0; family < 2; ++family) {
    const bool is_gamma = family == 0;
    const Trend trend = is_gamma ? edges.gamma_trend : edges.beta_trend;
    const double low = is_gamma ? edges.gamma_low : edges.beta_low;
    const double high = is_gamma ? edges.gamma_high : edges.beta_high;
    auto optimum = [&](int i) {  // theta*_i, i = 1..p
      return is_gamma ? previous.gamma(i - 1) : previous.beta(i - 1);
    };
    double first = trend == Trend::increasing ? low : high;
    double last = trend == Trend::increasing ? high : low;
    first += edges.pinch * (optimum(1) - first);
    last += edges.pinch * (optimum(p) - last);
    // Sequence theta*_0 .. theta*_{p+1}.
    std::vector<double> seq(p + 2);
    seq[0] = first;
    for (int i = 1; i <= p; ++i) seq[i] = optimum(i);
    seq[p + 1] = last;
    for (int i = 1; i <= p + 1; ++i) {
      const bool edge = i == 1 || i == p + 1;
      // Edge bounds are hard limits; only optimum-derived ends are softened.
      AngleInterval iv = soften(seq[i - 1], seq[i], delta, branching);
      if (edge) {
        const double a = seq[i - 1], b = seq[i];
        const bool a_edge = i == 1, b_edge = i == p + 1;
        AngleInterval ordered = a <= b ? AngleInterval{a, b} : AngleInterval{b, a};
        const bool low_is_edge = (a <= b) ? a_edge : b_edge;
        const bool high_is_edge = (a <= b) ? b_edge : a_edge;
        iv.low = low_is_edge ? ordered.low : iv.low;
        iv.high = high_is_edge ? ordered.high : iv.high;
      }
      out[2 * (i - 1) + (is_gamma ? 0 : 1)] = iv;
    }
  }
  return out;
}

SearchSpace restrict_space(const Schedule& previous, double delta,
                           const RestrictionEdges& edges, int branching) {
  if (branching < 1) throw ConfigError("branching factor must be >= 1");
  auto intervals = restriction_intervals(previous, delta, edges, branching);
  std::vector<std::vector<double>> grids;
  grids.reserve(intervals.size());
  for (const auto& iv : intervals) grids.push_back(linspace(iv.low, iv.high, branching));
  return SearchSpace::from_grids(std::move(grids));
}

GameRunner qaoa_game_runner(const DiagonalCost& cost) {
  return [&cost](const SearchSpace& space, const MctsConfig& config) {
    return play_game(space, qaoa_leaf_cost(cost), config);
  };
}

std::uint64_t depth_seed(std::uint64_t base_seed, int depth) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(depth)});
}

std::vector<GameResult> run_iterative(const GameRunner& runner,
                                      const IterativeOptions& options) {
  if (options.p_max < 1) throw ConfigError("p_max must be >= 1");
  std::vector<GameResult> results = options.completed;
  if (static_cast<int>(results.size()) > options.p_max) results.resize(options.p_max);
  for (int p = static_cast<int>(results.size()) + 1; p <= options.p_max; ++p) {
    MctsConfig config = options.base;
    config.seed = depth_seed(options.base.seed, p);
    const SearchSpace space =
        p == 1 ? SearchSpace::unrestricted(1, config.branching)
               : restrict_space(results.back().schedule, options.softening.at(p),
                                options.edges, config.branching);
    GameResult r = runner(space, config);
    r.depth = p;
    if (options.on_depth) options.on_depth(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<GameResult> run_iterative(const DiagonalCost& cost,
                                      const IterativeOptions& options) {
  return run_iterative(qaoa_game_runner(cost), options);
}

}  // namespace qmcts
