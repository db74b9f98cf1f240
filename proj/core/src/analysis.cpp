#include "qmcts/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "qmcts/errors.hpp"

namespace qmcts {

double tree_distance(std::span<const int> a, std::span<const int> b,
                     std::optional<int> period) {
  if (a.size() != b.size()) throw ContractViolation("tree distance between different lengths");
  if (period && *period < 1) throw ContractViolation("period must be >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    int d = std::abs(a[i] - b[i]);
    if (period) {
      d %= *period;
      d = std::min(d, *period - d);
    }
    sum += static_cast<double>(d) * d;
  }
  return std::sqrt(sum);
}

double run_time(const Schedule& schedule) {
  double tau = 0.0;
  for (double a : schedule.angles) tau += std::abs(a);
  return tau;
}

double approximation_ratio(const DiagonalCost& maxcut, double energy) {
  const double n_edges = maxcut.num_terms;
  const double c_max = n_edges - maxcut.ground_energy;
  if (!(c_max > 0.0)) throw ContractViolation("approximation ratio undefined: maximum cut is 0");
  if (!(energy >= 0.0 && energy <= n_edges))
    throw ContractViolation("energy outside [0, N_E]");
  return (n_edges - energy) / c_max;
}

namespace {

// Leaves under one first-turn choice, in lexicographic order (depth-first
// over options(), so exactly the leaf set).
void for_each_leaf_under(const SearchSpace& space, int first,
                         const std::function<void(std::span<const int>)>& fn) {
  const int turns = space.turns();
  std::vector<int> prefix{first};
  if (turns == 1) {
    fn(prefix);
    return;
  }
  std::vector<std::vector<int>> opts{space.options(prefix)};
  std::vector<std::size_t> pos{0};
  while (!pos.empty()) {
    const std::size_t level = pos.size() - 1;
    if (pos[level] == opts[level].size()) {
      pos.pop_back();
      opts.pop_back();
      prefix.pop_back();
      continue;
    }
    prefix.push_back(opts[level][pos[level]++]);
    if (static_cast<int>(prefix.size()) == turns) {
      fn(prefix);
      prefix.pop_back();
    } else {
      opts.push_back(space.options(prefix));
      pos.push_back(0);
    }
  }
}

}  // namespace

void for_each_leaf(const SearchSpace& space, std::uint64_t max_leaves,
                   const std::function<void(std::span<const int>)>& fn) {
  const std::uint64_t count = space.leaf_count();
  if (count > max_leaves)
    throw ResourceLimit("space has " + std::to_string(count) + " leaves, cap is " +
                        std::to_string(max_leaves));
  for (int first : space.options({})) for_each_leaf_under(space, first, fn);
}

LandscapeSummary enumerate_leaves(const DiagonalCost& cost, const SearchSpace& space,
                                  const std::function<void(const LeafRecord&)>& sink,
                                  const LandscapeOptions& options) {
  const std::uint64_t count = space.leaf_count();
  if (count > options.max_leaves)
    throw ResourceLimit("space has " + std::to_string(count) + " leaves, cap is " +
                        std::to_string(options.max_leaves));

  // Pass 1: energies per first-turn chunk.
  const auto firsts = space.options({});
  std::vector<std::vector<double>> energies(firsts.size());
  auto run_chunk = [&](std::size_t k) {
    QaoaEvaluator evaluator(cost);
    for_each_leaf_under(space, firsts[k], [&](std::span<const int> c) {
      energies[k].push_back(evaluator.energy(space.schedule(c).angles));
    });
  };
  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (std::size_t k = 0; k < firsts.size(); ++k) run_chunk(k);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < firsts.size();) run_chunk(k);
      });
    for (auto& th : pool) th.join();
  }

  LandscapeSummary summary;
  summary.optimum_energy = INFINITY;
  for (std::size_t k = 0; k < firsts.size(); ++k) summary.leaves += energies[k].size();
  if (summary.leaves != count)
    throw ContractViolation("leaf enumeration count mismatch");
  if (count == 0) return summary;

  // Optimum: first strict minimum in lexicographic order.
  std::size_t best_chunk = 0, best_pos = 0;
  for (std::size_t k = 0; k < firsts.size(); ++k)
    for (std::size_t i = 0; i < energies[k].size(); ++i)
      if (energies[k][i] < summary.optimum_energy) {
        summary.optimum_energy = energies[k][i];
        best_chunk = k;
        best_pos = i;
      }
  {
    std::size_t i = 0;
    for_each_leaf_under(space, firsts[best_chunk], [&](std::span<const int> c) {
      if (i++ == best_pos) summary.optimum.assign(c.begin(), c.end());
    });
  }

  // Pass 2: records.
  const std::optional<int> period =
      options.periodic_distance ? std::optional<int>(space.branching()) : std::nullopt;
  std::uint64_t index = 0;
  LeafRecord rec;
  for (std::size_t k = 0; k < firsts.size(); ++k) {
    std::size_t i = 0;
    for_each_leaf_under(space, firsts[k], [&](std::span<const int> c) {
      rec.leaf_index = index++;
      rec.choices.assign(c.begin(), c.end());
      rec.energy = energies[k][i++];
      rec.energy_gap = rec.energy - summary.optimum_energy;
      rec.tree_distance = tree_distance(c, summary.optimum, period);
      rec.run_time = run_time(space.schedule(c));
      sink(rec);
    });
  }
  return summary;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

LandscapeSummary write_landscape_csv(std::ostream& out, const DiagonalCost& cost,
                                     const SearchSpace& space,
                                     const LandscapeOptions& options) {
  out << "leaf_index";
  for (int t = 1; t <= space.turns(); ++t) out << ",c_" << t;
  out << ",energy,energy_gap,tree_distance,run_time\n";
  return enumerate_leaves(
      cost, space,
      [&](const LeafRecord& r) {
        out << r.leaf_index;
        for (int c : r.choices) out << ',' << c;
        out << ',' << format_number(r.energy) << ',' << format_number(r.energy_gap) << ','
            << format_number(r.tree_distance) << ',' << format_number(r.run_time) << '\n';
      },
      options);
}

Statistics summarize(std::span<const double> values) {
  if (values.empty()) throw ContractViolation("cannot summarize an empty sample");
  Statistics s;
  s.count = values.size();
  double sum = 0.0;
  s.best = values[0];
  for (double v : values) {
    sum += v;
    s.best = std::min(s.best, v);
  }
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(s.count));
  return s;
}

std::vector<SeriesPoint> aggregate(std::span<const std::pair<double, double>> samples) {
  if (samples.empty()) throw ContractViolation("cannot aggregate an empty result set");
  std::map<double, std::vector<double>> groups;
  for (const auto& [key, value] : samples) groups[key].push_back(value);
  std::vector<SeriesPoint> out;
  for (const auto& [key, values] : groups) out.push_back({key, summarize(values)});
  return out;
}

std::vector<SeriesPoint> aggregate(std::span<const GameResult> results) {
  std::vector<std::pair<double, double>> samples;
  for (const auto& r : results) samples.emplace_back(r.depth, r.energy);
  return aggregate(samples);
}

void write_series_csv(std::ostream& out, std::span<const SeriesPoint> series,
                      const std::string& key_name) {
  out << key_name << ",count,mean,std,best\n";
  for (const auto& p : series)
    out << format_number(p.key) << ',' << p.stats.count << ',' << format_number(p.stats.mean)
        << ',' << format_number(p.stats.std) << ',' << format_number(p.stats.best) << '\n';
}

}  // namespace qmcts
