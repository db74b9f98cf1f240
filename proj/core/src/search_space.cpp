#include "qmcts/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qmcts/errors.hpp"

namespace qmcts {

std::vector<double> linspace(double low, double high, int count) {
  if (count < 1) throw ContractViolation("linspace needs at least one point");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = low;
    return out;
  }
  const double step = (high - low) / (count - 1);
  for (int k = 0; k < count; ++k) out[k] = low + step * k;
  out.back() = high;
  return out;
}

SearchSpace SearchSpace::unrestricted(int depth, int branching) {
  if (depth < 1) throw ConfigError("search space depth must be >= 1");
  if (branching < 2) throw ConfigError("branching factor must be >= 2");
  SearchSpace s;
  std::vector<double> lattice(branching);
  for (int k = 0; k < branching; ++k)
    lattice[k] = 2.0 * std::numbers::pi * k / branching;
  s.grids_.assign(2 * static_cast<std::size_t>(depth), lattice);
  s.mirror_halved_ = true;
  s.lattice_ = branching;
  return s;
}

SearchSpace SearchSpace::from_grids(std::vector<std::vector<double>> grids) {
  if (grids.empty() || grids.size() % 2 != 0)
    throw ConfigError("search space needs an even, non-zero number of grids");
  for (const auto& g : grids) {
    if (g.empty()) throw ConfigError("empty angle grid");
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!std::isfinite(g[k])) throw ConfigError("non-finite grid value");
      if (k > 0 && g[k] < g[k - 1]) throw ConfigError("grid not ascending");
    }
  }
  SearchSpace s;
  s.grids_ = std::move(grids);
  return s;
}

int SearchSpace::branching() const {
  std::size_t b = 0;
  for (const auto& g : grids_) b = std::max(b, g.size());
  return static_cast<int>(b);
}

namespace {

// Mirror-halving bookkeeping: whether prefix equals its own mirror.
bool self_mirrored(std::span<const int> prefix, int b) {
  return std::all_of(prefix.begin(), prefix.end(),
                     [b](int c) { return (b - c) % b == c; });
}

}  // namespace

std::vector<int> SearchSpace::options(std::span<const int> prefix) const {
  const auto turn = prefix.size();
  if (turn >= grids_.size())
    throw ContractViolation("options requested past the last turn");
  const int b = static_cast<int>(grids_[turn].size());
  std::vector<int> out;
  if (!mirror_halved_ || !self_mirrored(prefix, lattice_)) {
    out.resize(b);
    for (int c = 0; c < b; ++c) out[c] = c;
    return out;
  }
  // Still tied with the mirror image: only c <= mirror(c) keeps the leaf
  // canonical. Staying tied is allowed if a canonical leaf remains below.
  const bool last = turn + 1 == grids_.size();
  for (int c = 0; c < b; ++c) {
    const int m = (b - c) % b;
    if (c < m) {
      out.push_back(c);
    } else if (c == m) {
      const int first = turn == 0 ? c : prefix[0];
      const bool ok = last ? first == 0 : (first == 0 || b >= 3);
      if (ok) out.push_back(c);
    }
  }
  return out;
}

bool SearchSpace::is_leaf(std::span<const int> choices) const {
  if (choices.size() != grids_.size()) return false;
  for (std::size_t t = 0; t < choices.size(); ++t)
    if (choices[t] < 0 || choices[t] >= static_cast<int>(grids_[t].size()))
      return false;
  if (!mirror_halved_) return true;
  const int b = lattice_;
  for (std::size_t t = 0; t < choices.size(); ++t) {
    const int m = (b - choices[t]) % b;
    if (choices[t] < m) return true;
    if (choices[t] > m) return false;
  }
  return choices[0] == 0;  // self-mirrored leaf
}

std::uint64_t SearchSpace::leaf_count() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t count = 1;
  bool saturated = false;
  for (const auto& g : grids_) {
    if (count > kMax / g.size()) {
      saturated = true;
      break;
    }
    count *= g.size();
  }
  if (saturated) return kMax;
  if (mirror_halved_) count = count / 2 + count % 2;
  return count;
}

Schedule SearchSpace::schedule(std::span<const int> choices) const {
  if (choices.size() != grids_.size())
    throw ContractViolation("choice vector length does not match turn count");
  Schedule s;
  s.angles.resize(choices.size());
  for (std::size_t t = 0; t < choices.size(); ++t) {
    if (choices[t] < 0 || choices[t] >= static_cast<int>(grids_[t].size()))
      throw ContractViolation("grid index out of range");
    s.angles[t] = grids_[t][choices[t]];
  }
  return s;
}

}  // namespace qmcts
