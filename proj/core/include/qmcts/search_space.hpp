#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qmcts/qaoa.hpp"

namespace qmcts {

/// The discretized decision tree: 2P turns, turn t fixing angle t of the
/// interleaved sequence (gamma_1, beta_1, ..., gamma_P, beta_P) from its grid.
///
/// An unrestricted space uses the lattice k * 2pi / b on every turn and keeps
/// one representative per mirror pair theta <-> -theta (mod 2pi), since
/// F_P(-theta) = F_P(theta). A leaf c is kept when c is lexicographically
/// smaller than its mirror (-c mod b), or when it is its own mirror and
/// c_1 = 0. This leaves exactly ceil(b^{2P} / 2) leaves and confines gamma_1
/// to [0, pi].
class SearchSpace {
 public:
  /// Symmetry-halved lattice space for depth P.
  static SearchSpace unrestricted(int depth, int branching);

  /// Full product of the given per-turn grids (no halving). Grids must be
  /// non-empty, finite and non-decreasing; there must be an even number.
  static SearchSpace from_grids(std::vector<std::vector<double>> grids);

  int turns() const { return static_cast<int>(grids_.size()); }
  int depth() const { return turns() / 2; }
  const std::vector<double>& grid(int turn) const { return grids_[turn]; }
  const std::vector<std::vector<double>>& grids() const { return grids_; }
  bool mirror_halved() const { return mirror_halved_; }

  /// Largest grid size.
  int branching() const;

  /// Grid indices allowed on turn prefix.size() after the choices in
  /// `prefix`. Ascending.
  std::vector<int> options(std::span<const int> prefix) const;

  /// True when a complete choice vector is a leaf of this space.
  bool is_leaf(std::span<const int> choices) const;

  /// Number of leaves, saturating at UINT64_MAX.
  std::uint64_t leaf_count() const;

  Schedule schedule(std::span<const int> choices) const;

 private:
  std::vector<std::vector<double>> grids_;
  bool mirror_halved_ = false;
  int lattice_ = 0;  // b of the halved lattice
};

/// b evenly spaced points from `low` to `high` inclusive. b = 1 gives {low}.
std::vector<double> linspace(double low, double high, int count);

}  // namespace qmcts
