#pragma once

// Monte Carlo Tree Search over a SearchSpace.
//
// One cycle = selection (UCT) -> expansion (one random unexpanded child) ->
// rollout (uniform random choices down to a leaf, one cost evaluation) ->
// backpropagation (n += 1, w += reward on the path up to the current root).
// Rewards are r = exp(-nu * F), optionally with Gaussian noise added to F.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qmcts/qaoa.hpp"
#include "qmcts/rng.hpp"
#include "qmcts/search_space.hpp"

namespace qmcts {

enum class Variant { vanilla, single_player };
enum class FinalMove { max_child, robust_child, best_path };

std::string to_string(Variant v);
std::string to_string(FinalMove f);
Variant parse_variant(const std::string& s);
FinalMove parse_final_move(const std::string& s);

/// Cycles per turn: turn 1 gets initial + per_turn, turns 2..T-1 get
/// per_turn, and the final turn gets none. Total = initial + per_turn (T-1).
struct CycleBudget {
  int initial = 1000;
  int per_turn = 800;

  int for_turn(int turn, int turns) const;
  long total(int turns) const;
};

struct MctsConfig {
  double exploration = std::numbers::sqrt2;  ///< C
  double nu = 0.5;                           ///< reward exponent
  int branching = 30;                        ///< b
  CycleBudget budget;
  double noise_sigma = 0.0;                  ///< n_s
  Variant variant = Variant::vanilla;
  FinalMove final_move = FinalMove::max_child;
  bool reuse_subtree = true;
  std::uint64_t seed = 0;

  /// Default protocol settings for a variant; single-player commits along the
  /// best memorized path.
  static MctsConfig defaults(Variant variant);

  /// Throws ConfigError. `turns` = 2P, `max_options` = widest grid.
  void validate(int turns, int max_options) const;
};

/// exp(-nu * energy).
double reward(double energy, double nu);

/// energy + N(0, sigma). sigma = 0 is the identity and draws nothing.
double perturb_reward(double energy, double sigma, Rng& rng);

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct TreeNode {
  double score = 0.0;         ///< w, cumulative reward
  std::int64_t visits = 0;    ///< n
  int turn = 0;               ///< number of choices fixed on the way here
  int choice = -1;            ///< grid index that led here
  NodeId parent = kNoNode;
  std::vector<int> options;   ///< allowed grid indices for the next turn
  std::vector<NodeId> children;  ///< parallel to options; kNoNode if absent
  int unexpanded = 0;

  double mean() const { return visits > 0 ? score / visits : 0.0; }
  bool fully_expanded() const { return unexpanded == 0; }
};

/// Node arena with a movable root.
class SearchTree {
 public:
  explicit SearchTree(const SearchSpace& space);

  NodeId root() const { return root_; }
  const TreeNode& node(NodeId id) const { return nodes_[id]; }
  TreeNode& node(NodeId id) { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  int turns() const { return turns_; }

  /// Creates the child for options[slot] of `parent` (w = 0, n = 0).
  NodeId expand(NodeId parent, int slot);
  /// Existing child reached by `choice`, or kNoNode.
  NodeId child(NodeId parent, int choice) const;
  /// Child for `choice`, creating it when missing.
  NodeId child_or_expand(NodeId parent, int choice);

  /// Adds one visit and `reward` to every node from `from` up to the root.
  void backpropagate(NodeId from, double reward);

  /// Grid indices from the original root down to `id`.
  std::vector<int> path(NodeId id) const;

  /// Makes `id` the new root. With reuse off, its statistics and subtree are
  /// dropped.
  void advance_root(NodeId id, bool reuse);

 private:
  const SearchSpace* space_;
  std::vector<TreeNode> nodes_;
  NodeId root_ = 0;
  int turns_;
};

/// Child statistics seen by a selection / final-move rule.
struct ChildStats {
  int choice = 0;
  double score = 0.0;
  std::int64_t visits = 0;
};

/// argmax_a { w_a / n_a + C sqrt(2 ln n_parent / n_a) }, lowest choice on
/// ties. Returns the position in `children`. Every child needs n_a >= 1 and
/// the parent n >= 1.
std::size_t uct_argmax(std::span<const ChildStats> children,
                       std::int64_t parent_visits, double exploration);

/// UCT over the children of a fully expanded node; returns a grid index.
int uct_select(const SearchTree& tree, NodeId parent, double exploration);

/// Final-move rule over visited children; returns a grid index.
/// max_child: highest w/n; robust_child: highest n; best_path: the child on
/// `best_path` (required for that criterion). `children` must be in
/// ascending choice order; ties go to the lowest index.
int final_move(std::span<const ChildStats> children, FinalMove criterion,
               std::optional<int> best_path_choice = std::nullopt);
int final_move(const SearchTree& tree, NodeId root, FinalMove criterion,
               std::optional<int> best_path_choice = std::nullopt);

/// Cost of a leaf; receives grid indices and the corresponding angles.
using LeafCost =
    std::function<double(std::span<const int> choices, std::span<const double> angles)>;

/// LeafCost backed by a private QaoaEvaluator. `cost` must outlive it.
LeafCost qaoa_leaf_cost(const DiagonalCost& cost);

struct RolloutRecord {
  std::vector<int> choices;
  double energy = 0.0;        ///< noiseless cost
  double seen_energy = 0.0;   ///< cost after noise
  double reward = 0.0;        ///< exp(-nu * seen_energy)
};

struct GameResult {
  Schedule schedule;
  double energy = 0.0;               ///< noiseless cost of `schedule`
  double best_rollout_energy = 0.0;  ///< lowest noiseless rollout cost
  long n_fev = 0;                    ///< search evaluations
  std::vector<int> choices;
  std::uint64_t seed = 0;
  int depth = 0;
};

/// One game: stateful driver over a tree. play() runs every turn; the
/// individual stages are public so tests can step through them.
class MctsGame {
 public:
  MctsGame(const SearchSpace& space, LeafCost cost, MctsConfig config);

  /// One selection/expansion/rollout/backpropagation cycle.
  const RolloutRecord& run_cycle();

  /// Stores the best memorized rollout path below the current root
  /// (single-player modification). Nodes already in the tree are untouched;
  /// new ones receive the memorized reward once.
  void expand_best_path();

  /// Move for the current turn under the configured criterion.
  int choose_move() const;

  /// Commits `choice` at the current root.
  void commit(int choice);

  GameResult play();

  const SearchTree& tree() const { return tree_; }
  int current_turn() const { return tree_.node(tree_.root()).turn; }
  long evaluations() const { return evaluations_; }
  const std::vector<RolloutRecord>& history() const { return history_; }
  const std::optional<RolloutRecord>& best_rollout() const { return best_; }
  const MctsConfig& config() const { return config_; }

 private:
  std::vector<int> random_completion(std::vector<int> prefix);
  double evaluate(const std::vector<int>& choices);
  /// Statistics of final-turn options aggregated from the rollout history.
  std::vector<ChildStats> leaf_stats(std::span<const int> prefix) const;

  const SearchSpace* space_;
  LeafCost cost_;
  MctsConfig config_;
  SearchTree tree_;
  Rng rng_;
  Rng noise_rng_;
  long evaluations_ = 0;
  std::vector<RolloutRecord> history_;
  std::optional<RolloutRecord> best_;        // by seen reward
  double best_noiseless_ = INFINITY;
};

GameResult play_game(const SearchSpace& space, const LeafCost& cost,
                     const MctsConfig& config);

}  // namespace qmcts
