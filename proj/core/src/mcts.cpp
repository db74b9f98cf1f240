#include "qmcts/mcts.hpp"

#include <algorithm>
#include <memory>

#include "qmcts/errors.hpp"

namespace qmcts {

std::string to_string(Variant v) {
  return v == Variant::vanilla ? "vanilla" : "single_player";
}

std::string to_string(FinalMove f) {
  switch (f) {
    case FinalMove::max_child: return "max_child";
    case FinalMove::robust_child: return "robust_child";
    case FinalMove::best_path: return "best_path";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "vanilla") return Variant::vanilla;
  if (s == "single_player" || s == "sp") return Variant::single_player;
  throw ConfigError("unknown MCTS variant '" + s + "'");
}

FinalMove parse_final_move(const std::string& s) {
  if (s == "max_child") return FinalMove::max_child;
  if (s == "robust_child") return FinalMove::robust_child;
  if (s == "best_path") return FinalMove::best_path;
  throw ConfigError("unknown final-move criterion '" + s + "'");
}

int CycleBudget::for_turn(int turn, int turns) const {
  if (turn == turns - 1) return 0;
  return turn == 0 ? initial + per_turn : per_turn;
}

long CycleBudget::total(int turns) const {
  return static_cast<long>(initial) + static_cast<long>(per_turn) * (turns - 1);
}

MctsConfig MctsConfig::defaults(Variant variant) {
  MctsConfig c;
  c.variant = variant;
  c.final_move =
      variant == Variant::single_player ? FinalMove::best_path : FinalMove::max_child;
  return c;
}

void MctsConfig::validate(int turns, int max_options) const {
  if (!(exploration >= 0.0)) throw ConfigError("exploration constant C must be >= 0");
  if (!(nu > 0.0)) throw ConfigError("reward exponent nu must be > 0");
  if (branching < 2) throw ConfigError("branching factor must be >= 2");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (turns < 2) throw ConfigError("a game needs at least two turns (P >= 1)");
  if (budget.initial < 0 || budget.per_turn < 0)
    throw ConfigError("cycle budgets must be non-negative");
  if (budget.initial + budget.per_turn < max_options)
    throw ConfigError("first-turn budget " +
                      std::to_string(budget.initial + budget.per_turn) +
                      " is below the branching factor " + std::to_string(max_options));
  if (turns > 2 && budget.per_turn < max_options)
    throw ConfigError("per-turn budget " + std::to_string(budget.per_turn) +
                      " is below the branching factor " + std::to_string(max_options));
}

double reward(double energy, double nu) { return std::exp(-nu * energy); }

double perturb_reward(double energy, double sigma, Rng& rng) {
  if (sigma == 0.0) return energy;
  std::normal_distribution<double> noise(0.0, sigma);
  return energy + noise(rng);
}

// ---------------------------------------------------------------------------

SearchTree::SearchTree(const SearchSpace& space) : space_(&space), turns_(space.turns()) {
  TreeNode root;
  root.options = space.options({});
  root.children.assign(root.options.size(), kNoNode);
  root.unexpanded = static_cast<int>(root.options.size());
  nodes_.push_back(std::move(root));
}

NodeId SearchTree::expand(NodeId parent, int slot) {
  if (nodes_[parent].children[slot] != kNoNode)
    throw ContractViolation("child already expanded");
  TreeNode child;
  child.turn = nodes_[parent].turn + 1;
  child.choice = nodes_[parent].options[slot];
  child.parent = parent;
  const NodeId id = static_cast<NodeId>(nodes_.size());
  if (child.turn < turns_) {
    nodes_.push_back(std::move(child));
    auto prefix = path(id);
    nodes_[id].options = space_->options(prefix);
    nodes_[id].children.assign(nodes_[id].options.size(), kNoNode);
    nodes_[id].unexpanded = static_cast<int>(nodes_[id].options.size());
  } else {
    nodes_.push_back(std::move(child));
  }
  nodes_[parent].children[slot] = id;
  --nodes_[parent].unexpanded;
  return id;
}

NodeId SearchTree::child(NodeId parent, int choice) const {
  const auto& p = nodes_[parent];
  auto it = std::lower_bound(p.options.begin(), p.options.end(), choice);
  if (it == p.options.end() || *it != choice) return kNoNode;
  return p.children[it - p.options.begin()];
}

NodeId SearchTree::child_or_expand(NodeId parent, int choice) {
  const auto& p = nodes_[parent];
  auto it = std::lower_bound(p.options.begin(), p.options.end(), choice);
  if (it == p.options.end() || *it != choice)
    throw ContractViolation("choice " + std::to_string(choice) +
                            " is not allowed at this node");
  const auto slot = static_cast<int>(it - p.options.begin());
  if (p.children[slot] != kNoNode) return p.children[slot];
  return expand(parent, slot);
}

void SearchTree::backpropagate(NodeId from, double r) {
  for (NodeId id = from;; id = nodes_[id].parent) {
    nodes_[id].visits += 1;
    nodes_[id].score += r;
    if (id == root_) break;
  }
}

std::vector<int> SearchTree::path(NodeId id) const {
  std::vector<int> out;
  for (; nodes_[id].parent != kNoNode; id = nodes_[id].parent)
    out.push_back(nodes_[id].choice);
  std::reverse(out.begin(), out.end());
  return out;
}

void SearchTree::advance_root(NodeId id, bool reuse) {
  if (nodes_[id].parent != root_)
    throw ContractViolation("new root must be a child of the current root");
  root_ = id;
  if (!reuse) {
    auto& n = nodes_[id];
    n.score = 0.0;
    n.visits = 0;
    std::fill(n.children.begin(), n.children.end(), kNoNode);
    n.unexpanded = static_cast<int>(n.children.size());
  }
}

// ---------------------------------------------------------------------------

std::size_t uct_argmax(std::span<const ChildStats> children,
                       std::int64_t parent_visits, double exploration) {
  if (children.empty()) throw ContractViolation("UCT over an empty child set");
  if (parent_visits < 1) throw ContractViolation("UCT parent has zero visits");
  const double log_parent = std::log(static_cast<double>(parent_visits));
  std::size_t best = 0;
  double best_value = -INFINITY;
  for (std::size_t k = 0; k < children.size(); ++k) {
    const auto& c = children[k];
    if (c.visits < 1) throw ContractViolation("UCT child has zero visits");
    const double n = static_cast<double>(c.visits);
    const double value = c.score / n + exploration * std::sqrt(2.0 * log_parent / n);
    if (value > best_value) {
      best_value = value;
      best = k;
    }
  }
  return best;
}

namespace {

std::vector<ChildStats> child_stats(const SearchTree& tree, NodeId parent,
                                    bool visited_only) {
  const auto& p = tree.node(parent);
  std::vector<ChildStats> out;
  for (std::size_t k = 0; k < p.options.size(); ++k) {
    if (p.children[k] == kNoNode) continue;
    const auto& c = tree.node(p.children[k]);
    if (visited_only && c.visits == 0) continue;
    out.push_back({p.options[k], c.score, c.visits});
  }
  return out;
}

}  // namespace

int uct_select(const SearchTree& tree, NodeId parent, double exploration) {
  const auto& p = tree.node(parent);
  if (!p.fully_expanded())
    throw ContractViolation("UCT selection on a node that is not fully expanded");
  auto stats = child_stats(tree, parent, false);
  return stats[uct_argmax(stats, p.visits, exploration)].choice;
}

int final_move(std::span<const ChildStats> children, FinalMove criterion,
               std::optional<int> best_path_choice) {
  // Children arrive in ascending choice order, so strict comparisons keep
  // the lowest index on ties.
  const ChildStats* best = nullptr;
  for (const auto& c : children) {
    if (c.visits < 1) continue;
    if (best == nullptr) {
      best = &c;
    } else if (criterion == FinalMove::max_child) {
      if (c.score / c.visits > best->score / best->visits) best = &c;
    } else if (criterion == FinalMove::robust_child) {
      if (c.visits > best->visits) best = &c;
    }
  }
  if (best == nullptr) throw ContractViolation("final move requested with no visited child");
  if (criterion == FinalMove::best_path) {
    if (!best_path_choice)
      throw ContractViolation("best_path criterion without a memorized path");
    return *best_path_choice;
  }
  return best->choice;
}

int final_move(const SearchTree& tree, NodeId root, FinalMove criterion,
               std::optional<int> best_path_choice) {
  auto stats = child_stats(tree, root, true);
  return final_move(stats, criterion, best_path_choice);
}

LeafCost qaoa_leaf_cost(const DiagonalCost& cost) {
  auto evaluator = std::make_shared<QaoaEvaluator>(cost);
  return [evaluator](std::span<const int>, std::span<const double> angles) {
    return evaluator->energy(angles);
  };
}

// ---------------------------------------------------------------------------

MctsGame::MctsGame(const SearchSpace& space, LeafCost cost, MctsConfig config)
    : space_(&space),
      cost_(std::move(cost)),
      config_(config),
      tree_(space),
      rng_(derive_seed(config.seed, {0})),
      noise_rng_(derive_seed(config.seed, {1})) {
  config_.validate(space.turns(), space.branching());
}

std::vector<int> MctsGame::random_completion(std::vector<int> prefix) {
  const auto turns = static_cast<std::size_t>(space_->turns());
  while (prefix.size() < turns) {
    if (space_->mirror_halved()) {
      auto opts = space_->options(prefix);
      std::uniform_int_distribution<std::size_t> pick(0, opts.size() - 1);
      prefix.push_back(opts[pick(rng_)]);
    } else {
      const int b = static_cast<int>(space_->grid(static_cast<int>(prefix.size())).size());
      std::uniform_int_distribution<int> pick(0, b - 1);
      prefix.push_back(pick(rng_));
    }
  }
  return prefix;
}

double MctsGame::evaluate(const std::vector<int>& choices) {
  const Schedule s = space_->schedule(choices);
  const double energy = cost_(choices, s.angles);
  ++evaluations_;
  RolloutRecord rec;
  rec.choices = choices;
  rec.energy = energy;
  rec.seen_energy = perturb_reward(energy, config_.noise_sigma, noise_rng_);
  rec.reward = reward(rec.seen_energy, config_.nu);
  best_noiseless_ = std::min(best_noiseless_, energy);
  if (!best_ || rec.reward > best_->reward) best_ = rec;
  history_.push_back(std::move(rec));
  return history_.back().reward;
}

const RolloutRecord& MctsGame::run_cycle() {
  NodeId node = tree_.root();
  if (tree_.node(node).turn >= tree_.turns())
    throw ContractViolation("cycle requested after the last turn");
  // Selection through fully expanded nodes, then expansion.
  while (tree_.node(node).turn < tree_.turns()) {
    const auto& n = tree_.node(node);
    if (!n.fully_expanded()) {
      std::uniform_int_distribution<int> pick(0, n.unexpanded - 1);
      int target = pick(rng_);
      int slot = 0;
      for (;; ++slot) {
        if (n.children[slot] == kNoNode && target-- == 0) break;
      }
      node = tree_.expand(node, slot);
      break;
    }
    node = tree_.child(node, uct_select(tree_, node, config_.exploration));
  }
  // Rollout and backpropagation.
  const auto choices = random_completion(tree_.path(node));
  const double r = evaluate(choices);
  tree_.backpropagate(node, r);
  return history_.back();
}

namespace {

bool has_prefix(const std::vector<int>& v, std::span<const int> prefix) {
  return v.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), v.begin());
}

}  // namespace

void MctsGame::expand_best_path() {
  if (!best_) return;
  NodeId node = tree_.root();
  const auto prefix = tree_.path(node);
  if (!has_prefix(best_->choices, prefix)) return;
  for (int t = tree_.node(node).turn; t < tree_.turns(); ++t) {
    const int c = best_->choices[t];
    NodeId next = tree_.child(node, c);
    if (next == kNoNode) {
      next = tree_.child_or_expand(node, c);
      tree_.node(next).score = best_->reward;
      tree_.node(next).visits = 1;
    }
    node = next;
  }
}

std::vector<ChildStats> MctsGame::leaf_stats(std::span<const int> prefix) const {
  const auto last = static_cast<std::size_t>(tree_.turns() - 1);
  std::vector<ChildStats> stats;
  for (const auto& rec : history_) {
    if (!has_prefix(rec.choices, prefix)) continue;
    const int c = rec.choices[last];
    auto it = std::lower_bound(stats.begin(), stats.end(), c,
                               [](const ChildStats& s, int v) { return s.choice < v; });
    if (it == stats.end() || it->choice != c) it = stats.insert(it, ChildStats{c, 0.0, 0});
    it->score += rec.reward;
    it->visits += 1;
  }
  return stats;
}

int MctsGame::choose_move() const {
  const NodeId root = tree_.root();
  const int turn = tree_.node(root).turn;
  if (turn >= tree_.turns()) throw ContractViolation("game already finished");
  const auto prefix = tree_.path(root);
  std::optional<int> on_best;
  if (best_ && has_prefix(best_->choices, prefix)) on_best = best_->choices[turn];

  // The last angle is picked from the leaf statistics gathered so far.
  if (turn == tree_.turns() - 1) {
    auto stats = leaf_stats(prefix);
    for (const auto& s : child_stats(tree_, root, true)) {
      auto it = std::lower_bound(stats.begin(), stats.end(), s.choice,
                                 [](const ChildStats& a, int v) { return a.choice < v; });
      if (it == stats.end() || it->choice != s.choice) stats.insert(it, s);
    }
    return final_move(stats, config_.final_move, on_best);
  }
  return final_move(tree_, root, config_.final_move, on_best);
}

void MctsGame::commit(int choice) {
  const NodeId next = tree_.child_or_expand(tree_.root(), choice);
  tree_.advance_root(next, config_.reuse_subtree);
  const auto prefix = tree_.path(next);
  if (best_ && !has_prefix(best_->choices, prefix)) {
    best_.reset();
    for (const auto& rec : history_)
      if (has_prefix(rec.choices, prefix) && (!best_ || rec.reward > best_->reward))
        best_ = rec;
  }
}

GameResult MctsGame::play() {
  const int turns = tree_.turns();
  while (current_turn() < turns) {
    const int t = current_turn();
    const int cycles = config_.budget.for_turn(t, turns);
    for (int k = 0; k < cycles; ++k) run_cycle();
    if (config_.variant == Variant::single_player) expand_best_path();
    commit(choose_move());
  }

  GameResult result;
  result.choices = tree_.path(tree_.root());
  result.schedule = space_->schedule(result.choices);
  result.n_fev = evaluations_;
  result.seed = config_.seed;
  result.depth = space_->depth();
  result.best_rollout_energy = best_noiseless_;
  auto it = std::find_if(history_.begin(), history_.end(), [&](const RolloutRecord& r) {
    return r.choices == result.choices;
  });
  result.energy = it != history_.end() ? it->energy
                                       : cost_(result.choices, result.schedule.angles);
  return result;
}

GameResult play_game(const SearchSpace& space, const LeafCost& cost,
                     const MctsConfig& config) {
  MctsGame game(space, cost, config);
  return game.play();
}

}  // namespace qmcts
