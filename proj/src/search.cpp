// Copyright 2026 The MCSS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcss/search.hpp"

#include "mcss/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace mcss {

std::string to_string(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::kBoltzmann: return "boltzmann";
    case SelectionKind::kUcb1: return "ucb1";
    case SelectionKind::kUniform: return "uniform";
  }
  return "unknown";
}

SelectionKind parse_selection_kind(const std::string& text) {
  if (text == "boltzmann") return SelectionKind::kBoltzmann;
  if (text == "ucb1") return SelectionKind::kUcb1;
  if (text == "uniform") return SelectionKind::kUniform;
  throw FormatError("unknown selection policy '" + text + "' (boltzmann, ucb1, uniform)");
}

void SearchConfig::validate() const {
  if (max_iterations < 1) throw ContractError("search: max_iterations must be >= 1");
  if (max_depth < 1) throw ContractError("search: max_depth must be >= 1");
  if (!(backup.terminal_scale >= 0.0) || !std::isfinite(backup.terminal_scale)) {
    throw ContractError("search: terminal_scale must be finite and non-negative");
  }
  if (!(ucb_exploration >= 0.0)) throw ContractError("search: ucb exploration must be >= 0");
}

SearchTree::SearchTree(const Game& game, const Evaluator& evaluator, WeightVector weights,
                       const GameState& root_state, BackupConfig backup, int max_depth)
    : game_(&game), evaluator_(&evaluator), weights_(std::move(weights)), backup_(backup), max_depth_(max_depth) {
  if (max_depth < 1) throw ContractError("search tree: max_depth must be >= 1");
  if (weights_.dim() != evaluator.dim()) throw ContractError("search tree: weight dimension mismatch");
  add_node(root_state, kNoNode, MoveId{}, 0);
}

NodeId SearchTree::add_node(const GameState& state, NodeId parent, MoveId move, int depth) {
  SearchNode node;
  node.state = state;
  node.parent = parent;
  node.inbound_move = move;
  node.depth = depth;
  node.outcome = game_->terminal_outcome(state);
  node.terminal = node.outcome.has_value();
  nodes_.push_back(std::move(node));
  const auto id = static_cast<NodeId>(nodes_.size() - 1);
  SearchNode& n = nodes_.back();
  n.static_value = leaf_value(n);
  n.value = n.static_value;
  n.complete = !expandable(id);
  return id;
}

double SearchTree::leaf_value(const SearchNode& node) const {
  if (node.terminal) return backup_.terminal_value(*node.outcome);
  return evaluator_->evaluate(node.state, weights_);
}

bool SearchTree::expandable(NodeId id) const {
  const SearchNode& n = nodes_.at(id);
  if (n.expanded || n.terminal) return false;
  return !(n.state.player_to_move == 0 && n.depth >= max_depth_);
}

std::vector<double> SearchTree::move_values(NodeId id) const {
  const SearchNode& n = nodes_.at(id);
  std::vector<double> q(n.children.size());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = nodes_[n.children[k]].value;
  return q;
}

void SearchTree::expand(NodeId id) {
  if (!expandable(id)) throw ContractError("expand: node " + std::to_string(id) + " cannot be expanded");
  const GameState state = nodes_[id].state;
  const int depth = nodes_[id].depth;
  const std::size_t n = game_->num_legal_moves(state);
  std::vector<NodeId> children;
  children.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    GameState next = game_->apply_move(state, MoveId{k});
    const int child_depth = depth + (next.player_to_move == 0 ? 1 : 0);
    children.push_back(add_node(next, id, MoveId{k}, child_depth));
  }
  SearchNode& node = nodes_[id];
  node.children = std::move(children);
  node.expanded = true;
  recompute(id);
  node.complete = std::all_of(node.children.begin(), node.children.end(),
                              [&](NodeId c) { return nodes_[c].complete; });
}

Distribution SearchTree::backup_distribution(NodeId id, std::span<const double> q) const {
  if (is_agent_node(id)) {
    return backup_.hard_max ? hardmax(q) : backup_policy_agent(q, backup_.t_agent);
  }
  if (backup_.hard_max) {
    std::vector<double> negated(q.begin(), q.end());
    for (double& x : negated) x = -x;
    return hardmax(negated);
  }
  return backup_policy_opponent(q, backup_.t_opponent);
}

void SearchTree::recompute(NodeId id) {
  SearchNode& node = nodes_.at(id);
  if (!node.expanded) {
    node.value = node.static_value;
    return;
  }
  const std::vector<double> q = move_values(id);
  const Distribution p = backup_distribution(id, q);
  node.value = p.expectation(q);
  node.policy.assign(p.begin(), p.end());
}

void SearchTree::backup_path(NodeId id) {
  for (NodeId x = id; x != kNoNode; x = nodes_.at(x).parent) {
    if (nodes_[x].expanded) recompute(x);
  }
}

void SearchTree::revalue(const WeightVector& weights, bool freeze_opponent) {
  if (weights.dim() != evaluator_->dim()) throw ContractError("revalue: weight dimension mismatch");
  weights_ = weights;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const auto id = static_cast<NodeId>(i);
    SearchNode& node = nodes_[id];
    node.static_value = leaf_value(node);
    if (!node.expanded) {
      node.value = node.static_value;
    } else if (freeze_opponent && !is_agent_node(id)) {
      node.value = Distribution(node.policy).expectation(move_values(id));
    } else {
      recompute(id);
    }
  }
}

void SearchTree::update_completion(NodeId id) {
  for (NodeId x = id; x != kNoNode; x = nodes_.at(x).parent) {
    SearchNode& node = nodes_[x];
    if (!node.expanded) {
      node.complete = !expandable(x);
    } else {
      node.complete = std::all_of(node.children.begin(), node.children.end(),
                                  [&](NodeId c) { return nodes_[c].complete; });
    }
  }
}

std::optional<std::string> SearchTree::check_consistency(double tol) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const SearchNode& node = nodes_[i];
    if (node.terminal && node.value != node.static_value) {
      return "terminal node " + std::to_string(i) + " value was overwritten";
    }
    if (!node.expanded) continue;
    const std::vector<double> q = move_values(static_cast<NodeId>(i));
    double v = 0.0;
    double mass = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      v += node.policy[k] * q[k];
      mass += node.policy[k];
    }
    if (std::abs(mass - 1.0) > kNormalizationTolerance) {
      return "node " + std::to_string(i) + " policy is not normalized";
    }
    if (std::abs(v - node.value) > tol) {
      return "node " + std::to_string(i) + " value differs from sum P Q";
    }
    const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
    if (node.value < *lo - tol || node.value > *hi + tol) {
      return "node " + std::to_string(i) + " value outside [min Q, max Q]";
    }
  }
  return std::nullopt;
}

std::string SearchTree::dump() const {
  std::ostringstream os;
  os << "# mcss-tree nodes " << nodes_.size() << "\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const SearchNode& node = nodes_[i];
    os << "node " << i << " parent " << (node.parent == kNoNode ? -1LL : static_cast<long long>(node.parent))
       << " move " << (node.parent == kNoNode ? -1LL : static_cast<long long>(node.inbound_move.index))
       << " depth " << node.depth << " visits " << node.visit_count << " V " << format_scalar(node.value) << " Q ";
    if (node.children.empty()) {
      os << "-";
    } else {
      for (std::size_t k = 0; k < node.children.size(); ++k) {
        if (k) os << ',';
        os << format_scalar(nodes_[node.children[k]].value);
      }
    }
    os << "\n";
  }
  return os.str();
}

Distribution selection_distribution(const SearchTree& tree, NodeId id, const SearchConfig& cfg,
                                    bool skip_complete) {
  const SearchNode& node = tree.node(id);
  if (!node.expanded) throw ContractError("selection at an unexpanded node");
  if (cfg.selection == SelectionKind::kUcb1) {
    throw ContractError("UCB1 selection is deterministic and has no distribution");
  }
  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < node.children.size(); ++k) {
    if (!skip_complete || !tree.node(node.children[k]).complete) open.push_back(k);
  }
  if (open.empty()) throw ContractError("selection at a complete node");
  std::vector<double> p(node.children.size(), 0.0);
  if (cfg.selection == SelectionKind::kUniform) {
    for (std::size_t k : open) p[k] = 1.0 / static_cast<double>(open.size());
  } else {
    const double sign = tree.is_agent_node(id) ? 1.0 : -1.0;
    std::vector<double> values;
    values.reserve(open.size());
    for (std::size_t k : open) values.push_back(sign * tree.move_value(id, k));
    const Distribution sub = boltzmann(values, cfg.t_select);
    for (std::size_t i = 0; i < open.size(); ++i) p[open[i]] = sub[i];
  }
  return Distribution(std::move(p));
}

namespace {

std::size_t select_child(const SearchTree& tree, NodeId id, const SearchConfig& cfg, Rng& rng) {
  if (cfg.selection != SelectionKind::kUcb1) {
    return select_move(selection_distribution(tree, id, cfg), rng).index;
  }
  const SearchNode& node = tree.node(id);
  std::vector<std::size_t> open;
  BanditStats stats;
  stats.exploration = cfg.ucb_exploration;
  for (std::size_t k = 0; k < node.children.size(); ++k) {
    const SearchNode& c = tree.node(node.children[k]);
    if (c.complete) continue;
    open.push_back(k);
    stats.visits.push_back(c.visit_count);
    stats.mean_payoff.push_back(c.visit_count > 0 ? c.payoff_sum / c.visit_count : 0.0);
  }
  if (open.empty()) throw ContractError("selection at a complete node");
  return open[ucb1_select(stats).index];
}

}  // namespace

SearchTree mcss_search(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                       const GameState& root_state, const SearchConfig& cfg, Rng& rng) {
  cfg.validate();
  if (game.is_terminal(root_state)) throw ContractError("mcss_search: root state is terminal");
  SearchTree tree(game, evaluator, weights, root_state, cfg.backup, cfg.max_depth);
  std::vector<NodeId> path;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (tree.node(SearchTree::root()).complete) break;
    path.clear();
    NodeId cur = SearchTree::root();
    path.push_back(cur);
    while (tree.node(cur).expanded) {
      cur = tree.child(cur, select_child(tree, cur, cfg, rng));
      path.push_back(cur);
    }
    tree.expand(cur);
    tree.backup_path(cur);
    tree.update_completion(cur);
    for (std::size_t i = 0; i < path.size(); ++i) {
      tree.record_visit(path[i]);
      if (i == 0) continue;
      const double sign = tree.is_agent_node(path[i - 1]) ? 1.0 : -1.0;
      tree.add_payoff(path[i], sign * tree.node(path[i]).value);
    }
  }
  return tree;
}

SearchTree build_full_tree(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                           const GameState& root_state, int depth, const BackupConfig& backup,
                           std::size_t node_cap) {
  SearchTree tree(game, evaluator, weights, root_state, backup, depth);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto id = static_cast<NodeId>(i);
    if (!tree.expandable(id)) continue;
    if (tree.size() + game.num_legal_moves(tree.node(id).state) > node_cap) {
      throw ContractError("full tree exceeds the node cap of " + std::to_string(node_cap));
    }
    tree.expand(id);
  }
  for (std::size_t i = tree.size(); i-- > 0;) {
    if (tree.is_leaf(static_cast<NodeId>(i))) tree.update_completion(static_cast<NodeId>(i));
  }
  tree.revalue(tree.weights());
  return tree;
}

double exhaustive_value(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                        const GameState& root_state, int depth, const BackupConfig& backup,
                        std::size_t node_cap) {
  return build_full_tree(game, evaluator, weights, root_state, depth, backup, node_cap)
      .node(SearchTree::root())
      .value;
}

namespace {

template <typename PolicyFn>
BackupProbabilityMap leaf_products(const SearchTree& tree, MoveId first_move, PolicyFn policy_at) {
  const SearchNode& root = tree.node(SearchTree::root());
  if (!root.expanded) throw ContractError("leaf probabilities need an expanded root");
  if (first_move.index >= root.children.size()) throw ContractError("first move out of range");

  BackupProbabilityMap out;
  struct Frame {
    NodeId id;
    double probability;
    std::vector<MoveId> path;
  };
  std::vector<Frame> stack{{root.children[first_move.index], 1.0, {first_move}}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const SearchNode& node = tree.node(f.id);
    if (!node.expanded) {
      out.push_back({f.path, node.state, f.probability, node.value});
      continue;
    }
    const std::vector<double> p = policy_at(f.id);
    // Reverse push keeps the output in move order.
    for (std::size_t k = node.children.size(); k-- > 0;) {
      std::vector<MoveId> path = f.path;
      path.push_back(MoveId{k});
      stack.push_back({node.children[k], f.probability * p[k], std::move(path)});
    }
  }
  return out;
}

}  // namespace

BackupProbabilityMap backup_probabilities(const SearchTree& full_tree, MoveId first_move) {
  return leaf_products(full_tree, first_move, [&](NodeId id) { return full_tree.node(id).policy; });
}

BackupProbabilityMap backup_probabilities(const Game& game, const Evaluator& evaluator,
                                          const WeightVector& weights, const GameState& root_state,
                                          MoveId first_move, int depth, const BackupConfig& backup) {
  const SearchTree tree = build_full_tree(game, evaluator, weights, root_state, depth, backup);
  return backup_probabilities(tree, first_move);
}

BackupProbabilityMap realization_probabilities(const SearchTree& full_tree, MoveId first_move,
                                               const SearchConfig& cfg) {
  return leaf_products(full_tree, first_move, [&](NodeId id) {
    const Distribution pi = selection_distribution(full_tree, id, cfg, /*skip_complete=*/false);
    return std::vector<double>(pi.begin(), pi.end());
  });
}

BackupProbabilityMap realization_probabilities(const Game& game, const Evaluator& evaluator,
                                               const WeightVector& weights, const GameState& root_state,
                                               MoveId first_move, const SearchConfig& cfg) {
  const SearchTree tree = build_full_tree(game, evaluator, weights, root_state, cfg.max_depth, cfg.backup);
  return realization_probabilities(tree, first_move, cfg);
}

std::vector<MoveId> principal_variation(const SearchTree& tree) {
  std::vector<MoveId> pv;
  NodeId cur = SearchTree::root();
  while (tree.node(cur).expanded) {
    const std::vector<double> q = tree.move_values(cur);
    const bool maximize = tree.is_agent_node(cur);
    std::size_t best = 0;
    for (std::size_t k = 1; k < q.size(); ++k) {
      if (maximize ? q[k] > q[best] : q[k] < q[best]) best = k;
    }
    pv.push_back(MoveId{best});
    cur = tree.child(cur, best);
  }
  return pv;
}

namespace {

class NPlayerSolver {
 public:
  NPlayerSolver(const Game& game, const Evaluator& evaluator, const WeightVector& weights, int depth,
                const std::vector<PlayerPolicy>& policies, double terminal_scale, std::size_t node_cap)
      : game_(game), evaluator_(evaluator), weights_(weights), depth_(depth), policies_(policies),
        terminal_scale_(terminal_scale), node_cap_(node_cap) {}

  // V_a of a player-0 node at agent depth d.
  double agent_value(const GameState& u, int d) {
    if (auto it = memo_.find(u); it != memo_.end()) return it->second;
    count_node();
    double v = 0.0;
    if (auto outcome = game_.terminal_outcome(u)) {
      v = terminal(*outcome);
    } else if (d >= depth_) {
      v = evaluator_.evaluate(u, weights_);
    } else {
      const std::size_t n = game_.num_legal_moves(u);
      std::vector<double> q(n);
      for (std::size_t k = 0; k < n; ++k) {
        const GameState next = game_.apply_move(u, MoveId{k});
        Accumulator acc;
        accumulate_replies(next, d, 1.0, acc);
        q[k] = std::clamp(acc.sum, acc.lo, acc.hi);
      }
      v = policy(0, q).expectation(q);
    }
    memo_.emplace(u, v);
    return v;
  }

 private:
  double terminal(const GameOutcome& outcome) const { return (outcome.reward(0) - 0.5) * terminal_scale_; }

  void count_node() {
    if (++nodes_ > node_cap_) throw ContractError("n-player tree exceeds the node cap");
  }

  Distribution policy(int player, std::span<const double> q) const {
    const PlayerPolicy& pp = policies_[static_cast<std::size_t>(player)];
    switch (pp.kind) {
      case PlayerPolicyKind::kMaximize: return backup_policy_agent(q, pp.temperature);
      case PlayerPolicyKind::kMinimize: return backup_policy_opponent(q, pp.temperature);
      case PlayerPolicyKind::kUniform: return Distribution::uniform(q.size());
    }
    throw ContractError("bad player policy");
  }

  // Value of an opponent node: its own backup expectation.
  double opponent_value(const GameState& v, int d) {
    if (auto it = opp_memo_.find(v); it != opp_memo_.end()) return it->second;
    count_node();
    double out = 0.0;
    if (auto outcome = game_.terminal_outcome(v)) {
      out = terminal(*outcome);
    } else {
      const std::vector<double> q = reply_values(v, d);
      out = policy(v.player_to_move, q).expectation(q);
    }
    opp_memo_.emplace(v, out);
    return out;
  }

  std::vector<double> reply_values(const GameState& v, int d) {
    const std::size_t n = game_.num_legal_moves(v);
    std::vector<double> q(n);
    for (std::size_t j = 0; j < n; ++j) {
      const GameState next = game_.apply_move(v, MoveId{j});
      q[j] = next.player_to_move == 0 ? agent_value(next, d + 1) : opponent_value(next, d);
    }
    return q;
  }

  struct Accumulator {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double probability, double value) {
      sum += probability * value;
      if (probability > 0.0) {
        lo = std::min(lo, value);
        hi = std::max(hi, value);
      }
    }
  };

  // Sum over joint opponent replies of prod_i P_b(i) * V_a(u^{d+1}).
  void accumulate_replies(const GameState& x, int d, double probability, Accumulator& acc) {
    if (x.player_to_move == 0) {
      acc.add(probability, agent_value(x, d + 1));
      return;
    }
    if (auto outcome = game_.terminal_outcome(x)) {
      acc.add(probability, terminal(*outcome));
      return;
    }
    const std::vector<double> q = reply_values(x, d);
    const Distribution p = policy(x.player_to_move, q);
    for (std::size_t j = 0; j < q.size(); ++j) {
      accumulate_replies(game_.apply_move(x, MoveId{j}), d, probability * p[j], acc);
    }
  }

  const Game& game_;
  const Evaluator& evaluator_;
  const WeightVector& weights_;
  int depth_;
  const std::vector<PlayerPolicy>& policies_;
  double terminal_scale_;
  std::size_t node_cap_;
  std::size_t nodes_ = 0;
  std::unordered_map<GameState, double, GameStateHash> memo_;
  std::unordered_map<GameState, double, GameStateHash> opp_memo_;
};

}  // namespace

double nplayer_exhaustive_value(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                                const GameState& root_state, int depth,
                                const std::vector<PlayerPolicy>& policies, double terminal_scale,
                                std::size_t node_cap) {
  if (depth < 1) throw ContractError("n-player value: depth must be >= 1");
  if (policies.size() != static_cast<std::size_t>(game.num_players())) {
    throw ContractError("n-player value: need one policy per player");
  }
  if (policies[0].kind != PlayerPolicyKind::kMaximize) {
    throw ContractError("n-player value: the agent's policy must maximize");
  }
  if (root_state.player_to_move != 0) throw ContractError("n-player value: root must be a player-0 node");
  NPlayerSolver solver(game, evaluator, weights, depth, policies, terminal_scale, node_cap);
  return solver.agent_value(root_state, 0);
}

}  // namespace mcss
