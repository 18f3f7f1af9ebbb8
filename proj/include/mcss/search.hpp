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

#pragma once

#include "mcss/evaluation.hpp"
#include "mcss/game.hpp"
#include "mcss/policies.hpp"
#include "mcss/rng.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mcss {

enum class SelectionKind { kBoltzmann, kUcb1, kUniform };

std::string to_string(SelectionKind kind);
SelectionKind parse_selection_kind(const std::string& text);

// Backup policies P_a / P_b and the terminal value mapping.
struct BackupConfig {
  Temperature t_agent{1.0};
  Temperature t_opponent{1.0};
  bool hard_max = false;
  // In-tree terminal value is (reward of player 0 - 0.5) * terminal_scale.
  double terminal_scale = 2.0;

  double terminal_value(const GameOutcome& outcome) const {
    return (outcome.reward(0) - 0.5) * terminal_scale;
  }
};

struct SearchConfig {
  int max_iterations = 200;
  // Horizon D counted in agent turns: leaves are player-0 nodes at depth D.
  int max_depth = 2;
  BackupConfig backup;
  SelectionKind selection = SelectionKind::kBoltzmann;
  Temperature t_select{1.0};
  double ucb_exploration = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct SearchNode {
  GameState state;
  NodeId parent = kNoNode;
  MoveId inbound_move{};
  // Aligned with the legal-move list of `state` once expanded.
  std::vector<NodeId> children;
  // Backup distribution over children (P_a at agent nodes, P_b otherwise).
  std::vector<double> policy;
  bool expanded = false;
  bool terminal = false;
  // Nothing below this node can still be expanded.
  bool complete = false;
  int depth = 0;                // agent-turn depth d from the root
  double static_value = 0.0;    // H(s; w), or the terminal value
  double value = 0.0;           // V
  int visit_count = 0;
  double payoff_sum = 0.0;      // from the parent mover's point of view
  std::optional<GameOutcome> outcome;
};

// Explicit search tree. Nodes live in an arena; children always have larger
// ids than their parent, so descending id order is a valid bottom-up order.
// The tree keeps a snapshot of the weights it was valued with.
class SearchTree {
 public:
  SearchTree(const Game& game, const Evaluator& evaluator, WeightVector weights,
             const GameState& root_state, BackupConfig backup, int max_depth);

  static constexpr NodeId root() { return 0; }
  std::size_t size() const { return nodes_.size(); }
  const SearchNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<SearchNode>& nodes() const { return nodes_; }

  const Game& game() const { return *game_; }
  const Evaluator& evaluator() const { return *evaluator_; }
  const WeightVector& weights() const { return weights_; }
  const BackupConfig& backup() const { return backup_; }
  int max_depth() const { return max_depth_; }

  bool is_agent_node(NodeId id) const { return nodes_.at(id).state.player_to_move == 0; }
  bool is_leaf(NodeId id) const { return !nodes_.at(id).expanded; }
  bool expandable(NodeId id) const;

  NodeId child(NodeId id, std::size_t k) const { return nodes_.at(id).children.at(k); }
  // Q(s, a_k) = V(child_k).
  double move_value(NodeId id, std::size_t k) const { return nodes_.at(child(id, k)).value; }
  std::vector<double> move_values(NodeId id) const;

  // Creates all children one step below `id` and values each statically,
  // then values `id` from them. Throws ContractError if not expandable.
  void expand(NodeId id);

  // Recomputes policy and value of an expanded node from its children.
  void recompute(NodeId id);

  // Recomputes every ancestor of `id` (and `id` itself) bottom-up.
  void backup_path(NodeId id);

  // Re-evaluates every leaf with `weights` and backs the whole tree up.
  // With `freeze_opponent` the stored P_b distributions are kept.
  void revalue(const WeightVector& weights, bool freeze_opponent = false);

  // Refreshes the `complete` flags bottom-up from `id` to the root.
  void update_completion(NodeId id);

  // Invariant check: every expanded node satisfies V = sum P Q within `tol`
  // and lies in [min Q, max Q]. Returns the first violation, if any.
  std::optional<std::string> check_consistency(double tol = 1e-9) const;

  void record_visit(NodeId id) { ++nodes_.at(id).visit_count; }
  void add_payoff(NodeId id, double payoff) { nodes_.at(id).payoff_sum += payoff; }

  // Line-oriented export, one node per line:
  //   node <id> parent <pid|-1> move <k|-1> depth <d> visits <n> V <v> Q <q0,q1,...>
  std::string dump() const;

 private:
  NodeId add_node(const GameState& state, NodeId parent, MoveId move, int depth);
  double leaf_value(const SearchNode& node) const;
  Distribution backup_distribution(NodeId id, std::span<const double> q) const;

  const Game* game_;
  const Evaluator* evaluator_;
  WeightVector weights_;
  BackupConfig backup_;
  int max_depth_;
  std::vector<SearchNode> nodes_;
};

// Monte Carlo Softmax Search: cfg.max_iterations rounds of select (by the
// node-selection policy), expand one step, back up along the path.
// Selection skips complete subtrees; the loop stops early if the root
// becomes complete.
SearchTree mcss_search(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                       const GameState& root_state, const SearchConfig& cfg, Rng& rng);

// Node-selection distribution pi at an expanded node, restricted to
// incomplete children. Throws for UCB1, which is deterministic.
Distribution selection_distribution(const SearchTree& tree, NodeId id, const SearchConfig& cfg,
                                    bool skip_complete = true);

inline constexpr std::size_t kDefaultNodeCap = 1'000'000;

// Fully expanded tree to depth D. Throws ContractError past `node_cap`.
SearchTree build_full_tree(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                           const GameState& root_state, int depth, const BackupConfig& backup,
                           std::size_t node_cap = kDefaultNodeCap);

// V_a(root) by exact bottom-up application of the backup recursion.
double exhaustive_value(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                        const GameState& root_state, int depth, const BackupConfig& backup,
                        std::size_t node_cap = kDefaultNodeCap);

struct LeafProbability {
  std::vector<MoveId> path;  // from the root, first move included
  GameState leaf;
  double probability = 0.0;
  double leaf_value = 0.0;   // H(leaf) or its terminal value
};

using BackupProbabilityMap = std::vector<LeafProbability>;

// P(u | root, first_move) on the fully expanded tree: product of the backup
// policy factors along the path to each leaf.
BackupProbabilityMap backup_probabilities(const SearchTree& full_tree, MoveId first_move);
BackupProbabilityMap backup_probabilities(const Game& game, const Evaluator& evaluator,
                                          const WeightVector& weights, const GameState& root_state,
                                          MoveId first_move, int depth, const BackupConfig& backup);

// Same product with the node-selection policies pi in place of P.
BackupProbabilityMap realization_probabilities(const SearchTree& full_tree, MoveId first_move,
                                               const SearchConfig& cfg);
BackupProbabilityMap realization_probabilities(const Game& game, const Evaluator& evaluator,
                                               const WeightVector& weights, const GameState& root_state,
                                               MoveId first_move, const SearchConfig& cfg);

// Greedy descent: argmax Q at player-0 nodes, argmin elsewhere, ties to the
// lowest move index. Stops at the first unexpanded node.
std::vector<MoveId> principal_variation(const SearchTree& tree);

enum class PlayerPolicyKind { kMaximize, kMinimize, kUniform };

struct PlayerPolicy {
  PlayerPolicyKind kind = PlayerPolicyKind::kMinimize;
  Temperature temperature{1.0};
};

// Exact n-player value. policies[0] is the agent's P_a (must maximize);
// policies[i] is P_b(i). Opponent layers are combined as the product of
// their probabilities over joint replies.
double nplayer_exhaustive_value(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                                const GameState& root_state, int depth,
                                const std::vector<PlayerPolicy>& policies, double terminal_scale = 2.0,
                                std::size_t node_cap = kDefaultNodeCap);

}  // namespace mcss
