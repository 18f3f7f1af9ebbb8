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

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcss {

using FeatureVector = Eigen::VectorXd;

// Index into the legal-move list of a state. Stable for a given state.
struct MoveId {
  std::size_t index = 0;
  friend auto operator<=>(const MoveId&, const MoveId&) = default;
};

// Immutable position. `data` is owned by the game that produced the state and
// is opaque to every other module.
struct GameState {
  std::vector<std::int32_t> data;
  int player_to_move = 0;
  int ply = 0;

  friend bool operator==(const GameState&, const GameState&) = default;
};

struct GameStateHash {
  std::size_t operator()(const GameState& state) const noexcept;
};

// Per-player rewards at a terminal state: 1 win, 0 loss, draws per the
// game's draw reward.
struct GameOutcome {
  std::vector<double> rewards;
  int winner = -1;  // -1 for a draw

  bool is_draw() const { return winner < 0; }
  double reward(int player) const { return rewards.at(static_cast<std::size_t>(player)); }
};

// Abstract perfect-information game with deterministic transitions.
// Players move in ascending order 0, 1, ..., n-1, 0, ...
class Game {
 public:
  virtual ~Game() = default;

  // Identifier written into weight checkpoints.
  virtual std::string name() const = 0;
  virtual int num_players() const = 0;
  virtual std::size_t feature_dim() const = 0;
  virtual GameState initial_state() const = 0;

  // Throws ContractError on a terminal state.
  virtual std::size_t num_legal_moves(const GameState& state) const = 0;

  // Throws ContractError when the move is not legal in `state`.
  virtual GameState apply_move(const GameState& state, MoveId move) const = 0;

  virtual std::optional<GameOutcome> terminal_outcome(const GameState& state) const = 0;

  // Dense feature vector of length feature_dim().
  virtual FeatureVector features(const GameState& state) const = 0;

  virtual std::string describe(const GameState& state) const;

  std::vector<MoveId> legal_moves(const GameState& state) const;
  bool is_terminal(const GameState& state) const { return terminal_outcome(state).has_value(); }
};

// Replays `moves` from the initial position.
GameState replay(const Game& game, std::span<const MoveId> moves);

// Position spec: comma-separated move indices from the initial position.
// "" and "-" both denote the initial position.
std::vector<MoveId> parse_move_sequence(std::string_view text);
std::string format_move_sequence(std::span<const MoveId> moves);

}  // namespace mcss
