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

#include "mcss/game.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <memory>
#include <string>

namespace mcss {

// Tic-tac-toe. Player 0 is X, player 1 is O. The legal-move list is the empty
// cells in ascending cell order. Features are 18 occupancy bits laid out as
// player * 9 + cell.
class TicTacToe final : public Game {
 public:
  static constexpr int kCells = 9;
  static constexpr std::size_t kFeatureDim = 18;

  explicit TicTacToe(double draw_reward = 0.5);

  std::string name() const override { return "tictactoe"; }
  int num_players() const override { return 2; }
  std::size_t feature_dim() const override { return kFeatureDim; }
  GameState initial_state() const override;
  std::size_t num_legal_moves(const GameState& state) const override;
  GameState apply_move(const GameState& state, MoveId move) const override;
  std::optional<GameOutcome> terminal_outcome(const GameState& state) const override;
  FeatureVector features(const GameState& state) const override;
  std::string describe(const GameState& state) const override;

  // Board cell targeted by `move` in `state`.
  int cell_of(const GameState& state, MoveId move) const;
  // Move index that plays `cell`, or nullopt when the cell is taken.
  std::optional<MoveId> move_for_cell(const GameState& state, int cell) const;
  // 0 empty, 1 X, 2 O.
  static int cell(const GameState& state, int index) { return state.data[static_cast<std::size_t>(index)]; }

  double draw_reward() const { return draw_reward_; }

 private:
  double draw_reward_;
};

struct SyntheticTreeSpec {
  int branching = 2;        // b >= 1
  int depth = 4;            // D >= 1, in plies
  int players = 2;          // n >= 2
  std::uint64_t seed = 1;
  int feature_dim = 4;

  void validate() const;
  friend bool operator==(const SyntheticTreeSpec&, const SyntheticTreeSpec&) = default;
};

void to_json(nlohmann::json& j, const SyntheticTreeSpec& spec);
void from_json(const nlohmann::json& j, SyntheticTreeSpec& spec);

// Uniform tree of b^D leaves. A state is its move path from the root; every
// node carries a feature vector uniform in [-1, 1] that is a pure function of
// (seed, path). Leaves are terminal and award the win to one player chosen
// from the same hash.
class SyntheticGame final : public Game {
 public:
  explicit SyntheticGame(SyntheticTreeSpec spec);

  std::string name() const override { return "synthetic"; }
  int num_players() const override { return spec_.players; }
  std::size_t feature_dim() const override { return static_cast<std::size_t>(spec_.feature_dim); }
  GameState initial_state() const override;
  std::size_t num_legal_moves(const GameState& state) const override;
  GameState apply_move(const GameState& state, MoveId move) const override;
  std::optional<GameOutcome> terminal_outcome(const GameState& state) const override;
  FeatureVector features(const GameState& state) const override;
  std::string describe(const GameState& state) const override;

  const SyntheticTreeSpec& spec() const { return spec_; }

 private:
  std::uint64_t path_hash(const GameState& state) const;

  SyntheticTreeSpec spec_;
};

}  // namespace mcss
