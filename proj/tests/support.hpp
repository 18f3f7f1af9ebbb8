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

#include <stdexcept>
#include <vector>

namespace mcss::testing {

// Two-ply game with one scalar feature per leaf:
// root (player 0) -> moves 0, 1 -> player-1 nodes -> moves 0, 1 -> leaves.
// Leaf features are {{1, -1}, {0.5, 0}}; interior features are 0.
class TwoPlyGame final : public Game {
 public:
  std::string name() const override { return "two_ply"; }
  int num_players() const override { return 2; }
  std::size_t feature_dim() const override { return 1; }
  GameState initial_state() const override { return {}; }
  std::size_t num_legal_moves(const GameState&) const override { return 2; }
  GameState apply_move(const GameState& s, MoveId m) const override {
    if (s.ply >= 3) throw std::logic_error("terminal");
    GameState next = s;
    next.data.push_back(static_cast<std::int32_t>(m.index));
    next.ply = s.ply + 1;
    next.player_to_move = next.ply % 2;
    return next;
  }
  std::optional<GameOutcome> terminal_outcome(const GameState& s) const override {
    if (s.ply < 3) return std::nullopt;
    return GameOutcome{{1.0, 0.0}, 0};
  }
  FeatureVector features(const GameState& s) const override {
    static const double kLeaf[2][2] = {{1.0, -1.0}, {0.5, 0.0}};
    FeatureVector phi = FeatureVector::Zero(1);
    if (s.ply == 2) phi[0] = kLeaf[s.data[0]][s.data[1]];
    return phi;
  }
};

}  // namespace mcss::testing
