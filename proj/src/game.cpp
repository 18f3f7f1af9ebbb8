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

#include "mcss/game.hpp"

#include "mcss/errors.hpp"
#include "mcss/rng.hpp"

#include <charconv>
#include <sstream>

namespace mcss {

std::size_t GameStateHash::operator()(const GameState& state) const noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL ^ static_cast<std::uint64_t>(state.player_to_move);
  h = splitmix64(h) ^ static_cast<std::uint64_t>(state.ply);
  for (std::int32_t v : state.data) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
    h = splitmix64(h);
  }
  return static_cast<std::size_t>(h);
}

std::string Game::describe(const GameState& state) const {
  std::ostringstream os;
  os << name() << " ply " << state.ply << " to-move " << state.player_to_move;
  return os.str();
}

std::vector<MoveId> Game::legal_moves(const GameState& state) const {
  const std::size_t n = num_legal_moves(state);
  std::vector<MoveId> moves(n);
  for (std::size_t i = 0; i < n; ++i) moves[i] = MoveId{i};
  return moves;
}

GameState replay(const Game& game, std::span<const MoveId> moves) {
  GameState state = game.initial_state();
  for (MoveId m : moves) state = game.apply_move(state, m);
  return state;
}

std::vector<MoveId> parse_move_sequence(std::string_view text) {
  std::vector<MoveId> moves;
  if (text.empty() || text == "-") return moves;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view token = text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    std::size_t value = 0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (token.empty() || ec != std::errc() || ptr != last) {
      throw FormatError("bad move sequence '" + std::string(text) + "'");
    }
    moves.push_back(MoveId{value});
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return moves;
}

std::string format_move_sequence(std::span<const MoveId> moves) {
  if (moves.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(moves[i].index);
  }
  return out;
}

}  // namespace mcss
