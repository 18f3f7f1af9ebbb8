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

#include "mcss/games.hpp"

#include "mcss/errors.hpp"
#include "mcss/rng.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <sstream>

namespace mcss {

namespace {

constexpr std::array<std::array<int, 3>, 8> kLines = {{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8},
    {0, 3, 6}, {1, 4, 7}, {2, 5, 8},
    {0, 4, 8}, {2, 4, 6},
}};

void check_board(const GameState& state) {
  if (state.data.size() != static_cast<std::size_t>(TicTacToe::kCells)) {
    throw ContractError("not a tic-tac-toe state");
  }
}

}  // namespace

TicTacToe::TicTacToe(double draw_reward) : draw_reward_(draw_reward) {
  if (!(draw_reward >= 0.0 && draw_reward <= 1.0)) {
    throw ContractError("draw reward must lie in [0, 1]");
  }
}

GameState TicTacToe::initial_state() const {
  return GameState{std::vector<std::int32_t>(kCells, 0), 0, 0};
}

std::size_t TicTacToe::num_legal_moves(const GameState& state) const {
  check_board(state);
  if (is_terminal(state)) throw ContractError("legal_moves on a terminal state");
  std::size_t n = 0;
  for (int c = 0; c < kCells; ++c) n += cell(state, c) == 0;
  return n;
}

int TicTacToe::cell_of(const GameState& state, MoveId move) const {
  check_board(state);
  std::size_t seen = 0;
  for (int c = 0; c < kCells; ++c) {
    if (cell(state, c) != 0) continue;
    if (seen == move.index) return c;
    ++seen;
  }
  throw ContractError("illegal move index " + std::to_string(move.index));
}

std::optional<MoveId> TicTacToe::move_for_cell(const GameState& state, int target) const {
  check_board(state);
  if (target < 0 || target >= kCells || cell(state, target) != 0) return std::nullopt;
  std::size_t index = 0;
  for (int c = 0; c < target; ++c) index += cell(state, c) == 0;
  return MoveId{index};
}

GameState TicTacToe::apply_move(const GameState& state, MoveId move) const {
  if (is_terminal(state)) throw ContractError("apply_move on a terminal state");
  const int c = cell_of(state, move);
  GameState next = state;
  next.data[static_cast<std::size_t>(c)] = state.player_to_move + 1;
  next.player_to_move = 1 - state.player_to_move;
  next.ply = state.ply + 1;
  return next;
}

std::optional<GameOutcome> TicTacToe::terminal_outcome(const GameState& state) const {
  check_board(state);
  for (const auto& line : kLines) {
    const int mark = cell(state, line[0]);
    if (mark != 0 && mark == cell(state, line[1]) && mark == cell(state, line[2])) {
      GameOutcome outcome;
      outcome.winner = mark - 1;
      outcome.rewards = {outcome.winner == 0 ? 1.0 : 0.0, outcome.winner == 1 ? 1.0 : 0.0};
      return outcome;
    }
  }
  for (int c = 0; c < kCells; ++c) {
    if (cell(state, c) == 0) return std::nullopt;
  }
  return GameOutcome{{draw_reward_, draw_reward_}, -1};
}

FeatureVector TicTacToe::features(const GameState& state) const {
  check_board(state);
  FeatureVector phi = FeatureVector::Zero(kFeatureDim);
  for (int c = 0; c < kCells; ++c) {
    const int mark = cell(state, c);
    if (mark != 0) phi[(mark - 1) * kCells + c] = 1.0;
  }
  return phi;
}

std::string TicTacToe::describe(const GameState& state) const {
  check_board(state);
  std::string out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int mark = cell(state, r * 3 + c);
      out += mark == 1 ? 'X' : mark == 2 ? 'O' : '.';
    }
    if (r < 2) out += '/';
  }
  out += state.player_to_move == 0 ? " X" : " O";
  return out;
}

void SyntheticTreeSpec::validate() const {
  if (branching < 1) throw ContractError("synthetic tree: branching must be >= 1");
  if (depth < 1) throw ContractError("synthetic tree: depth must be >= 1");
  if (players < 2) throw ContractError("synthetic tree: players must be >= 2");
  if (feature_dim < 1) throw ContractError("synthetic tree: feature_dim must be >= 1");
}

void to_json(nlohmann::json& j, const SyntheticTreeSpec& spec) {
  j = nlohmann::json{{"branching", spec.branching},
                     {"depth", spec.depth},
                     {"players", spec.players},
                     {"seed", spec.seed},
                     {"feature_dim", spec.feature_dim}};
}

void from_json(const nlohmann::json& j, SyntheticTreeSpec& spec) {
  SyntheticTreeSpec out;
  for (const auto& [key, value] : j.items()) {
    if (key == "branching") out.branching = value.get<int>();
    else if (key == "depth") out.depth = value.get<int>();
    else if (key == "players") out.players = value.get<int>();
    else if (key == "seed") out.seed = value.get<std::uint64_t>();
    else if (key == "feature_dim") out.feature_dim = value.get<int>();
    else throw FormatError("unknown synthetic tree key '" + key + "'");
  }
  out.validate();
  spec = out;
}

SyntheticGame::SyntheticGame(SyntheticTreeSpec spec) : spec_(spec) { spec_.validate(); }

GameState SyntheticGame::initial_state() const { return GameState{{}, 0, 0}; }

std::size_t SyntheticGame::num_legal_moves(const GameState& state) const {
  if (is_terminal(state)) throw ContractError("legal_moves on a terminal state");
  return static_cast<std::size_t>(spec_.branching);
}

GameState SyntheticGame::apply_move(const GameState& state, MoveId move) const {
  if (is_terminal(state)) throw ContractError("apply_move on a terminal state");
  if (move.index >= static_cast<std::size_t>(spec_.branching)) {
    throw ContractError("illegal move index " + std::to_string(move.index));
  }
  GameState next = state;
  next.data.push_back(static_cast<std::int32_t>(move.index));
  next.ply = state.ply + 1;
  next.player_to_move = next.ply % spec_.players;
  return next;
}

std::uint64_t SyntheticGame::path_hash(const GameState& state) const {
  std::uint64_t h = spec_.seed;
  std::uint64_t out = splitmix64(h);
  for (std::int32_t m : state.data) {
    h = out ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(m) + 1));
    out = splitmix64(h);
  }
  return out;
}

std::optional<GameOutcome> SyntheticGame::terminal_outcome(const GameState& state) const {
  if (state.ply < spec_.depth) return std::nullopt;
  std::uint64_t h = path_hash(state) ^ 0x5851f42d4c957f2dULL;
  const int winner = static_cast<int>(splitmix64(h) % static_cast<std::uint64_t>(spec_.players));
  GameOutcome outcome;
  outcome.winner = winner;
  outcome.rewards.assign(static_cast<std::size_t>(spec_.players), 0.0);
  outcome.rewards[static_cast<std::size_t>(winner)] = 1.0;
  return outcome;
}

FeatureVector SyntheticGame::features(const GameState& state) const {
  std::uint64_t stream = path_hash(state);
  FeatureVector phi(spec_.feature_dim);
  for (int i = 0; i < spec_.feature_dim; ++i) {
    const double u = static_cast<double>(splitmix64(stream) >> 11) * 0x1.0p-53;
    phi[i] = 2.0 * u - 1.0;
  }
  return phi;
}

std::string SyntheticGame::describe(const GameState& state) const {
  std::vector<MoveId> path;
  for (std::int32_t m : state.data) path.push_back(MoveId{static_cast<std::size_t>(m)});
  return "path " + format_move_sequence(path) + " to-move " + std::to_string(state.player_to_move);
}

}  // namespace mcss
