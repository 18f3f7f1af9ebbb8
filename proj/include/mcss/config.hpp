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
#include "mcss/games.hpp"
#include "mcss/search.hpp"
#include "mcss/training.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <string>

// Run configuration: one JSON document, every key optional, unknown keys
// rejected. See README.md for the annotated reference.
namespace mcss {

struct GameConfig {
  std::string name = "tictactoe";  // "tictactoe" or "synthetic"
  double draw_reward = 0.5;
  SyntheticTreeSpec synthetic;
};

struct TrainSection {
  std::string mode = "selfplay";   // "selfplay" or "supervised"
  std::string teacher_file;
  std::size_t checkpoint_every = 0;  // 0: final checkpoint only
  std::string initial_weights;
  std::string resume;
};

struct MatchSection {
  int games = 1000;
  // Search used by both agents of a match.
  SearchConfig search;
  bool log_games = false;

  MatchSection();
};

struct RunConfig {
  GameConfig game;
  SearchConfig search;
  LearningConfig learning;
  RuleCoefficients coefficients;
  TrainSection train;
  MatchSection match;
  std::size_t samples_per_root = 32;
  std::size_t games = 100;
  std::size_t epochs = 1;
  PlayPolicy self_play_policy = PlayPolicy::kSample;
  double divergence_threshold = 1e6;
  std::optional<double> t_opponent_final;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "out";

  TrainingConfig training() const;
  void validate() const;
};

// Throws FormatError on malformed JSON, wrong types or unknown keys.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

std::unique_ptr<Game> make_game(const GameConfig& cfg);

}  // namespace mcss
