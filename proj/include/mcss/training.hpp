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
#include "mcss/learning.hpp"
#include "mcss/policies.hpp"
#include "mcss/rng.hpp"
#include "mcss/search.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcss {

// Weights of the linear summation of per-rule deltas.
struct RuleCoefficients {
  double supervised = 1.0;
  double bootstrap = 1.0;
  double q_learning = 1.0;
  double td = 1.0;
  double pg = 1.0;
  double regression = 1.0;

  RuleCoefficients scaled(double k) const;
};

// sum_i c_i * delta_i. Throws ContractError on length or dimension mismatch.
UpdateDelta combine_deltas(std::span<const UpdateDelta> deltas, std::span<const double> coefficients);

enum class PlayPolicy { kGreedy, kSample };

std::string to_string(PlayPolicy policy);
PlayPolicy parse_play_policy(const std::string& text);

struct TrainingConfig {
  SearchConfig search;
  LearningConfig learning;
  RuleCoefficients coefficients;
  // Monte Carlo paths per retained tree root (per legal move with a teacher).
  std::size_t samples_per_root = 32;
  std::size_t games = 100;
  std::size_t epochs = 1;
  std::uint64_t seed = 1;
  PlayPolicy self_play_policy = PlayPolicy::kSample;
  double divergence_threshold = 1e6;
  // When set, T_b moves linearly from search.backup.t_opponent to this value
  // over `games` self-play games.
  std::optional<double> t_opponent_final;

  void validate() const;
};

struct IterationMetrics {
  std::size_t iteration = 0;
  double kl = 0.0;              // teacher mode
  double bootstrap_loss = 0.0;
  double q_loss = 0.0;
  double td_loss = 0.0;         // 1/2 sum delta_t^2
  double regression_loss = 0.0;
  double outcome = 0.0;         // r(sigma) for player 0 (self-play)
  double delta_norm = 0.0;
  int plies = 0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const IterationMetrics& m);

struct Checkpoint {
  WeightVector weights;
  std::string game;
  std::string mode;            // "selfplay" or "supervised"
  std::string run_id;
  std::size_t iteration = 0;   // completed iterations
  std::string rng_state;
  std::vector<IterationMetrics> history;
};

// Weight file at `path` plus a JSON sidecar at `path` + ".meta.json".
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

struct TeacherItem {
  GameState state;
  Distribution teacher;
};

// Teacher file: one position per line, "<move sequence> <p0> <p1> ...".
std::vector<TeacherItem> parse_teacher_file(const Game& game, const std::string& text);
std::string format_teacher_file(const Game& game, std::span<const std::vector<MoveId>> positions,
                                std::span<const Distribution> teachers);

// Learning with a teacher signal: for each position, search, sample paths
// below every legal move with the backup policies, accumulate the bootstrap,
// Q and supervised deltas, apply the combination.
class TeacherTrainer {
 public:
  TeacherTrainer(const Game& game, const Evaluator& evaluator, TrainingConfig cfg,
                 std::vector<TeacherItem> dataset, WeightVector initial);

  // One update on the next position in the dataset cycle.
  const IterationMetrics& step();
  void run(std::size_t updates, const std::function<void(const IterationMetrics&)>& on_step = {});
  void run_epochs(std::size_t epochs, const std::function<void(const IterationMetrics&)>& on_step = {});

  // Mean KL(pi* || P_a) over the dataset at the current weights.
  double mean_kl();

  const WeightVector& weights() const { return weights_; }
  const std::vector<IterationMetrics>& history() const { return history_; }
  std::size_t iteration() const { return history_.size(); }

  Checkpoint checkpoint(const std::string& run_id = "run") const;
  void restore(const Checkpoint& checkpoint);

 private:
  SearchTree search_position(const GameState& state, Rng& rng) const;

  const Game* game_;
  const Evaluator* evaluator_;
  TrainingConfig cfg_;
  std::vector<TeacherItem> dataset_;
  WeightVector weights_;
  Rng rng_;
  std::vector<IterationMetrics> history_;
};

// Learning without teacher signals: self-play with one shared weight vector;
// player 0 is the learning agent.
class SelfPlayTrainer {
 public:
  SelfPlayTrainer(const Game& game, const Evaluator& evaluator, TrainingConfig cfg, WeightVector initial);

  const IterationMetrics& step();
  void run(std::size_t games, const std::function<void(const IterationMetrics&)>& on_step = {});

  const WeightVector& weights() const { return weights_; }
  const std::vector<IterationMetrics>& history() const { return history_; }
  std::size_t iteration() const { return history_.size(); }

  Checkpoint checkpoint(const std::string& run_id = "run") const;
  void restore(const Checkpoint& checkpoint);

  // Plays one game and returns its trajectory without learning from it.
  Trajectory play_game(Rng& rng, std::vector<MoveId>* moves = nullptr) const;

 private:
  SearchConfig search_config_at(std::size_t game_index) const;

  const Game* game_;
  const Evaluator* evaluator_;
  TrainingConfig cfg_;
  WeightVector weights_;
  Rng rng_;
  std::vector<IterationMetrics> history_;
};

WeightVector train_with_teacher(const Game& game, const Evaluator& evaluator, std::vector<TeacherItem> dataset,
                                const TrainingConfig& cfg, WeightVector initial);
WeightVector train_selfplay(const Game& game, const Evaluator& evaluator, const TrainingConfig& cfg,
                            WeightVector initial);

struct AgentSpec {
  enum class Kind { kSearch, kRandom };
  Kind kind = Kind::kRandom;
  WeightVector weights;
  SearchConfig search;

  static AgentSpec random_mover() { return {}; }
  static AgentSpec searcher(WeightVector weights, SearchConfig search) {
    return {Kind::kSearch, std::move(weights), search};
  }
};

// Greedy move from a finished search: hard-max over root move values from
// the mover's side, ties broken uniformly with `rng`.
MoveId greedy_move(const SearchTree& tree, Rng& rng);
// Move sampled from the root backup policy.
MoveId sampled_move(const SearchTree& tree, Rng& rng);

MoveId choose_move(const Game& game, const Evaluator& evaluator, const AgentSpec& agent,
                   const GameState& state, Rng& rng);

struct GameRecord {
  int game = 0;
  int a_player = 0;             // seat of agent A
  std::vector<MoveId> moves;
  double a_reward = 0.0;
};

struct MatchStats {
  int games = 0;
  int wins = 0;                 // for agent A
  int draws = 0;
  int losses = 0;
  // Two-proportion z statistic of A's win rate against B's.
  double z = 0.0;
  std::vector<GameRecord> records;

  double win_or_draw_rate() const { return games ? static_cast<double>(wins + draws) / games : 0.0; }
};

// Pooled two-proportion z statistic of s1/n1 against s2/n2.
double two_proportion_z(double s1, double n1, double s2, double n2);

// Plays n_games between A and B, A taking player 0 in even games.
MatchStats evaluate_agents(const Game& game, const Evaluator& evaluator, const AgentSpec& a, const AgentSpec& b,
                           int n_games, std::uint64_t seed);

}  // namespace mcss
