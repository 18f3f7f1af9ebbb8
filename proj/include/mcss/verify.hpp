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
#include "mcss/games.hpp"
#include "mcss/rng.hpp"
#include "mcss/search.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

// Oracle and invariant suites. Every oracle here works on the game directly
// and shares no code with the search tree beyond the Game interface.
namespace mcss {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// "PASS <suite>/<name> <detail>" or "FAIL ...".
std::string format_check(const CheckResult& result);

// Suites runnable by name; "all" runs every oracle suite, "learning" the two
// training experiments.
std::vector<std::string> suite_names();
// Throws FormatError for an unknown suite, listing the valid names.
std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed = 1);

// A random synthetic game whose horizon leaves are non-terminal.
struct RandomTree {
  std::unique_ptr<SyntheticGame> game;
  std::unique_ptr<LinearEvaluator> evaluator;
  WeightVector weights;
  int branching = 2;
  int depth = 1;  // agent turns searched
};

// b in [2, max_branching], D in [min_depth, max_depth], F in [1, max_features].
// With unit_leaves, F = 1 and w = [1] so leaf values are the raw features.
RandomTree random_tree(Rng& rng, int max_branching, int min_depth, int max_depth, int max_features,
                       bool unit_leaves = false, int players = 2);

double minimax_value(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                     const GameState& root, int depth, double terminal_scale = 2.0);
// Argmax / argmin descent, lowest index on ties.
std::vector<MoveId> minimax_pv(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                               const GameState& root, int depth, double terminal_scale = 2.0);

// Single-criterion checks.
CheckResult check_softmax_minimax(std::uint64_t seed);
CheckResult check_hardmax_minimax(std::uint64_t seed);
CheckResult check_gradients_fd(std::uint64_t seed);
CheckResult check_move_gradient_identity(std::uint64_t seed);
CheckResult check_backup_probability(std::uint64_t seed);
CheckResult check_mc_within_se(std::uint64_t seed);
CheckResult check_mc_rate(std::uint64_t seed);
CheckResult check_loss_gradients(std::uint64_t seed);
CheckResult check_td_traces(std::uint64_t seed);
CheckResult check_teacher_learning(std::uint64_t seed);
CheckResult check_selfplay_improvement(std::uint64_t seed);
CheckResult check_nplayer(std::uint64_t seed);

}  // namespace mcss
