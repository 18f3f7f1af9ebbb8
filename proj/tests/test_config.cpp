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

#include "mcss/config.hpp"
#include "mcss/errors.hpp"

#include <doctest.h>

using namespace mcss;
using nlohmann::json;

TEST_CASE("empty config gives documented defaults") {
  const RunConfig c = parse_config(json::object());
  CHECK(c.game.name == "tictactoe");
  CHECK(c.search.max_iterations == 200);
  CHECK(c.search.max_depth == 2);
  CHECK(c.learning.learning_rate == 0.01);
  CHECK(c.samples_per_root == 32);
  CHECK(c.games == 100);
  CHECK(c.match.games == 1000);
  CHECK(c.match.search.max_iterations == 2);
  CHECK(c.seed == 1);
  CHECK(c.workers == 1);
  CHECK(c.train.mode == "selfplay");
}

TEST_CASE("config values are applied") {
  const RunConfig c = parse_config(json::parse(R"({
    "game": {"name": "synthetic", "synthetic": {"branching": 3, "depth": 6, "seed": 9}},
    "search": {"max_iterations": 50, "t_agent": 0.5, "selection": "ucb1", "hard_max": true},
    "learning": {"lambda": 0.9, "gradient_mode": "monte_carlo"},
    "coefficients": {"pg": 0.0},
    "training": {"games": 7, "self_play_policy": "greedy", "t_opponent_final": 0.2},
    "match": {"games": 10, "search": {"max_depth": 3}},
    "seed": 42, "workers": 2, "out_dir": "runs/a"
  })"));
  CHECK(c.game.synthetic.branching == 3);
  CHECK(c.search.backup.t_agent.value() == 0.5);
  CHECK(c.search.selection == SelectionKind::kUcb1);
  CHECK(c.search.backup.hard_max);
  CHECK(c.learning.lambda == 0.9);
  CHECK(c.learning.gradient_mode == GradientMode::kMonteCarlo);
  CHECK(c.coefficients.pg == 0.0);
  CHECK(c.coefficients.td == 1.0);
  CHECK(c.games == 7);
  CHECK(c.self_play_policy == PlayPolicy::kGreedy);
  CHECK(*c.t_opponent_final == 0.2);
  CHECK(c.match.search.max_depth == 3);
  CHECK(c.match.search.max_iterations == 2);
  CHECK(c.seed == 42);
  CHECK(c.out_dir == "runs/a");
  const TrainingConfig t = c.training();
  CHECK(t.games == 7);
  CHECK(t.seed == 42);
  CHECK(make_game(c.game)->name() == "synthetic");
}

TEST_CASE("config round trips through its echo") {
  const RunConfig c = parse_config(json::parse(R"({"search": {"t_select": 0.25}, "seed": 3})"));
  const json echoed = config_to_json(c);
  CHECK(config_to_json(parse_config(echoed)) == echoed);
}

TEST_CASE("bad configs are rejected") {
  CHECK_THROWS_AS(parse_config(json::parse(R"({"serch": {}})")), FormatError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"search": {"depth": 2}})")), FormatError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"search": {"max_depth": "two"}})")), FormatError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"game": {"name": "chess"}})")), FormatError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"search": {"t_agent": 0}})")), Error);
  CHECK_THROWS_AS(parse_config(json::parse("[1, 2]")), FormatError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), FormatError);
  try {
    parse_config(json::parse(R"({"learning": {"rate": 1}})"));
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()) == "config: unknown key 'learning.rate'");
  }
}
