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

#include "mcss/errors.hpp"
#include "mcss/verify.hpp"

#include <doctest.h>

using namespace mcss;

TEST_CASE("oracle suites pass") {
  for (const char* suite : {"softmax_minimax", "gradients", "move_gradient_identity", "backup_probability", "loss_gradients",
                            "td_traces", "nplayer"}) {
    for (const CheckResult& r : run_suite(suite, 3)) {
      INFO(format_check(r));
      CHECK(r.passed);
    }
  }
}

TEST_CASE("suite listing") {
  const auto names = suite_names();
  CHECK(names.back() == "all");
  CHECK(std::find(names.begin(), names.end(), "mc_convergence") != names.end());
  CHECK_THROWS_AS(run_suite("everything", 1), FormatError);
}

TEST_CASE("random trees respect their bounds") {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const RandomTree t = random_tree(rng, 3, 1, 3, 5);
    CHECK(t.branching >= 2);
    CHECK(t.branching <= 3);
    CHECK(t.depth >= 1);
    CHECK(t.depth <= 3);
    CHECK(t.weights.dim() == t.game->feature_dim());
    CHECK(t.game->feature_dim() <= 5);
  }
}

TEST_CASE("minimax helpers on a unit-leaf tree") {
  Rng rng(6);
  const RandomTree t = random_tree(rng, 2, 2, 2, 1, true);
  const GameState root = t.game->initial_state();
  const double v = minimax_value(*t.game, *t.evaluator, t.weights, root, t.depth);
  CHECK(std::abs(v) <= 1.0);
  const std::vector<MoveId> pv = minimax_pv(*t.game, *t.evaluator, t.weights, root, t.depth);
  CHECK(pv.size() == 4);
  GameState s = root;
  for (MoveId m : pv) s = t.game->apply_move(s, m);
  CHECK(t.evaluator->evaluate(s, t.weights) == v);
}
