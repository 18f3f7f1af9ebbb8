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
#include "mcss/games.hpp"
#include "mcss/training.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace mcss;

namespace {

TrainingConfig quick_config() {
  TrainingConfig c;
  c.search.max_iterations = 30;
  c.samples_per_root = 4;
  c.games = 6;
  c.seed = 5;
  return c;
}

SyntheticGame small_synthetic() {
  SyntheticTreeSpec s;
  s.branching = 3;
  s.depth = 7;
  s.seed = 3;
  s.feature_dim = 4;
  return SyntheticGame(s);
}

}  // namespace

TEST_CASE("combine deltas") {
  const std::vector<UpdateDelta> parts{{Eigen::Vector2d(1.0, 2.0), "a", 0.0}, {Eigen::Vector2d(-1.0, 0.5), "b", 0.0}};
  const std::vector<double> c{2.0, 4.0};
  CHECK(combine_deltas(parts, c).delta == Eigen::Vector2d(-2.0, 6.0));
  const std::vector<double> short_c{1.0};
  CHECK_THROWS_AS(combine_deltas(parts, short_c), ContractError);
  const RuleCoefficients k = RuleCoefficients{}.scaled(0.5);
  CHECK(k.td == 0.5);
  CHECK(k.supervised == 0.5);
}

TEST_CASE("two-proportion z statistic") {
  CHECK(two_proportion_z(60, 100, 40, 100) == doctest::Approx(2.8284271247461903).epsilon(1e-14));
  CHECK(two_proportion_z(40, 100, 60, 100) == doctest::Approx(-2.8284271247461903).epsilon(1e-14));
  CHECK(two_proportion_z(50, 100, 50, 100) == 0.0);
  CHECK(two_proportion_z(100, 100, 100, 100) == 0.0);
}

TEST_CASE("play policy names") {
  CHECK(parse_play_policy("greedy") == PlayPolicy::kGreedy);
  CHECK(to_string(PlayPolicy::kSample) == "sample");
  CHECK_THROWS_AS(parse_play_policy("best"), FormatError);
}

TEST_CASE("metrics row format") {
  IterationMetrics m;
  m.iteration = 3;
  m.td_loss = 0.5;
  m.plies = 7;
  CHECK(metrics_csv_header() == "iteration,kl,bootstrap_loss,q_loss,td_loss,regression_loss,outcome,delta_norm,plies");
  CHECK(metrics_csv_row(m) == "3,0,0,0,0.5,0,0,0,7");
}

TEST_CASE("teacher files") {
  TicTacToe g;
  const auto items = parse_teacher_file(g, "# comment\n\n- 0.5 0.5 0 0 0 0 0 0 0\n4 0.25 0.25 0.25 0.25 0 0 0 0\n");
  REQUIRE(items.size() == 2);
  CHECK(items[0].state == g.initial_state());
  CHECK(items[1].teacher[3] == 0.25);
  CHECK_THROWS_AS(parse_teacher_file(g, "- 0.5 0.5\n"), FormatError);
  CHECK_THROWS_AS(parse_teacher_file(g, "- 0.9 0.5 0 0 0 0 0 0 0\n"), FormatError);
  CHECK_THROWS_AS(parse_teacher_file(g, "30 1 0 0 0 0 0 0 0\n"), FormatError);
  const std::vector<std::vector<MoveId>> pos{{}, {MoveId{2}}};
  const std::vector<Distribution> t{Distribution::uniform(9), Distribution::one_hot(8, 1)};
  const auto back = parse_teacher_file(g, format_teacher_file(g, pos, t));
  REQUIRE(back.size() == 2);
  CHECK(back[1].teacher[1] == 1.0);
  CHECK(back[0].teacher[4] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("self-play is reproducible from its seed") {
  TicTacToe g;
  LinearEvaluator ev(g);
  const TrainingConfig c = quick_config();
  const WeightVector a = train_selfplay(g, ev, c, WeightVector(18));
  const WeightVector b = train_selfplay(g, ev, c, WeightVector(18));
  CHECK(a.values() == b.values());
  CHECK_FALSE(a.values().isZero());
  TrainingConfig other = c;
  other.seed = 6;
  CHECK(train_selfplay(g, ev, other, WeightVector(18)).values() != a.values());
}

TEST_CASE("self-play records one row per game") {
  TicTacToe g;
  LinearEvaluator ev(g);
  SelfPlayTrainer t(g, ev, quick_config(), WeightVector(18));
  t.run(4);
  REQUIRE(t.history().size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(t.history()[i].iteration == i);
    CHECK(t.history()[i].plies >= 5);
    CHECK(std::abs(t.history()[i].outcome - 0.5) <= 0.5);
  }
}

TEST_CASE("self-play resume matches an uninterrupted run") {
  TicTacToe g;
  LinearEvaluator ev(g);
  const TrainingConfig c = quick_config();
  SelfPlayTrainer full(g, ev, c, WeightVector(18));
  full.run(6);
  SelfPlayTrainer first(g, ev, c, WeightVector(18));
  first.run(3);
  const auto path = std::filesystem::temp_directory_path() / "mcss_test_ckpt.weights";
  save_checkpoint(path.string(), first.checkpoint("t"));
  const Checkpoint cp = load_checkpoint(path.string());
  CHECK(cp.iteration == 3);
  CHECK(cp.mode == "selfplay");
  SelfPlayTrainer resumed(g, ev, c, WeightVector(18));
  resumed.restore(cp);
  resumed.run(3);
  CHECK(resumed.weights().values() == full.weights().values());
  REQUIRE(resumed.history().size() == 6);
  CHECK(metrics_csv_row(resumed.history()[5]) == metrics_csv_row(full.history()[5]));
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".meta.json");
}

TEST_CASE("checkpoint for another game is rejected") {
  TicTacToe g;
  LinearEvaluator ev(g);
  SelfPlayTrainer t(g, ev, quick_config(), WeightVector(18));
  Checkpoint cp = t.checkpoint();
  cp.game = "synthetic";
  CHECK_THROWS_AS(t.restore(cp), ContractError);
}

TEST_CASE("divergence is reported") {
  TicTacToe g;
  LinearEvaluator ev(g);
  TrainingConfig c = quick_config();
  c.divergence_threshold = 1e-12;
  SelfPlayTrainer t(g, ev, c, WeightVector(18));
  CHECK_THROWS_AS(t.run(3), DivergenceError);
}

TEST_CASE("self-consistent teacher gives a near-zero supervised step") {
  const SyntheticGame g = small_synthetic();
  LinearEvaluator ev(g);
  const WeightVector w(Eigen::VectorXd::LinSpaced(4, -0.5, 0.5));
  TrainingConfig c = quick_config();
  c.search.max_iterations = 200;
  c.coefficients = RuleCoefficients{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  Rng rng(0);
  const SearchTree tree = mcss_search(g, ev, w, g.initial_state(), c.search, rng);
  std::vector<TeacherItem> data{{g.initial_state(), Distribution(tree.node(0).policy)}};
  TeacherTrainer t(g, ev, c, data, w);
  CHECK(t.mean_kl() < 1e-15);
  CHECK(t.step().delta_norm < 1e-12);
}

TEST_CASE("teacher training reduces the KL") {
  const SyntheticGame g = small_synthetic();
  LinearEvaluator ev(g);
  TrainingConfig c = quick_config();
  c.search.max_iterations = 200;
  c.learning.learning_rate = 0.5;
  c.coefficients = RuleCoefficients{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  const WeightVector hidden(Eigen::Vector4d(1.0, -1.5, 0.5, 2.0));
  std::vector<TeacherItem> data;
  for (const char* p : {"-", "0,1", "2,2"}) {
    const GameState s = replay(g, parse_move_sequence(p));
    Rng rng(0);
    data.push_back({s, Distribution(mcss_search(g, ev, hidden, s, c.search, rng).node(0).policy)});
  }
  TeacherTrainer t(g, ev, c, data, WeightVector(4));
  const double before = t.mean_kl();
  t.run_epochs(100);
  CHECK(t.iteration() == 300);
  CHECK(t.mean_kl() < 0.5 * before);
}

TEST_CASE("match bookkeeping") {
  TicTacToe g;
  LinearEvaluator ev(g);
  SearchConfig s;
  s.max_iterations = 10;
  const MatchStats m = evaluate_agents(g, ev, AgentSpec::random_mover(), AgentSpec::random_mover(), 40, 3);
  CHECK(m.games == 40);
  CHECK(m.wins + m.draws + m.losses == 40);
  REQUIRE(m.records.size() == 40);
  CHECK(m.records[0].a_player == 0);
  CHECK(m.records[1].a_player == 1);
  const MatchStats again = evaluate_agents(g, ev, AgentSpec::random_mover(), AgentSpec::random_mover(), 40, 3);
  CHECK(again.wins == m.wins);
  CHECK(again.records[7].moves == m.records[7].moves);
  const MatchStats same =
      evaluate_agents(g, ev, AgentSpec::searcher(WeightVector(18), s), AgentSpec::searcher(WeightVector(18), s), 200, 4);
  CHECK(std::abs(same.z) < 3.5);
}

TEST_CASE("greedy move breaks exact ties uniformly") {
  TicTacToe g;
  LinearEvaluator ev(g);
  const SearchTree t = build_full_tree(g, ev, WeightVector(18), g.initial_state(), 1, {});
  Rng rng(1);
  std::vector<int> counts(9, 0);
  for (int i = 0; i < 900; ++i) ++counts[greedy_move(t, rng).index];
  for (int c : counts) CHECK(c > 50);
}

TEST_CASE("training config validation") {
  TrainingConfig c;
  c.samples_per_root = 0;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = {};
  c.divergence_threshold = -1.0;
  CHECK_THROWS_AS(c.validate(), ContractError);
}

TEST_CASE("monte carlo self-play with several workers is reproducible") {
  TicTacToe g;
  LinearEvaluator ev(g);
  TrainingConfig c = quick_config();
  c.games = 3;
  c.learning.gradient_mode = GradientMode::kMonteCarlo;
  c.learning.mc_samples = 64;
  c.learning.workers = 2;
  const WeightVector a = train_selfplay(g, ev, c, WeightVector(18));
  CHECK(a.values() == train_selfplay(g, ev, c, WeightVector(18)).values());
  CHECK(a.values().allFinite());
}
