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
#include "mcss/gradients.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace mcss;
using mcss::testing::TwoPlyGame;

namespace {

SearchTree hand_tree(double w = 1.0) {
  static TwoPlyGame game;
  static LinearEvaluator ev(game);
  return build_full_tree(game, ev, WeightVector(Eigen::VectorXd::Constant(1, w)), game.initial_state(), 1, {});
}

SearchTree synthetic_tree(const SyntheticGame& g, const LinearEvaluator& ev, double ta, double tb) {
  BackupConfig b;
  b.t_agent = Temperature(ta);
  b.t_opponent = Temperature(tb);
  return build_full_tree(g, ev, WeightVector(Eigen::VectorXd::LinSpaced(g.feature_dim(), -0.8, 0.6)),
                         g.initial_state(), 2, b);
}

SyntheticTreeSpec spec3() {
  SyntheticTreeSpec s;
  s.branching = 3;
  s.depth = 5;
  s.seed = 17;
  s.feature_dim = 3;
  return s;
}

}  // namespace

TEST_CASE("exact gradients on the hand-built game") {
  const SearchTree t = hand_tree();
  CHECK(grad_node_value_exact(t, 0)[0] == doctest::Approx(0.10540782082164162).epsilon(1e-13));
  CHECK(grad_move_value_exact(t, 0, 0)[0] == doctest::Approx(-0.7615941559557647).epsilon(1e-14));
  CHECK(grad_move_value_via_nodes(t, 0, 1)[0] == doctest::Approx(0.18877033439907273).epsilon(1e-14));
  const double v = t.node(0).value;
  CHECK(correction_factor(t, 0, 1) == doctest::Approx(0.18877033439907273 - v + 1.0));
  CHECK(correction_factor(t, t.child(0, 0), 0) == 1.0);
}

TEST_CASE("leaf and terminal gradients") {
  const SearchTree t = hand_tree();
  const NodeId leaf = t.child(t.child(0, 0), 0);
  CHECK(grad_node_value_exact(t, leaf)[0] == 1.0);
  TicTacToe g;
  LinearEvaluator ev(g);
  const GameState s = replay(g, parse_move_sequence("0,2,0,1"));
  const SearchTree tt = build_full_tree(g, ev, WeightVector(18), s, 1, {});
  int terminals = 0;
  for (NodeId c : tt.node(0).children) {
    if (!tt.node(c).terminal) continue;
    ++terminals;
    CHECK(grad_node_value_exact(tt, c).isZero());
  }
  CHECK(terminals == 1);
}

TEST_CASE("gradients need softmax backups") {
  TwoPlyGame g;
  LinearEvaluator ev(g);
  BackupConfig b;
  b.hard_max = true;
  const SearchTree t = build_full_tree(g, ev, WeightVector(1), g.initial_state(), 1, b);
  CHECK_THROWS_AS(grad_node_value_exact(t, 0), ContractError);
  Rng rng(1);
  CHECK_THROWS_AS(sample_backup_path(t, 0, rng), ContractError);
}

TEST_CASE("move gradients agree between recursions") {
  SyntheticGame g(spec3());
  LinearEvaluator ev(g);
  const SearchTree t = synthetic_tree(g, ev, 0.7, 1.3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK((grad_move_value_exact(t, 0, k) - grad_move_value_via_nodes(t, 0, k)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sampled paths follow the backup policies") {
  SyntheticGame g(spec3());
  LinearEvaluator ev(g);
  const SearchTree t = synthetic_tree(g, ev, 1.0, 1.0);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const SampledPath p = sample_backup_path(t, 0, rng);
    CHECK(p.steps.size() == 4);
    CHECK(t.is_leaf(p.leaf));
    double prob = 1.0;
    double corr = 1.0;
    NodeId cur = 0;
    for (const SampledStep& s : p.steps) {
      CHECK(s.node == cur);
      prob *= t.node(cur).policy[s.move];
      corr *= correction_factor(t, cur, s.move);
      cur = t.child(cur, s.move);
    }
    CHECK(p.probability == doctest::Approx(prob));
    CHECK(p.correction_product == doctest::Approx(corr));
  }
}

TEST_CASE("correction clipping bounds each factor") {
  SyntheticGame g(spec3());
  LinearEvaluator ev(g);
  const SearchTree t = synthetic_tree(g, ev, 0.01, 1.0);
  GradientOptions o;
  o.clip = 0.5;
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    for (const SampledStep& s : sample_backup_path(t, 0, rng, o).steps) CHECK(std::abs(s.correction) <= 0.5);
  }
}

TEST_CASE("monte carlo gradient is unbiased and reproducible") {
  SyntheticGame g(spec3());
  LinearEvaluator ev(g);
  const SearchTree t = synthetic_tree(g, ev, 1.0, 1.0);
  const Eigen::VectorXd exact = grad_node_value_exact(t, 0);
  Rng a(8);
  Rng b(8);
  const McGradient m1 = grad_node_value_mc(t, 0, 20000, a);
  const McGradient m2 = grad_node_value_mc(t, 0, 20000, b);
  CHECK(m1.mean == m2.mean);
  CHECK(m1.samples == 20000);
  for (Eigen::Index i = 0; i < exact.size(); ++i) CHECK(std::abs(m1.mean[i] - exact[i]) < 5.0 * m1.std_error[i]);

  Rng c(8);
  Rng d(8);
  const McGradient w1 = grad_node_value_mc(t, 0, 20000, c, {}, 3);
  const McGradient w2 = grad_node_value_mc(t, 0, 20000, d, {}, 3);
  CHECK(w1.mean == w2.mean);
  CHECK(w1.samples == 20000);
  for (Eigen::Index i = 0; i < exact.size(); ++i) CHECK(std::abs(w1.mean[i] - exact[i]) < 5.0 * w1.std_error[i]);
}

TEST_CASE("gradient engine") {
  const SearchTree t = hand_tree();
  GradientEngine exact;
  CHECK(exact.node_gradient(t, 0)[0] == doctest::Approx(0.10540782082164162).epsilon(1e-13));
  CHECK(exact.move_gradient(t, 0, 1)[0] == doctest::Approx(0.18877033439907273).epsilon(1e-14));
  GradientEngine mc(GradientMode::kMonteCarlo, 50000, {}, 4);
  CHECK(std::abs(mc.node_gradient(t, 0)[0] - 0.10540782082164162) < 0.03);
  CHECK(parse_gradient_mode("mc") == GradientMode::kMonteCarlo);
  CHECK(to_string(GradientMode::kExact) == "exact");
  CHECK_THROWS_AS(parse_gradient_mode("fast"), FormatError);
}
