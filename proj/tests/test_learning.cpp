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
#include "mcss/learning.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace mcss;
using mcss::testing::TwoPlyGame;

namespace {

LearningConfig eps(double e) {
  LearningConfig c;
  c.learning_rate = e;
  return c;
}

struct Fixture {
  SyntheticGame game;
  LinearEvaluator ev;
  WeightVector w;
  SearchTree tree;

  explicit Fixture(std::uint64_t seed)
      : game(spec(seed)),
        ev(game),
        w(Eigen::VectorXd::LinSpaced(4, -0.7, 0.9)),
        tree(build_full_tree(game, ev, w, game.initial_state(), 2, backup())) {}

  static SyntheticTreeSpec spec(std::uint64_t seed) {
    SyntheticTreeSpec s;
    s.branching = 3;
    s.depth = 7;
    s.seed = seed;
    s.feature_dim = 4;
    return s;
  }
  static BackupConfig backup() {
    BackupConfig b;
    b.t_agent = Temperature(0.8);
    b.t_opponent = Temperature(1.2);
    return b;
  }

  SearchTree at(const Eigen::VectorXd& weights) const {
    SearchTree t = tree;
    t.revalue(WeightVector(weights), true);
    return t;
  }
};

TurnRecord turn(double value, double grad) {
  TurnRecord t;
  t.value = value;
  t.value_gradient = Eigen::VectorXd::Constant(1, grad);
  return t;
}

}  // namespace

TEST_CASE("supervised rule on the hand-built game") {
  TwoPlyGame g;
  LinearEvaluator ev(g);
  const SearchTree t = build_full_tree(g, ev, WeightVector(Eigen::VectorXd::Ones(1)), g.initial_state(), 1, {});
  const TeacherExample ex{&t, 0, Distribution({0.5, 0.5})};
  CHECK(supervised_kl_loss(std::span(&ex, 1)) == doctest::Approx(0.10888983399891419).epsilon(1e-13));
  GradientEngine engine;
  const UpdateDelta d = supervised_kl_delta(std::span(&ex, 1), eps(0.1), engine);
  CHECK(d.delta[0] == doctest::Approx(-0.021020967143145573).epsilon(1e-13));
  CHECK(d.loss == doctest::Approx(0.10888983399891419).epsilon(1e-13));
  const UpdateDelta n = supervised_kl_delta(std::span(&ex, 1), eps(0.1), engine, true);
  CHECK(n.delta[0] == doctest::Approx(d.delta[0]).epsilon(1e-13));
  const TeacherExample same{&t, 0, Distribution(t.node(0).policy)};
  CHECK(std::abs(supervised_kl_delta(std::span(&same, 1), eps(0.1), engine).delta[0]) < 1e-15);
}

TEST_CASE("q-learning rule on the hand-built game") {
  TwoPlyGame g;
  LinearEvaluator ev(g);
  const SearchTree t = build_full_tree(g, ev, WeightVector(Eigen::VectorXd::Ones(1)), g.initial_state(), 1, {});
  const QSample s{&t, 0, 0, 0.0};
  GradientEngine engine;
  const UpdateDelta d = q_learning_delta(std::span(&s, 1), eps(0.1), engine);
  CHECK(d.delta[0] == doctest::Approx(-0.05800256583859738).epsilon(1e-13));
  CHECK(q_learning_loss(std::span(&s, 1)) == doctest::Approx(0.2900128291929869).epsilon(1e-13));
  const QSample hit{&t, 0, 1, t.move_value(0, 1)};
  CHECK(q_learning_delta(std::span(&hit, 1), eps(0.1), engine).delta[0] == 0.0);
}

TEST_CASE("eligibility traces") {
  const std::vector<Eigen::VectorXd> g{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0),
                                       Eigen::VectorXd::Constant(1, -1.0)};
  const auto e = eligibility_traces(g, 0.9, 0.5);
  CHECK(e[0][0] == 1.0);
  CHECK(e[1][0] == doctest::Approx(2.45));
  CHECK(e[2][0] == doctest::Approx(0.45 * 2.45 - 1.0));
  const auto lambda0 = eligibility_traces(g, 1.0, 0.0);
  for (std::size_t t = 0; t < 3; ++t) CHECK(lambda0[t] == g[t]);
}

TEST_CASE("td(lambda) on a two-turn trajectory") {
  Trajectory tr;
  tr.turns = {turn(0.2, 1.0), turn(0.5, 2.0)};
  tr.reward_signal = 1.0;
  LearningConfig c = eps(0.1);
  c.gamma = 1.0;
  c.lambda = 0.5;
  const UpdateDelta d = td_lambda_delta(tr, c);
  CHECK(d.delta[0] == doctest::Approx(0.155).epsilon(1e-14));
  CHECK(d.loss == doctest::Approx(0.17).epsilon(1e-14));
  tr.reward_signal.reset();
  CHECK_THROWS_AS(td_lambda_delta(tr, c), ContractError);
}

TEST_CASE("regression rule") {
  Trajectory tr;
  tr.turns = {turn(0.3, 2.0)};
  tr.outcome_reward = 1.0;
  LearningConfig c = eps(0.1);
  c.sigmoid_temperature = 2.0;
  CHECK(win_probability(0.3, 2.0) == doctest::Approx(0.5374298453437496).epsilon(1e-14));
  CHECK(regression_delta(tr, c).delta[0] == doctest::Approx(0.01149944809662213).epsilon(1e-13));
  CHECK(regression_loss(tr, c) == doctest::Approx(0.10698557398935371).epsilon(1e-13));
  tr.outcome_reward.reset();
  CHECK_THROWS_AS(regression_delta(tr, c), ContractError);
}

TEST_CASE("bootstrap rule") {
  TwoPlyGame g;
  LinearEvaluator ev(g);
  const WeightVector w(Eigen::VectorXd::Ones(1));
  const GameState leaf = replay(g, parse_move_sequence("0,0"));
  const BootstrapTarget target{leaf, 0.5};
  const UpdateDelta d = bootstrap_delta(std::span(&target, 1), ev, w, eps(0.1));
  CHECK(d.delta[0] == doctest::Approx(-0.05));
  CHECK(bootstrap_loss(std::span(&target, 1), ev, w) == doctest::Approx(0.125));

  const SearchTree t = build_full_tree(g, ev, w, g.initial_state(), 1, {});
  CHECK(rootstrap_nodes(t) == std::vector<NodeId>{0});
  CHECK(treestrap_nodes(t) == std::vector<NodeId>{0, t.child(0, 1)});
  std::vector<NodeId> all(t.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeId>(i);
  const auto targets = bootstrap_targets(t, all);
  CHECK(targets.size() == 3);
  CHECK(targets[0].target == t.node(0).value);
}

TEST_CASE("policy-gradient score has zero mean under the agent policy") {
  Fixture f(21);
  GradientEngine engine;
  const SearchNode& root = f.tree.node(0);
  for (bool node_form : {false, true}) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    for (std::size_t k = 0; k < 3; ++k) mean += root.policy[k] * pg_score(f.tree, 0, k, engine, node_form);
    CHECK(mean.cwiseAbs().maxCoeff() < 1e-13);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK((pg_score(f.tree, 0, k, engine, false) - pg_score(f.tree, 0, k, engine, true)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("policy-gradient score is the gradient of the log policy") {
  Fixture f(22);
  GradientEngine engine;
  const double h = 1e-6;
  for (std::size_t k = 0; k < 3; ++k) {
    const Eigen::VectorXd score = pg_score(f.tree, 0, k, engine, false);
    for (Eigen::Index i = 0; i < 4; ++i) {
      Eigen::VectorXd wp = f.w.values();
      Eigen::VectorXd wm = f.w.values();
      wp[i] += h;
      wm[i] -= h;
      const double fd = (std::log(f.at(wp).node(0).policy[k]) - std::log(f.at(wm).node(0).policy[k])) / (2 * h);
      CHECK(score[i] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("policy-gradient delta") {
  Fixture f(23);
  GradientEngine engine;
  auto shared = std::make_shared<SearchTree>(f.tree);
  Trajectory tr;
  TurnRecord t;
  t.tree = shared;
  t.move_played = 2;
  tr.turns = {t};
  tr.reward_signal = 0.0;
  CHECK(pg_expectation_delta(tr, eps(0.1), engine).delta.isZero());
  tr.reward_signal = -1.0;
  const UpdateDelta d = pg_expectation_delta(tr, eps(0.1), engine);
  CHECK((d.delta + 0.1 * pg_score(f.tree, 0, 2, engine, false)).cwiseAbs().maxCoeff() < 1e-15);
  tr.reward_signal.reset();
  CHECK_THROWS_AS(pg_expectation_delta(tr, eps(0.1), engine), ContractError);
}

TEST_CASE("small steps reduce each loss") {
  Fixture f(24);
  GradientEngine engine;
  const double e = 1e-3;
  std::vector<NodeId> agents;
  for (std::size_t i = 0; i < f.tree.size(); ++i) {
    const auto id = static_cast<NodeId>(i);
    if (f.tree.node(id).expanded && f.tree.is_agent_node(id)) agents.push_back(id);
  }

  const TeacherExample ex{&f.tree, 0, Distribution({0.6, 0.3, 0.1})};
  const Eigen::VectorXd sup = supervised_kl_delta(std::span(&ex, 1), eps(e), engine).delta;
  const SearchTree moved = f.at(f.w.values() + sup);
  const TeacherExample ex2{&moved, 0, ex.teacher};
  CHECK(supervised_kl_loss(std::span(&ex2, 1)) < supervised_kl_loss(std::span(&ex, 1)));

  std::vector<QSample> qs;
  for (NodeId id : agents) qs.push_back({&f.tree, id, 0, 0.5});
  const Eigen::VectorXd qd = q_learning_delta(qs, eps(e), engine).delta;
  const SearchTree qmoved = f.at(f.w.values() + qd);
  std::vector<QSample> qs2 = qs;
  for (QSample& s : qs2) s.tree = &qmoved;
  CHECK(q_learning_loss(qs2) < q_learning_loss(qs));

  std::vector<NodeId> all(f.tree.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeId>(i);
  const auto targets = bootstrap_targets(f.tree, all);
  const Eigen::VectorXd bd = bootstrap_delta(targets, f.ev, f.w, eps(e)).delta;
  CHECK(bootstrap_loss(targets, f.ev, WeightVector(f.w.values() + bd)) < bootstrap_loss(targets, f.ev, f.w));

  std::vector<DistributionExample> dx;
  for (NodeId id : agents) dx.push_back({&f.tree, id});
  const Eigen::VectorXd dd = distribution_bootstrap_delta(dx, f.ev, f.w, eps(e)).delta;
  CHECK(distribution_bootstrap_loss(dx, f.ev, WeightVector(f.w.values() + dd)) <
        distribution_bootstrap_loss(dx, f.ev, f.w));

  std::vector<QBootstrapSample> qb;
  for (NodeId id : agents) qb.push_back({&f.tree, id, 1});
  const UpdateDelta qbd = q_learning_bootstrap_delta(qb, f.ev, f.w, eps(e));
  CHECK(qbd.loss > 0.0);
  CHECK(qbd.delta.allFinite());
}

TEST_CASE("deltas are linear in the learning rate") {
  Fixture f(25);
  GradientEngine engine;
  const TeacherExample ex{&f.tree, 0, Distribution({0.2, 0.5, 0.3})};
  CHECK(supervised_kl_delta(std::span(&ex, 1), eps(0.02), engine).delta ==
        2.0 * supervised_kl_delta(std::span(&ex, 1), eps(0.01), engine).delta);
  const std::vector<NodeId> root{0};
  const auto targets = bootstrap_targets(f.tree, root);
  CHECK(bootstrap_delta(targets, f.ev, f.w, eps(0.5)).delta == 0.5 * bootstrap_delta(targets, f.ev, f.w, eps(1.0)).delta);
}

TEST_CASE("learning config validation") {
  LearningConfig c;
  c.learning_rate = -1.0;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = {};
  c.lambda = 1.5;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = {};
  c.sigmoid_temperature = 0.0;
  CHECK_THROWS_AS(c.validate(), ContractError);
}
