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
#include "mcss/gradients.hpp"
#include "mcss/policies.hpp"
#include "mcss/search.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcss {

struct LearningConfig {
  double learning_rate = 0.01;     // epsilon
  double gamma = 1.0;              // discount
  double lambda = 0.7;             // trace decay
  double sigmoid_temperature = 1.0;  // tau of the win predictor
  GradientMode gradient_mode = GradientMode::kExact;
  std::size_t mc_samples = 32;
  GradientOptions gradient_options;
  // Threads for Monte Carlo gradient estimates.
  int workers = 1;

  void validate() const;
};

// A weight change produced by one rule. Deltas are plain values; applying
// them is the caller's job.
struct UpdateDelta {
  Eigen::VectorXd delta;
  std::string rule;
  double loss = 0.0;  // loss before the update, where the rule defines one

  static UpdateDelta zero(std::size_t dim, std::string rule);
};

// One training position for the supervised rule: the search tree rooted at s
// (or any player-0 node inside it) and the teacher distribution over its moves.
struct TeacherExample {
  const SearchTree* tree = nullptr;
  NodeId node = SearchTree::root();
  Distribution teacher;
};

// KL(pi* || P_a) summed over examples.
double supervised_kl_loss(std::span<const TeacherExample> examples);

// Delta w = (eps / T_a) sum_s sum_a {pi*(a|s) - P_a(a;s)} grad Q(s,a).
// With node_form the move gradients go through grad V of the successor
// player-0 nodes instead of the move recursion.
UpdateDelta supervised_kl_delta(std::span<const TeacherExample> examples, const LearningConfig& cfg,
                                GradientEngine& engine, bool node_form = false);

// One player-0 turn of a game: its retained tree, the move played, and the
// root value and gradient.
struct TurnRecord {
  std::shared_ptr<const SearchTree> tree;
  std::size_t move_played = 0;
  double value = 0.0;
  Eigen::VectorXd value_gradient;
};

struct Trajectory {
  std::vector<TurnRecord> turns;     // u_1 .. u_{L_a - 1}
  // r(sigma): 1 win, 0 loss, draw per the game's draw reward.
  std::optional<double> outcome_reward;
  // Reward on the final transition for TD and the policy gradient. Training
  // uses the in-tree terminal value mapping so both sides share one scale.
  std::optional<double> reward_signal;
  int game_id = 0;
};

// e(t) = gamma lambda e(t-1) + grad V(u_t), e(0) = 0.
std::vector<Eigen::VectorXd> eligibility_traces(std::span<const Eigen::VectorXd> value_gradients,
                                                double gamma, double lambda);

// Delta w = eps sum_t e(t) delta_t, delta_t = r_{t+1} + gamma V(u_{t+1}) - V(u_t),
// V(terminal) = 0 and the reward only on the final transition.
UpdateDelta td_lambda_delta(const Trajectory& trajectory, const LearningConfig& cfg);

// Samples for the value-based Q rule: Q(s, a_k) from `tree`, target V_b(v)
// held constant.
struct QSample {
  const SearchTree* tree = nullptr;
  NodeId node = SearchTree::root();
  std::size_t move = 0;
  double target = 0.0;
};

double q_learning_loss(std::span<const QSample> samples);
UpdateDelta q_learning_delta(std::span<const QSample> samples, const LearningConfig& cfg,
                             GradientEngine& engine);

// Q(s, a) replaced by H(v(a; s)): the residual H(v) - V_b(v) only needs static
// evaluations and the tree's node values.
struct QBootstrapSample {
  const SearchTree* tree = nullptr;
  NodeId node = SearchTree::root();
  std::size_t move = 0;
};

UpdateDelta q_learning_bootstrap_delta(std::span<const QBootstrapSample> samples, const Evaluator& evaluator,
                                       const WeightVector& weights, const LearningConfig& cfg);

// Delta w = eps r sum_t [grad Q(u_t, a_t) - sum_a P_a grad Q(u_t, a)] / T_a.
// node_form evaluates the same score through successor node gradients.
UpdateDelta pg_expectation_delta(const Trajectory& trajectory, const LearningConfig& cfg,
                                 GradientEngine& engine, bool node_form = false);

// e_w(t) of one turn, exposed for cross-checking the two forms.
Eigen::VectorXd pg_score(const SearchTree& tree, NodeId node, std::size_t move_played,
                         GradientEngine& engine, bool node_form);

double win_probability(double value, double tau);
double regression_loss(const Trajectory& trajectory, const LearningConfig& cfg);
UpdateDelta regression_delta(const Trajectory& trajectory, const LearningConfig& cfg);

// Bootstrapping target: the static evaluation of `state` is pulled toward the
// deeper value `target`.
struct BootstrapTarget {
  GameState state;
  double target = 0.0;
};

// Expanded non-terminal nodes of `ids` as targets with their tree values.
std::vector<BootstrapTarget> bootstrap_targets(const SearchTree& tree, std::span<const NodeId> ids);
// Root only.
std::vector<NodeId> rootstrap_nodes(const SearchTree& tree);
// Expanded nodes along the principal variation, root included.
std::vector<NodeId> treestrap_nodes(const SearchTree& tree);

double bootstrap_loss(std::span<const BootstrapTarget> targets, const Evaluator& evaluator,
                      const WeightVector& weights);
UpdateDelta bootstrap_delta(std::span<const BootstrapTarget> targets, const Evaluator& evaluator,
                            const WeightVector& weights, const LearningConfig& cfg);

// Distribution bootstrapping at a player-0 node: target P_a from the tree,
// model P_H = Boltzmann(H(v(a; s)) / T_a) over one-step static values.
struct DistributionExample {
  const SearchTree* tree = nullptr;
  NodeId node = SearchTree::root();
};

double distribution_bootstrap_loss(std::span<const DistributionExample> examples, const Evaluator& evaluator,
                                   const WeightVector& weights);
UpdateDelta distribution_bootstrap_delta(std::span<const DistributionExample> examples,
                                         const Evaluator& evaluator, const WeightVector& weights,
                                         const LearningConfig& cfg);

}  // namespace mcss
