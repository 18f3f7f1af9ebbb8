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

#include "mcss/learning.hpp"

#include "mcss/errors.hpp"

#include <cmath>

namespace mcss {

namespace {

Eigen::VectorXd zeros(std::size_t dim) { return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)); }

const SearchTree& require_tree(const SearchTree* tree) {
  if (tree == nullptr) throw ContractError("learning sample has no search tree");
  return *tree;
}

void require_expanded(const SearchTree& tree, NodeId id) {
  if (!tree.node(id).expanded) throw ContractError("learning sample node has no valued children");
}

double t_agent(const SearchTree& tree) { return tree.backup().t_agent.value(); }

// Q gradient either through the move recursion or through the successor
// player-0 node gradients.
Eigen::VectorXd move_grad(const SearchTree& tree, NodeId id, std::size_t k, GradientEngine& engine,
                          bool node_form) {
  if (!node_form) return engine.move_gradient(tree, id, k);
  const NodeId v = tree.child(id, k);
  const SearchNode& n = tree.node(v);
  if (!n.expanded || tree.is_agent_node(v)) return engine.node_gradient(tree, v);
  Eigen::VectorXd g = zeros(tree.evaluator().dim());
  for (std::size_t j = 0; j < n.children.size(); ++j) {
    if (n.policy[j] == 0.0) continue;
    g += n.policy[j] * engine.node_gradient(tree, n.children[j]);
  }
  return g;
}

double kl(std::span<const double> target, std::span<const double> model) {
  double out = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] > 0.0) out += target[k] * std::log(target[k] / model[k]);
  }
  return out;
}

std::size_t dim_of(std::span<const TeacherExample> examples) {
  return require_tree(examples.front().tree).evaluator().dim();
}

// Static value of a child for the one-step model; terminal children keep
// their outcome value and carry no gradient.
double static_child_value(const SearchTree& tree, NodeId child, const Evaluator& evaluator,
                          const WeightVector& weights) {
  const SearchNode& c = tree.node(child);
  if (c.terminal) return tree.backup().terminal_value(*c.outcome);
  return evaluator.evaluate(c.state, weights);
}

std::vector<double> one_step_values(const SearchTree& tree, NodeId id, const Evaluator& evaluator,
                                    const WeightVector& weights) {
  const SearchNode& n = tree.node(id);
  std::vector<double> h(n.children.size());
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = static_child_value(tree, n.children[k], evaluator, weights);
  return h;
}

}  // namespace

void LearningConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ContractError("learning rate must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ContractError("gamma must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ContractError("lambda must lie in [0, 1]");
  if (!(sigmoid_temperature > 0.0) || !std::isfinite(sigmoid_temperature)) {
    throw ContractError("sigmoid temperature must be > 0");
  }
  if (mc_samples == 0) throw ContractError("mc_samples must be >= 1");
  if (workers < 1) throw ContractError("workers must be >= 1");
}

UpdateDelta UpdateDelta::zero(std::size_t dim, std::string rule) {
  return UpdateDelta{zeros(dim), std::move(rule), 0.0};
}

double supervised_kl_loss(std::span<const TeacherExample> examples) {
  double loss = 0.0;
  for (const TeacherExample& ex : examples) {
    const SearchTree& tree = require_tree(ex.tree);
    require_expanded(tree, ex.node);
    const SearchNode& n = tree.node(ex.node);
    if (ex.teacher.size() != n.children.size()) {
      throw ContractError("teacher distribution does not match the legal moves");
    }
    loss += kl(ex.teacher.probabilities(), n.policy);
  }
  return loss;
}

UpdateDelta supervised_kl_delta(std::span<const TeacherExample> examples, const LearningConfig& cfg,
                                GradientEngine& engine, bool node_form) {
  cfg.validate();
  if (examples.empty()) throw ContractError("supervised rule needs at least one example");
  UpdateDelta out = UpdateDelta::zero(dim_of(examples), "supervised");
  out.loss = supervised_kl_loss(examples);
  for (const TeacherExample& ex : examples) {
    const SearchTree& tree = *ex.tree;
    if (!tree.is_agent_node(ex.node)) throw ContractError("supervised rule applies at player-0 nodes");
    const SearchNode& n = tree.node(ex.node);
    Eigen::VectorXd sum = zeros(out.delta.size());
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      const double residual = ex.teacher[k] - n.policy[k];
      if (residual == 0.0) continue;
      sum += residual * move_grad(tree, ex.node, k, engine, node_form);
    }
    out.delta += (cfg.learning_rate / t_agent(tree)) * sum;
  }
  return out;
}

std::vector<Eigen::VectorXd> eligibility_traces(std::span<const Eigen::VectorXd> value_gradients, double gamma,
                                                double lambda) {
  std::vector<Eigen::VectorXd> traces;
  traces.reserve(value_gradients.size());
  for (std::size_t t = 0; t < value_gradients.size(); ++t) {
    if (t == 0) {
      traces.push_back(value_gradients[0]);
    } else {
      traces.push_back(gamma * lambda * traces.back() + value_gradients[t]);
    }
  }
  return traces;
}

UpdateDelta td_lambda_delta(const Trajectory& trajectory, const LearningConfig& cfg) {
  cfg.validate();
  if (trajectory.turns.empty()) throw ContractError("TD(lambda) needs a non-empty trajectory");
  if (!trajectory.reward_signal) throw ContractError("TD(lambda) needs the final reward");
  std::vector<Eigen::VectorXd> grads;
  grads.reserve(trajectory.turns.size());
  for (const TurnRecord& turn : trajectory.turns) grads.push_back(turn.value_gradient);
  const std::vector<Eigen::VectorXd> traces = eligibility_traces(grads, cfg.gamma, cfg.lambda);

  UpdateDelta out = UpdateDelta::zero(static_cast<std::size_t>(grads.front().size()), "td_lambda");
  Eigen::VectorXd sum = out.delta;
  const std::size_t n = trajectory.turns.size();
  for (std::size_t t = 0; t < n; ++t) {
    const bool last = t + 1 == n;
    const double reward = last ? *trajectory.reward_signal : 0.0;
    const double next = last ? 0.0 : trajectory.turns[t + 1].value;
    const double delta_t = reward + cfg.gamma * next - trajectory.turns[t].value;
    out.loss += 0.5 * delta_t * delta_t;
    sum += delta_t * traces[t];
  }
  out.delta = cfg.learning_rate * sum;
  return out;
}

double q_learning_loss(std::span<const QSample> samples) {
  double loss = 0.0;
  for (const QSample& s : samples) {
    const SearchTree& tree = require_tree(s.tree);
    require_expanded(tree, s.node);
    const double r = tree.move_value(s.node, s.move) - s.target;
    loss += 0.5 * r * r;
  }
  return loss;
}

UpdateDelta q_learning_delta(std::span<const QSample> samples, const LearningConfig& cfg, GradientEngine& engine) {
  cfg.validate();
  if (samples.empty()) throw ContractError("Q-learning needs at least one sample");
  UpdateDelta out = UpdateDelta::zero(require_tree(samples.front().tree).evaluator().dim(), "q_learning");
  out.loss = q_learning_loss(samples);
  Eigen::VectorXd sum = out.delta;
  for (const QSample& s : samples) {
    const double residual = s.tree->move_value(s.node, s.move) - s.target;
    if (residual == 0.0) continue;
    sum += residual * engine.move_gradient(*s.tree, s.node, s.move);
  }
  out.delta = -cfg.learning_rate * sum;
  return out;
}

UpdateDelta q_learning_bootstrap_delta(std::span<const QBootstrapSample> samples, const Evaluator& evaluator,
                                       const WeightVector& weights, const LearningConfig& cfg) {
  cfg.validate();
  UpdateDelta out = UpdateDelta::zero(evaluator.dim(), "q_bootstrap");
  Eigen::VectorXd sum = out.delta;
  for (const QBootstrapSample& s : samples) {
    const SearchTree& tree = require_tree(s.tree);
    require_expanded(tree, s.node);
    const SearchNode& v = tree.node(tree.child(s.node, s.move));
    if (v.terminal) continue;
    const double residual = evaluator.evaluate(v.state, weights) - v.value;
    out.loss += 0.5 * residual * residual;
    if (residual != 0.0) sum += residual * evaluator.gradient(v.state, weights);
  }
  out.delta = -cfg.learning_rate * sum;
  return out;
}

Eigen::VectorXd pg_score(const SearchTree& tree, NodeId node, std::size_t move_played, GradientEngine& engine,
                         bool node_form) {
  require_expanded(tree, node);
  if (!tree.is_agent_node(node)) throw ContractError("policy gradient applies at player-0 nodes");
  const SearchNode& n = tree.node(node);
  if (move_played >= n.children.size()) throw ContractError("played move out of range");
  std::vector<Eigen::VectorXd> grads;
  grads.reserve(n.children.size());
  for (std::size_t k = 0; k < n.children.size(); ++k) grads.push_back(move_grad(tree, node, k, engine, node_form));
  Eigen::VectorXd mean = zeros(tree.evaluator().dim());
  for (std::size_t k = 0; k < grads.size(); ++k) mean += n.policy[k] * grads[k];
  return (grads[move_played] - mean) / t_agent(tree);
}

UpdateDelta pg_expectation_delta(const Trajectory& trajectory, const LearningConfig& cfg, GradientEngine& engine,
                                 bool node_form) {
  cfg.validate();
  if (!trajectory.reward_signal) throw ContractError("policy gradient needs the game reward");
  if (trajectory.turns.empty()) throw ContractError("policy gradient needs a non-empty trajectory");
  const std::size_t dim = require_tree(trajectory.turns.front().tree.get()).evaluator().dim();
  UpdateDelta out = UpdateDelta::zero(dim, "pg_expectation");
  const double r = *trajectory.reward_signal;
  if (r == 0.0) return out;
  Eigen::VectorXd sum = out.delta;
  for (const TurnRecord& turn : trajectory.turns) {
    sum += pg_score(require_tree(turn.tree.get()), SearchTree::root(), turn.move_played, engine, node_form);
  }
  out.delta = cfg.learning_rate * r * sum;
  return out;
}

double win_probability(double value, double tau) { return 1.0 / (1.0 + std::exp(-value / tau)); }

double regression_loss(const Trajectory& trajectory, const LearningConfig& cfg) {
  if (!trajectory.outcome_reward) throw ContractError("regression needs the game result");
  double loss = 0.0;
  for (const TurnRecord& turn : trajectory.turns) {
    const double e = *trajectory.outcome_reward - win_probability(turn.value, cfg.sigmoid_temperature);
    loss += 0.5 * e * e;
  }
  return loss;
}

UpdateDelta regression_delta(const Trajectory& trajectory, const LearningConfig& cfg) {
  cfg.validate();
  if (trajectory.turns.empty()) throw ContractError("regression needs a non-empty trajectory");
  UpdateDelta out = UpdateDelta::zero(static_cast<std::size_t>(trajectory.turns.front().value_gradient.size()),
                                      "regression");
  out.loss = regression_loss(trajectory, cfg);
  const double tau = cfg.sigmoid_temperature;
  Eigen::VectorXd sum = out.delta;
  for (const TurnRecord& turn : trajectory.turns) {
    const double p = win_probability(turn.value, tau);
    sum += (*trajectory.outcome_reward - p) * ((1.0 - p) * p / tau) * turn.value_gradient;
  }
  out.delta = cfg.learning_rate * sum;
  return out;
}

std::vector<BootstrapTarget> bootstrap_targets(const SearchTree& tree, std::span<const NodeId> ids) {
  std::vector<BootstrapTarget> out;
  for (NodeId id : ids) {
    const SearchNode& n = tree.node(id);
    if (n.expanded && !n.terminal) out.push_back({n.state, n.value});
  }
  return out;
}

std::vector<NodeId> rootstrap_nodes(const SearchTree& tree) {
  if (!tree.node(SearchTree::root()).expanded) return {};
  return {SearchTree::root()};
}

std::vector<NodeId> treestrap_nodes(const SearchTree& tree) {
  std::vector<NodeId> out;
  NodeId cur = SearchTree::root();
  if (!tree.node(cur).expanded) return out;
  out.push_back(cur);
  for (MoveId m : principal_variation(tree)) {
    cur = tree.child(cur, m.index);
    if (!tree.node(cur).expanded) break;
    out.push_back(cur);
  }
  return out;
}

double bootstrap_loss(std::span<const BootstrapTarget> targets, const Evaluator& evaluator,
                      const WeightVector& weights) {
  double loss = 0.0;
  for (const BootstrapTarget& t : targets) {
    const double e = evaluator.evaluate(t.state, weights) - t.target;
    loss += 0.5 * e * e;
  }
  return loss;
}

UpdateDelta bootstrap_delta(std::span<const BootstrapTarget> targets, const Evaluator& evaluator,
                            const WeightVector& weights, const LearningConfig& cfg) {
  cfg.validate();
  UpdateDelta out = UpdateDelta::zero(evaluator.dim(), "bootstrap");
  out.loss = bootstrap_loss(targets, evaluator, weights);
  Eigen::VectorXd sum = out.delta;
  for (const BootstrapTarget& t : targets) {
    const double residual = evaluator.evaluate(t.state, weights) - t.target;
    if (residual != 0.0) sum += residual * evaluator.gradient(t.state, weights);
  }
  out.delta = -cfg.learning_rate * sum;
  return out;
}

double distribution_bootstrap_loss(std::span<const DistributionExample> examples, const Evaluator& evaluator,
                                   const WeightVector& weights) {
  double loss = 0.0;
  for (const DistributionExample& ex : examples) {
    const SearchTree& tree = require_tree(ex.tree);
    require_expanded(tree, ex.node);
    const std::vector<double> h = one_step_values(tree, ex.node, evaluator, weights);
    const Distribution model = backup_policy_agent(h, tree.backup().t_agent);
    loss += kl(tree.node(ex.node).policy, model.probabilities());
  }
  return loss;
}

UpdateDelta distribution_bootstrap_delta(std::span<const DistributionExample> examples,
                                         const Evaluator& evaluator, const WeightVector& weights,
                                         const LearningConfig& cfg) {
  cfg.validate();
  UpdateDelta out = UpdateDelta::zero(evaluator.dim(), "distribution_bootstrap");
  out.loss = distribution_bootstrap_loss(examples, evaluator, weights);
  for (const DistributionExample& ex : examples) {
    const SearchTree& tree = *ex.tree;
    if (!tree.is_agent_node(ex.node)) throw ContractError("distribution bootstrap applies at player-0 nodes");
    const SearchNode& n = tree.node(ex.node);
    const std::vector<double> h = one_step_values(tree, ex.node, evaluator, weights);
    const Distribution model = backup_policy_agent(h, tree.backup().t_agent);
    Eigen::VectorXd sum = zeros(evaluator.dim());
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      const SearchNode& c = tree.node(n.children[k]);
      const double residual = n.policy[k] - model[k];
      if (c.terminal || residual == 0.0) continue;
      sum += residual * evaluator.gradient(c.state, weights);
    }
    out.delta += (cfg.learning_rate / t_agent(tree)) * sum;
  }
  return out;
}

}  // namespace mcss
