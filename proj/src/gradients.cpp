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

#include "mcss/gradients.hpp"

#include "mcss/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace mcss {

namespace {

void require_softmax(const SearchTree& tree) {
  if (tree.backup().hard_max) {
    throw ContractError("gradients are undefined in hard-max mode; use a softmax backup");
  }
}

GradientVector leaf_gradient(const SearchTree& tree, NodeId id) {
  const SearchNode& n = tree.node(id);
  if (n.terminal) return GradientVector::Zero(static_cast<Eigen::Index>(tree.evaluator().dim()));
  return tree.evaluator().gradient(n.state, tree.weights());
}

GradientVector node_recursion(const SearchTree& tree, NodeId id) {
  const SearchNode& n = tree.node(id);
  if (!n.expanded) return leaf_gradient(tree, id);
  const bool agent = tree.is_agent_node(id);
  GradientVector g = GradientVector::Zero(static_cast<Eigen::Index>(tree.evaluator().dim()));
  for (std::size_t k = 0; k < n.children.size(); ++k) {
    if (n.policy[k] == 0.0) continue;
    const double weight = n.policy[k] * (agent ? correction_factor(tree, id, k) : 1.0);
    g += weight * node_recursion(tree, n.children[k]);
  }
  return g;
}

GradientVector value_by_moves(const SearchTree& tree, NodeId id);

GradientVector move_recursion(const SearchTree& tree, NodeId id, std::size_t k) {
  return value_by_moves(tree, tree.child(id, k));
}

GradientVector value_by_moves(const SearchTree& tree, NodeId id) {
  const SearchNode& n = tree.node(id);
  if (!n.expanded) return leaf_gradient(tree, id);
  GradientVector g = GradientVector::Zero(static_cast<Eigen::Index>(tree.evaluator().dim()));
  if (tree.is_agent_node(id)) {
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      if (n.policy[k] == 0.0) continue;
      g += n.policy[k] * correction_factor(tree, id, k) * move_recursion(tree, id, k);
    }
  } else {
    for (std::size_t j = 0; j < n.children.size(); ++j) {
      if (n.policy[j] == 0.0) continue;
      g += n.policy[j] * value_by_moves(tree, n.children[j]);
    }
  }
  return g;
}

}  // namespace

double correction_factor(const SearchTree& tree, NodeId id, std::size_t k) {
  if (!tree.is_agent_node(id)) return 1.0;
  const SearchNode& n = tree.node(id);
  return (tree.move_value(id, k) - n.value) / tree.backup().t_agent.value() + 1.0;
}

GradientVector grad_node_value_exact(const SearchTree& tree, NodeId id) {
  require_softmax(tree);
  return node_recursion(tree, id);
}

GradientVector grad_move_value_exact(const SearchTree& tree, NodeId id, std::size_t k) {
  require_softmax(tree);
  return move_recursion(tree, id, k);
}

GradientVector grad_move_value_via_nodes(const SearchTree& tree, NodeId id, std::size_t k) {
  require_softmax(tree);
  const NodeId v = tree.child(id, k);
  const SearchNode& n = tree.node(v);
  if (!n.expanded || tree.is_agent_node(v)) return node_recursion(tree, v);
  GradientVector g = GradientVector::Zero(static_cast<Eigen::Index>(tree.evaluator().dim()));
  for (std::size_t j = 0; j < n.children.size(); ++j) {
    if (n.policy[j] == 0.0) continue;
    g += n.policy[j] * node_recursion(tree, n.children[j]);
  }
  return g;
}

SampledPath sample_backup_path(const SearchTree& tree, NodeId start, Rng& rng, const GradientOptions& options) {
  require_softmax(tree);
  SampledPath path;
  NodeId cur = start;
  while (tree.node(cur).expanded) {
    const SearchNode& n = tree.node(cur);
    const std::size_t k = sample_index(n.policy, rng);
    double c = correction_factor(tree, cur, k);
    if (options.clip_enabled) c = std::clamp(c, -options.clip, options.clip);
    path.steps.push_back({cur, k, n.policy[k], c});
    path.probability *= n.policy[k];
    path.correction_product *= c;
    cur = n.children[k];
  }
  path.leaf = cur;
  return path;
}

namespace {

struct Moments {
  GradientVector sum;
  GradientVector sum_sq;
};

Moments sample_moments(const SearchTree& tree, NodeId id, std::size_t n, Rng& rng, const GradientOptions& options) {
  const auto dim = static_cast<Eigen::Index>(tree.evaluator().dim());
  Moments m{GradientVector::Zero(dim), GradientVector::Zero(dim)};
  for (std::size_t i = 0; i < n; ++i) {
    NodeId cur = id;
    double product = 1.0;
    while (tree.node(cur).expanded) {
      const SearchNode& node = tree.node(cur);
      const std::size_t k = sample_index(node.policy, rng);
      double c = correction_factor(tree, cur, k);
      if (options.clip_enabled) c = std::clamp(c, -options.clip, options.clip);
      product *= c;
      cur = node.children[k];
    }
    const GradientVector g = product * leaf_gradient(tree, cur);
    m.sum += g;
    m.sum_sq += g.cwiseProduct(g);
  }
  return m;
}

}  // namespace

McGradient grad_node_value_mc(const SearchTree& tree, NodeId id, std::size_t n_samples, Rng& rng,
                              const GradientOptions& options, int workers) {
  require_softmax(tree);
  if (n_samples == 0) throw ContractError("Monte Carlo gradient needs at least one sample");
  if (workers < 1) throw ContractError("workers must be >= 1");
  const auto dim = static_cast<Eigen::Index>(tree.evaluator().dim());
  Moments total{GradientVector::Zero(dim), GradientVector::Zero(dim)};
  if (workers == 1) {
    total = sample_moments(tree, id, n_samples, rng, options);
  } else {
    const std::uint64_t base = rng();
    const auto w = static_cast<std::size_t>(workers);
    std::vector<Moments> parts(w);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < w; ++i) {
      const std::size_t count = n_samples / w + (i < n_samples % w ? 1 : 0);
      threads.emplace_back([&, i, count] {
        Rng local(derive_seed(base, i));
        parts[i] = sample_moments(tree, id, count, local, options);
      });
    }
    for (auto& t : threads) t.join();
    for (const Moments& p : parts) {
      total.sum += p.sum;
      total.sum_sq += p.sum_sq;
    }
  }
  const double n = static_cast<double>(n_samples);
  McGradient out;
  out.samples = n_samples;
  out.mean = total.sum / n;
  if (n_samples > 1) {
    const GradientVector var = ((total.sum_sq - n * out.mean.cwiseProduct(out.mean)) / (n - 1)).cwiseMax(0.0);
    out.std_error = (var / n).cwiseSqrt();
  } else {
    out.std_error = GradientVector::Constant(dim, std::numeric_limits<double>::infinity());
  }
  return out;
}

std::string to_string(GradientMode mode) {
  return mode == GradientMode::kExact ? "exact" : "monte_carlo";
}

GradientMode parse_gradient_mode(const std::string& text) {
  if (text == "exact") return GradientMode::kExact;
  if (text == "monte_carlo" || text == "mc") return GradientMode::kMonteCarlo;
  throw FormatError("unknown gradient mode '" + text + "' (exact, monte_carlo)");
}

GradientEngine::GradientEngine(GradientMode mode, std::size_t mc_samples, GradientOptions options, std::uint64_t seed,
                               int workers)
    : mode_(mode), mc_samples_(mc_samples), options_(options), workers_(workers), rng_(seed) {
  if (mc_samples_ == 0) throw ContractError("gradient engine: mc_samples must be >= 1");
}

GradientVector GradientEngine::node_gradient(const SearchTree& tree, NodeId id) {
  if (mode_ == GradientMode::kExact) return grad_node_value_exact(tree, id);
  return grad_node_value_mc(tree, id, mc_samples_, rng_, options_, workers_).mean;
}

GradientVector GradientEngine::move_gradient(const SearchTree& tree, NodeId id, std::size_t k) {
  if (mode_ == GradientMode::kExact) return grad_move_value_exact(tree, id, k);
  return grad_node_value_mc(tree, tree.child(id, k), mc_samples_, rng_, options_, workers_).mean;
}

}  // namespace mcss
