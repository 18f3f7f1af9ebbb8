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

#include "mcss/rng.hpp"
#include "mcss/search.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

// Gradients of node and move values with respect to the evaluation weights.
// The opponent backup policy is held constant under differentiation, so
// dP_b / dw = 0 everywhere. Unexpanded nodes are leaves with V = H; terminal
// leaves have zero gradient.
namespace mcss {

using GradientVector = Eigen::VectorXd;

// Per-step factor {Q(u, a) - V(u)} / T_a + 1 at a player-0 node.
double correction_factor(const SearchTree& tree, NodeId id, std::size_t k);

// grad V(node) by the node-value recursion, anchored at grad H at leaves.
GradientVector grad_node_value_exact(const SearchTree& tree, NodeId id);

// grad Q(node, a_k) by the move-value recursion over grandchild moves.
GradientVector grad_move_value_exact(const SearchTree& tree, NodeId id, std::size_t k);

// grad Q(node, a_k) = sum_b P_b(b) grad V(u(b)), through grad_node_value_exact.
GradientVector grad_move_value_via_nodes(const SearchTree& tree, NodeId id, std::size_t k);

struct GradientOptions {
  // Correction factors are clipped to [-clip, clip] when clip_enabled.
  double clip = 1e3;
  bool clip_enabled = true;
};

struct SampledStep {
  NodeId node = kNoNode;
  std::size_t move = 0;
  double probability = 0.0;
  double correction = 1.0;  // 1 at non-agent nodes
};

struct SampledPath {
  std::vector<SampledStep> steps;
  NodeId leaf = kNoNode;
  double probability = 1.0;       // product of step probabilities
  double correction_product = 1.0;
};

// Samples one path from `start` to a leaf with the stored backup policies.
SampledPath sample_backup_path(const SearchTree& tree, NodeId start, Rng& rng,
                               const GradientOptions& options = {});

struct McGradient {
  GradientVector mean;
  GradientVector std_error;  // per component
  std::size_t samples = 0;
};

// Unbiased path-sampling estimate of grad V(node). With workers > 1 the
// samples are split across threads with independent derived streams and
// merged in worker order; results then depend on (seed, workers).
McGradient grad_node_value_mc(const SearchTree& tree, NodeId id, std::size_t n_samples, Rng& rng,
                              const GradientOptions& options = {}, int workers = 1);

enum class GradientMode { kExact, kMonteCarlo };

std::string to_string(GradientMode mode);
GradientMode parse_gradient_mode(const std::string& text);

// Source of grad V / grad Q for the learning rules.
class GradientEngine {
 public:
  explicit GradientEngine(GradientMode mode = GradientMode::kExact, std::size_t mc_samples = 32,
                          GradientOptions options = {}, std::uint64_t seed = 0, int workers = 1);

  GradientVector node_gradient(const SearchTree& tree, NodeId id);
  GradientVector move_gradient(const SearchTree& tree, NodeId id, std::size_t k);

  GradientMode mode() const { return mode_; }
  Rng& rng() { return rng_; }

 private:
  GradientMode mode_;
  std::size_t mc_samples_;
  GradientOptions options_;
  int workers_;
  Rng rng_;
};

}  // namespace mcss
