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

#include "mcss/verify.hpp"

#include "mcss/config.hpp"
#include "mcss/errors.hpp"
#include "mcss/gradients.hpp"
#include "mcss/learning.hpp"
#include "mcss/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <unordered_map>

namespace mcss {

namespace {

using Vec = Eigen::VectorXd;

std::string fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

std::string sci(double x) { return fmt("%.3e", x); }

CheckResult timed(const std::string& suite, const std::string& name,
                  const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r{suite, name, false, "", 0.0};
  try {
    auto [ok, detail] = body();
    r.passed = ok;
    r.detail = std::move(detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

int uniform_int(Rng& rng, int lo, int hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  return lo + std::min(hi - lo, static_cast<int>(uniform01(rng) * span));
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

Vec random_vector(Rng& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Softmax expectation written out directly, independent of the policy module.
std::vector<double> softmax(const std::vector<double>& e, double t) {
  const double m = *std::max_element(e.begin(), e.end());
  std::vector<double> p(e.size());
  double z = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) z += p[i] = std::exp((e[i] - m) / t);
  for (double& x : p) x /= z;
  return p;
}

// Value recursion with the opponent policies frozen at the base weights.
class FrozenOracle {
 public:
  FrozenOracle(const Game& game, const Vec& base, int depth, double t_agent, double t_opponent,
               double terminal_scale = 2.0)
      : game_(game), depth_(depth), t_agent_(t_agent), t_opponent_(t_opponent), scale_(terminal_scale) {
    recording_ = true;
    value(game.initial_state(), 0, base);
    recording_ = false;
  }

  // Seeds frozen policies for the subtree below `root`.
  void record(const GameState& root, const Vec& base) {
    recording_ = true;
    value(root, 0, base);
    recording_ = false;
  }

  double value(const GameState& s, int d, const Vec& w) {
    if (auto outcome = game_.terminal_outcome(s)) return (outcome->reward(0) - 0.5) * scale_;
    const bool agent = s.player_to_move == 0;
    if (agent && d >= depth_) return game_.features(s).dot(w);
    const std::size_t n = game_.num_legal_moves(s);
    std::vector<double> q(n);
    for (std::size_t k = 0; k < n; ++k) {
      const GameState c = game_.apply_move(s, MoveId{k});
      q[k] = value(c, d + (c.player_to_move == 0 ? 1 : 0), w);
    }
    std::vector<double> p;
    if (agent) {
      p = softmax(q, t_agent_);
    } else if (recording_) {
      std::vector<double> neg(q);
      for (double& x : neg) x = -x;
      p = softmax(neg, t_opponent_);
      frozen_[s] = p;
    } else {
      p = frozen_.at(s);
    }
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) v += p[k] * q[k];
    return v;
  }

 private:
  const Game& game_;
  int depth_;
  double t_agent_;
  double t_opponent_;
  double scale_;
  bool recording_ = false;
  std::unordered_map<GameState, std::vector<double>, GameStateHash> frozen_;
};

Vec central_difference(const std::function<double(const Vec&)>& f, const Vec& w0, double h) {
  Vec g(w0.size());
  for (Eigen::Index i = 0; i < w0.size(); ++i) {
    Vec wp = w0;
    Vec wm = w0;
    wp[i] += h;
    wm[i] -= h;
    g[i] = (f(wp) - f(wm)) / (2.0 * h);
  }
  return g;
}

double relative_error(const Vec& a, const Vec& b, double floor) {
  return max_abs(a - b) / std::max(max_abs(b), floor);
}

class ConstantEvaluator final : public Evaluator {
 public:
  ConstantEvaluator(std::size_t dim, double c) : dim_(dim), c_(c) {}
  std::size_t dim() const override { return dim_; }
  double evaluate(const GameState&, const WeightVector&) const override { return c_; }
  FeatureVector gradient(const GameState&, const WeightVector&) const override {
    return FeatureVector::Zero(static_cast<Eigen::Index>(dim_));
  }

 private:
  std::size_t dim_;
  double c_;
};

BackupConfig backup_with(double t_agent, double t_opponent) {
  BackupConfig b;
  b.t_agent = Temperature(t_agent);
  b.t_opponent = Temperature(t_opponent);
  return b;
}

Rng stream(std::uint64_t seed, std::uint64_t tag) { return Rng(derive_seed(seed, tag)); }

double minimax_rec(const Game& game, const Evaluator& ev, const WeightVector& w, const GameState& s, int d,
                   int depth, double scale) {
  if (auto outcome = game.terminal_outcome(s)) return (outcome->reward(0) - 0.5) * scale;
  const bool agent = s.player_to_move == 0;
  if (agent && d >= depth) return ev.evaluate(s, w);
  const std::size_t n = game.num_legal_moves(s);
  double best = agent ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const GameState c = game.apply_move(s, MoveId{k});
    const double v = minimax_rec(game, ev, w, c, d + (c.player_to_move == 0 ? 1 : 0), depth, scale);
    best = agent ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

}  // namespace

std::string format_check(const CheckResult& r) {
  return std::string(r.passed ? "PASS " : "FAIL ") + r.suite + "/" + r.name + " " + r.detail;
}

RandomTree random_tree(Rng& rng, int max_branching, int min_depth, int max_depth, int max_features,
                       bool unit_leaves, int players) {
  RandomTree t;
  t.branching = uniform_int(rng, 2, max_branching);
  t.depth = uniform_int(rng, min_depth, max_depth);
  SyntheticTreeSpec spec;
  spec.branching = t.branching;
  spec.players = players;
  spec.depth = players * t.depth + 1;
  spec.seed = rng();
  spec.feature_dim = unit_leaves ? 1 : uniform_int(rng, 1, max_features);
  t.game = std::make_unique<SyntheticGame>(spec);
  t.evaluator = std::make_unique<LinearEvaluator>(*t.game);
  t.weights = unit_leaves ? WeightVector(Vec::Ones(1)) : WeightVector(random_vector(rng, spec.feature_dim));
  return t;
}

double minimax_value(const Game& game, const Evaluator& evaluator, const WeightVector& weights, const GameState& root,
                     int depth, double terminal_scale) {
  return minimax_rec(game, evaluator, weights, root, 0, depth, terminal_scale);
}

std::vector<MoveId> minimax_pv(const Game& game, const Evaluator& evaluator, const WeightVector& weights,
                               const GameState& root, int depth, double terminal_scale) {
  std::vector<MoveId> pv;
  GameState s = root;
  int d = 0;
  while (!game.is_terminal(s) && !(s.player_to_move == 0 && d >= depth)) {
    const bool agent = s.player_to_move == 0;
    const std::size_t n = game.num_legal_moves(s);
    std::size_t best = 0;
    double best_v = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const GameState c = game.apply_move(s, MoveId{k});
      const double v =
          minimax_rec(game, evaluator, weights, c, d + (c.player_to_move == 0 ? 1 : 0), depth, terminal_scale);
      if (k == 0 || (agent ? v > best_v : v < best_v)) {
        best = k;
        best_v = v;
      }
    }
    pv.push_back(MoveId{best});
    s = game.apply_move(s, MoveId{best});
    if (s.player_to_move == 0) ++d;
  }
  return pv;
}

CheckResult check_softmax_minimax(std::uint64_t seed) {
  return timed("softmax_minimax", "bound_and_pv", [&] {
    Rng rng = stream(seed, 1);
    const double temps[] = {1.0, 0.1, 0.01, 0.001};
    int violations = 0;
    int pv_matches = 0;
    double worst_ratio = 0.0;
    const int trees = 100;
    for (int i = 0; i < trees; ++i) {
      const RandomTree t = random_tree(rng, 3, 1, 4, 1, /*unit_leaves=*/true);
      const GameState root = t.game->initial_state();
      const double vmm = minimax_value(*t.game, *t.evaluator, t.weights, root, t.depth);
      for (double temp : temps) {
        const SearchTree tree = build_full_tree(*t.game, *t.evaluator, t.weights, root, t.depth, backup_with(temp, temp));
        const double gap = std::abs(tree.node(SearchTree::root()).value - vmm);
        const double bound = t.depth * temp * std::log(static_cast<double>(t.branching));
        worst_ratio = std::max(worst_ratio, gap / bound);
        if (gap > bound) ++violations;
        if (temp == 0.001 && principal_variation(tree) == minimax_pv(*t.game, *t.evaluator, t.weights, root, t.depth)) {
          ++pv_matches;
        }
      }
    }
    return std::pair{violations == 0 && pv_matches == trees,
                     "trees=" + std::to_string(trees) + " bound_violations=" + std::to_string(violations) +
                         " max_gap_over_bound=" + fmt("%.4f", worst_ratio) + " pv_match=" + std::to_string(pv_matches) +
                         "/" + std::to_string(trees)};
  });
}

CheckResult check_hardmax_minimax(std::uint64_t seed) {
  return timed("softmax_minimax", "hardmax_equals_minimax", [&] {
    Rng rng = stream(seed, 2);
    int mismatches = 0;
    const int trees = 50;
    for (int i = 0; i < trees; ++i) {
      const RandomTree t = random_tree(rng, 3, 1, 3, 4);
      const GameState root = t.game->initial_state();
      BackupConfig b;
      b.hard_max = true;
      const SearchTree tree = build_full_tree(*t.game, *t.evaluator, t.weights, root, t.depth, b);
      const bool same_value = tree.node(SearchTree::root()).value ==
                              minimax_value(*t.game, *t.evaluator, t.weights, root, t.depth);
      const bool same_pv = principal_variation(tree) == minimax_pv(*t.game, *t.evaluator, t.weights, root, t.depth);
      if (!same_value || !same_pv) ++mismatches;
    }
    return std::pair{mismatches == 0, "trees=" + std::to_string(trees) + " mismatches=" + std::to_string(mismatches)};
  });
}

CheckResult check_gradients_fd(std::uint64_t seed) {
  return timed("gradients", "finite_difference", [&] {
    Rng rng = stream(seed, 3);
    const int trees = 200;
    double worst = 0.0;
    const double h = 1e-6;
    for (int i = 0; i < trees; ++i) {
      const RandomTree t = random_tree(rng, 3, 1, 3, 8);
      const double ta = uniform(rng, 0.5, 2.0);
      const double tb = uniform(rng, 0.5, 2.0);
      const GameState root = t.game->initial_state();
      const Vec w0 = t.weights.values();
      const SearchTree tree = build_full_tree(*t.game, *t.evaluator, t.weights, root, t.depth, backup_with(ta, tb));
      FrozenOracle oracle(*t.game, w0, t.depth, ta, tb);
      const Vec fd_v = central_difference([&](const Vec& w) { return oracle.value(root, 0, w); }, w0, h);
      worst = std::max(worst, relative_error(grad_node_value_exact(tree, SearchTree::root()), fd_v, 1e-6));
      for (std::size_t k = 0; k < tree.node(SearchTree::root()).children.size(); ++k) {
        const GameState child = t.game->apply_move(root, MoveId{k});
        const Vec fd_q = central_difference([&](const Vec& w) { return oracle.value(child, 0, w); }, w0, h);
        worst = std::max(worst, relative_error(grad_move_value_exact(tree, SearchTree::root(), k), fd_q, 1e-6));
      }
    }
    return std::pair{worst < 1e-5, "trees=" + std::to_string(trees) + " max_rel_err=" + sci(worst) + " tol=1e-05"};
  });
}

CheckResult check_move_gradient_identity(std::uint64_t seed) {
  return timed("move_gradient_identity", "move_gradient_via_nodes", [&] {
    Rng rng = stream(seed, 4);
    const int trees = 200;
    double worst = 0.0;
    std::size_t checked = 0;
    for (int i = 0; i < trees; ++i) {
      const RandomTree t = random_tree(rng, 3, 1, 3, 8);
      const SearchTree tree = build_full_tree(*t.game, *t.evaluator, t.weights, t.game->initial_state(), t.depth,
                                              backup_with(uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0)));
      for (std::size_t id = 0; id < tree.size(); ++id) {
        const auto nid = static_cast<NodeId>(id);
        if (!tree.node(nid).expanded || !tree.is_agent_node(nid)) continue;
        for (std::size_t k = 0; k < tree.node(nid).children.size(); ++k) {
          const Vec a = grad_move_value_exact(tree, nid, k);
          const Vec b = grad_move_value_via_nodes(tree, nid, k);
          worst = std::max(worst, max_abs(a - b) / std::max(1.0, max_abs(b)));
          ++checked;
        }
      }
    }
    return std::pair{worst <= 1e-10,
                     "moves=" + std::to_string(checked) + " max_diff=" + sci(worst) + " tol=1e-10"};
  });
}

CheckResult check_backup_probability(std::uint64_t seed) {
  return timed("backup_probability", "normalization_and_expectation", [&] {
    Rng rng = stream(seed, 5);
    const int trees = 50;
    double worst_mass = 0.0;
    double worst_value = 0.0;
    double worst_realization = 0.0;
    for (int i = 0; i < trees; ++i) {
      const RandomTree t = random_tree(rng, 3, 1, 3, 8);
      const SearchTree tree = build_full_tree(*t.game, *t.evaluator, t.weights, t.game->initial_state(), t.depth,
                                              backup_with(uniform(rng, 0.2, 2.0), uniform(rng, 0.2, 2.0)));
      SearchConfig sel;
      sel.t_select = Temperature(uniform(rng, 0.2, 2.0));
      for (std::size_t k = 0; k < tree.node(SearchTree::root()).children.size(); ++k) {
        double mass = 0.0;
        double expectation = 0.0;
        for (const LeafProbability& lp : backup_probabilities(tree, MoveId{k})) {
          mass += lp.probability;
          expectation += lp.probability * lp.leaf_value;
        }
        worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
        worst_value = std::max(worst_value, std::abs(expectation - tree.move_value(SearchTree::root(), k)));
        double rmass = 0.0;
        for (const LeafProbability& lp : realization_probabilities(tree, MoveId{k}, sel)) rmass += lp.probability;
        worst_realization = std::max(worst_realization, std::abs(rmass - 1.0));
      }
    }
    return std::pair{worst_mass <= 1e-12 && worst_value <= 1e-9 && worst_realization <= 1e-12,
                     "trees=" + std::to_string(trees) + " max_mass_err=" + sci(worst_mass) +
                         " max_value_err=" + sci(worst_value) + " max_realization_mass_err=" + sci(worst_realization)};
  });
}

CheckResult check_mc_within_se(std::uint64_t seed) {
  return timed("mc_convergence", "within_4_se", [&] {
    Rng rng = stream(seed, 6);
    const int trials = 100;
    const std::size_t n = 200000;
    int ok = 0;
    for (int i = 0; i < trials; ++i) {
      RandomTree t = random_tree(rng, 3, 2, 2, 4);
      const SearchTree tree =
          build_full_tree(*t.game, *t.evaluator, t.weights, t.game->initial_state(), t.depth, backup_with(1.0, 1.0));
      const Vec exact = grad_node_value_exact(tree, SearchTree::root());
      const McGradient mc = grad_node_value_mc(tree, SearchTree::root(), n, rng);
      bool inside = true;
      for (Eigen::Index c = 0; c < exact.size(); ++c) {
        if (std::abs(mc.mean[c] - exact[c]) > 4.0 * mc.std_error[c] + 1e-12) inside = false;
      }
      ok += inside ? 1 : 0;
    }
    return std::pair{ok >= 99, "trials=" + std::to_string(trials) + " samples=" + std::to_string(n) +
                                   " within_4se=" + std::to_string(ok) + " need>=99"};
  });
}

CheckResult check_mc_rate(std::uint64_t seed) {
  return timed("mc_convergence", "error_rate", [&] {
    Rng rng = stream(seed, 7);
    RandomTree t = random_tree(rng, 3, 2, 2, 4);
    const SearchTree tree =
        build_full_tree(*t.game, *t.evaluator, t.weights, t.game->initial_state(), t.depth, backup_with(1.0, 1.0));
    const Vec exact = grad_node_value_exact(tree, SearchTree::root());
    const std::size_t sizes[] = {1000, 10000, 100000};
    const int reps = 100;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t n : sizes) {
      double sq = 0.0;
      for (int r = 0; r < reps; ++r) sq += (grad_node_value_mc(tree, SearchTree::root(), n, rng).mean - exact).squaredNorm();
      xs.push_back(std::log10(static_cast<double>(n)));
      ys.push_back(std::log10(std::sqrt(sq / reps)));
    }
    const double mx = (xs[0] + xs[1] + xs[2]) / 3.0;
    const double my = (ys[0] + ys[1] + ys[2]) / 3.0;
    double sxy = 0.0;
    double sxx = 0.0;
    for (int i = 0; i < 3; ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    return std::pair{std::abs(slope + 0.5) <= 0.1, "slope=" + fmt("%.4f", slope) + " target=-0.5+-0.1"};
  });
}

CheckResult check_loss_gradients(std::uint64_t seed) {
  return timed("loss_gradients", "rules_match_finite_difference", [&] {
    Rng rng = stream(seed, 8);
    const int instances = 20;
    const double h = 1e-6;
    std::map<std::string, double> worst{{"supervised", 0.0}, {"q_learning", 0.0}, {"regression", 0.0},
                                        {"bootstrap", 0.0}, {"distribution_bootstrap", 0.0}};
    LearningConfig lc;
    lc.learning_rate = 0.01;
    GradientEngine engine;
    auto record = [&](const std::string& rule, const Vec& delta, const Vec& fd) {
      const Vec expected = -lc.learning_rate * fd;
      worst[rule] = std::max(worst[rule], relative_error(delta, expected, 1e-6 * lc.learning_rate));
    };
    for (int i = 0; i < instances; ++i) {
      SyntheticTreeSpec spec;
      spec.branching = 2;
      spec.depth = 9;
      spec.seed = rng();
      spec.feature_dim = uniform_int(rng, 2, 6);
      const SyntheticGame game(spec);
      const LinearEvaluator ev(game);
      const Vec w0 = random_vector(rng, spec.feature_dim);
      const WeightVector weights(w0);
      const BackupConfig bc = backup_with(uniform(rng, 0.5, 2.0), uniform(rng, 0.5, 2.0));
      const GameState root = game.initial_state();
      const SearchTree tree = build_full_tree(game, ev, weights, root, 2, bc);
      auto revalued = [&](const SearchTree& base, const Vec& w) {
        SearchTree copy = base;
        copy.revalue(WeightVector(w), /*freeze_opponent=*/true);
        return copy;
      };

      // Supervised KL at the root.
      {
        Vec u = random_vector(rng, 2, 0.05, 1.0);
        u /= u.sum();
        const Distribution teacher({u[0], 1.0 - u[0]});
        const TeacherExample ex{&tree, SearchTree::root(), teacher};
        const UpdateDelta d = supervised_kl_delta(std::span(&ex, 1), lc, engine);
        const Vec fd = central_difference(
            [&](const Vec& w) {
              const SearchTree c = revalued(tree, w);
              const TeacherExample e{&c, SearchTree::root(), teacher};
              return supervised_kl_loss(std::span(&e, 1));
            },
            w0, h);
        record("supervised", d.delta, fd);
      }

      // Agent nodes with children: root and the depth-1 player-0 nodes.
      std::vector<NodeId> agents;
      for (std::size_t id = 0; id < tree.size(); ++id) {
        const auto nid = static_cast<NodeId>(id);
        if (tree.node(nid).expanded && tree.is_agent_node(nid)) agents.push_back(nid);
      }

      // Q-learning against deeper-search targets.
      {
        std::vector<QSample> samples;
        for (NodeId id : agents) {
          for (std::size_t k = 0; k < 2; ++k) {
            const GameState v = tree.node(tree.child(id, k)).state;
            samples.push_back({&tree, id, k, exhaustive_value(game, ev, weights, v, 2, bc)});
          }
        }
        const UpdateDelta d = q_learning_delta(samples, lc, engine);
        const Vec fd = central_difference(
            [&](const Vec& w) {
              const SearchTree c = revalued(tree, w);
              std::vector<QSample> s = samples;
              for (QSample& x : s) x.tree = &c;
              return q_learning_loss(s);
            },
            w0, h);
        record("q_learning", d.delta, fd);
      }

      // Regression over a three-turn trajectory.
      {
        const std::vector<std::vector<MoveId>> paths{{}, {MoveId{0}, MoveId{1}}, {MoveId{0}, MoveId{1}, MoveId{1}, MoveId{0}}};
        std::vector<SearchTree> trees;
        for (const auto& p : paths) trees.push_back(build_full_tree(game, ev, weights, replay(game, p), 2, bc));
        LearningConfig rc = lc;
        rc.sigmoid_temperature = uniform(rng, 0.5, 2.0);
        auto trajectory = [&](const std::vector<SearchTree>& ts) {
          Trajectory traj;
          for (const SearchTree& st : ts) {
            TurnRecord turn;
            turn.value = st.node(SearchTree::root()).value;
            turn.value_gradient = grad_node_value_exact(st, SearchTree::root());
            traj.turns.push_back(std::move(turn));
          }
          traj.outcome_reward = 1.0;
          return traj;
        };
        const UpdateDelta d = regression_delta(trajectory(trees), rc);
        const Vec fd = central_difference(
            [&](const Vec& w) {
              std::vector<SearchTree> ts;
              for (const SearchTree& st : trees) ts.push_back(revalued(st, w));
              return regression_loss(trajectory(ts), rc);
            },
            w0, h);
        record("regression", d.delta, fd);
      }

      // Bootstrap toward every interior node value.
      {
        std::vector<NodeId> ids(tree.size());
        for (std::size_t id = 0; id < ids.size(); ++id) ids[id] = static_cast<NodeId>(id);
        const std::vector<BootstrapTarget> targets = bootstrap_targets(tree, ids);
        const UpdateDelta d = bootstrap_delta(targets, ev, weights, lc);
        const Vec fd =
            central_difference([&](const Vec& w) { return bootstrap_loss(targets, ev, WeightVector(w)); }, w0, h);
        record("bootstrap", d.delta, fd);
      }

      // Distribution bootstrap at every agent node.
      {
        std::vector<DistributionExample> examples;
        for (NodeId id : agents) examples.push_back({&tree, id});
        const UpdateDelta d = distribution_bootstrap_delta(examples, ev, weights, lc);
        const Vec fd = central_difference(
            [&](const Vec& w) { return distribution_bootstrap_loss(examples, ev, WeightVector(w)); }, w0, h);
        record("distribution_bootstrap", d.delta, fd);
      }
    }
    bool ok = true;
    std::string detail = "instances=" + std::to_string(instances);
    for (const auto& [rule, err] : worst) {
      ok = ok && err < 1e-4;
      detail += " " + rule + "=" + sci(err);
    }
    return std::pair{ok, detail + " tol=1e-04"};
  });
}

CheckResult check_td_traces(std::uint64_t seed) {
  return timed("td_traces", "recursive_equals_unrolled", [&] {
    Rng rng = stream(seed, 9);
    const int trajectories = 100;
    double worst = 0.0;
    for (int i = 0; i < trajectories; ++i) {
      const int len = uniform_int(rng, 1, 20);
      const int dim = uniform_int(rng, 1, 8);
      const double gamma = uniform01(rng);
      const double lambda = uniform01(rng);
      std::vector<Vec> grads;
      for (int t = 0; t < len; ++t) grads.push_back(random_vector(rng, dim));
      const std::vector<Vec> traces = eligibility_traces(grads, gamma, lambda);
      for (int t = 0; t < len; ++t) {
        Vec unrolled = Vec::Zero(dim);
        for (int k = 0; k <= t; ++k) unrolled += std::pow(gamma * lambda, t - k) * grads[static_cast<std::size_t>(k)];
        worst = std::max(worst, max_abs(traces[static_cast<std::size_t>(t)] - unrolled));
      }
    }
    return std::pair{worst <= 1e-12, "trajectories=" + std::to_string(trajectories) + " max_diff=" + sci(worst) +
                                         " tol=1e-12"};
  });
}

CheckResult check_teacher_learning(std::uint64_t seed) {
  return timed("learning", "realizable_teacher", [&] {
    Rng rng = stream(seed, 10);
    SyntheticTreeSpec spec;
    spec.branching = 3;
    spec.depth = 9;
    spec.seed = rng();
    spec.feature_dim = 4;
    const SyntheticGame game(spec);
    const LinearEvaluator ev(game);
    const WeightVector hidden(random_vector(rng, spec.feature_dim, -2.0, 2.0));

    TrainingConfig cfg;
    cfg.search.max_depth = 2;
    cfg.search.max_iterations = 200;
    cfg.coefficients = RuleCoefficients{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    cfg.seed = seed;
    std::vector<TeacherItem> dataset;
    std::vector<std::vector<MoveId>> positions{{}};
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) positions.push_back({MoveId{a}, MoveId{b}});
    }
    for (const auto& p : positions) {
      const GameState s = replay(game, p);
      Rng search_rng(0);
      const SearchTree t = mcss_search(game, ev, hidden, s, cfg.search, search_rng);
      dataset.push_back({s, Distribution(t.node(SearchTree::root()).policy)});
    }

    const std::size_t updates = 5000;
    double lr = 1.0;
    for (int attempt = 0; attempt < 20; ++attempt, lr *= 0.5) {
      cfg.learning.learning_rate = lr;
      TeacherTrainer trainer(game, ev, cfg, dataset, WeightVector(spec.feature_dim));
      const double initial = trainer.mean_kl();
      try {
        trainer.run(updates);
      } catch (const DivergenceError&) {
        continue;
      }
      const double final_kl = trainer.mean_kl();
      if (!std::isfinite(final_kl)) continue;
      std::vector<double> kl;
      for (const IterationMetrics& m : trainer.history()) kl.push_back(m.kl);
      const std::size_t window = 100;
      double sum = 0.0;
      double prev = std::numeric_limits<double>::infinity();
      std::size_t increases = 0;
      for (std::size_t i = 0; i < kl.size(); ++i) {
        sum += kl[i];
        if (i >= window) sum -= kl[i - window];
        if (i + 1 >= window) {
          const double avg = sum / window;
          if (avg > prev + 1e-12) ++increases;
          prev = avg;
        }
      }
      return std::pair{final_kl < 1e-2 && final_kl < initial && increases == 0,
                       "initial_kl=" + sci(initial) + " final_kl=" + sci(final_kl) + " updates=" +
                           std::to_string(updates) + " learning_rate=" + fmt("%g", lr) +
                           " ma100_increases=" + std::to_string(increases)};
    }
    return std::pair{false, std::string("diverged at every learning rate tried")};
  });
}

CheckResult check_selfplay_improvement(std::uint64_t seed) {
  return timed("learning", "selfplay_improvement", [&] {
    RunConfig rc;
    rc.seed = seed;
    rc.games = 2000;
    const TicTacToe game(rc.game.draw_reward);
    const LinearEvaluator ev(game);
    const WeightVector zero(game.feature_dim());
    const WeightVector trained = train_selfplay(game, ev, rc.training(), zero);
    const int n = 1000;
    const MatchStats a =
        evaluate_agents(game, ev, AgentSpec::searcher(trained, rc.match.search), AgentSpec::random_mover(), n, seed);
    const MatchStats b =
        evaluate_agents(game, ev, AgentSpec::searcher(zero, rc.match.search), AgentSpec::random_mover(), n, seed);
    const double gap = a.win_or_draw_rate() - b.win_or_draw_rate();
    const double z = two_proportion_z(a.wins + a.draws, n, b.wins + b.draws, n);
    return std::pair{gap >= 0.10 && z > 3.0,
                     "trained_wd=" + fmt("%.3f", a.win_or_draw_rate()) + " zero_wd=" + fmt("%.3f", b.win_or_draw_rate()) +
                         " gap_points=" + fmt("%.1f", 100.0 * gap) + " z=" + fmt("%.2f", z) + " need gap>=10 z>3"};
  });
}

CheckResult check_nplayer(std::uint64_t seed) {
  return timed("nplayer", "reduction_and_constant", [&] {
    Rng rng = stream(seed, 11);
    int identical = 0;
    const int trees = 50;
    for (int i = 0; i < trees; ++i) {
      const RandomTree t = random_tree(rng, 3, 1, 3, 6);
      const double ta = uniform(rng, 0.2, 2.0);
      const double tb = uniform(rng, 0.2, 2.0);
      const GameState root = t.game->initial_state();
      const double v2 = exhaustive_value(*t.game, *t.evaluator, t.weights, root, t.depth, backup_with(ta, tb));
      const double vn = nplayer_exhaustive_value(
          *t.game, *t.evaluator, t.weights, root, t.depth,
          {{PlayerPolicyKind::kMaximize, Temperature(ta)}, {PlayerPolicyKind::kMinimize, Temperature(tb)}});
      identical += v2 == vn ? 1 : 0;
    }
    int constant_ok = 0;
    int constant_total = 0;
    for (int n = 2; n <= 4; ++n) {
      for (int i = 0; i < 5; ++i) {
        const RandomTree t = random_tree(rng, 3, 1, 2, 3, false, n);
        const double c = uniform(rng, -1.0, 1.0);
        const ConstantEvaluator ev(t.game->feature_dim(), c);
        std::vector<PlayerPolicy> policies{{PlayerPolicyKind::kMaximize, Temperature(uniform(rng, 0.2, 2.0))}};
        for (int p = 1; p < n; ++p) {
          const bool uniform_player = uniform01(rng) < 0.5;
          policies.push_back({uniform_player ? PlayerPolicyKind::kUniform : PlayerPolicyKind::kMinimize,
                              Temperature(uniform(rng, 0.2, 2.0))});
        }
        const double v = nplayer_exhaustive_value(*t.game, ev, t.weights, t.game->initial_state(), t.depth, policies);
        constant_ok += v == c ? 1 : 0;
        ++constant_total;
      }
    }
    return std::pair{identical == trees && constant_ok == constant_total,
                     "bit_identical=" + std::to_string(identical) + "/" + std::to_string(trees) +
                         " constant_exact=" + std::to_string(constant_ok) + "/" + std::to_string(constant_total)};
  });
}

namespace {

using CheckFn = CheckResult (*)(std::uint64_t);

const std::vector<std::pair<std::string, std::vector<CheckFn>>>& suites() {
  static const std::vector<std::pair<std::string, std::vector<CheckFn>>> table{
      {"softmax_minimax", {check_softmax_minimax, check_hardmax_minimax}},
      {"gradients", {check_gradients_fd}},
      {"move_gradient_identity", {check_move_gradient_identity}},
      {"backup_probability", {check_backup_probability}},
      {"mc_convergence", {check_mc_within_se, check_mc_rate}},
      {"loss_gradients", {check_loss_gradients}},
      {"td_traces", {check_td_traces}},
      {"nplayer", {check_nplayer}},
      {"learning", {check_teacher_learning, check_selfplay_improvement}},
  };
  return table;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, checks] : suites()) names.push_back(name);
  names.push_back("all");
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed) {
  std::vector<CheckResult> out;
  bool found = false;
  for (const auto& [suite, checks] : suites()) {
    if (name == suite || (name == "all" && suite != "learning")) {
      found = true;
      for (CheckFn fn : checks) out.push_back(fn(seed));
    }
  }
  if (!found) {
    std::string list;
    for (const std::string& s : suite_names()) list += (list.empty() ? "" : ", ") + s;
    throw FormatError("unknown suite '" + name + "' (" + list + ")");
  }
  return out;
}

}  // namespace mcss
