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

#include "mcss/training.hpp"

#include "mcss/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace mcss {

RuleCoefficients RuleCoefficients::scaled(double k) const {
  return {supervised * k, bootstrap * k, q_learning * k, td * k, pg * k, regression * k};
}

UpdateDelta combine_deltas(std::span<const UpdateDelta> deltas, std::span<const double> coefficients) {
  if (deltas.size() != coefficients.size()) throw ContractError("combine_deltas: length mismatch");
  if (deltas.empty()) throw ContractError("combine_deltas: nothing to combine");
  const Eigen::Index dim = deltas.front().delta.size();
  UpdateDelta out{Eigen::VectorXd::Zero(dim), "combined", 0.0};
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i].delta.size() != dim) throw ContractError("combine_deltas: dimension mismatch");
    if (coefficients[i] != 0.0) out.delta += coefficients[i] * deltas[i].delta;
  }
  return out;
}

std::string to_string(PlayPolicy policy) { return policy == PlayPolicy::kGreedy ? "greedy" : "sample"; }

PlayPolicy parse_play_policy(const std::string& text) {
  if (text == "greedy") return PlayPolicy::kGreedy;
  if (text == "sample") return PlayPolicy::kSample;
  throw FormatError("unknown play policy '" + text + "' (greedy, sample)");
}

void TrainingConfig::validate() const {
  search.validate();
  learning.validate();
  if (samples_per_root == 0) throw ContractError("samples_per_root must be >= 1");
  if (epochs == 0) throw ContractError("epochs must be >= 1");
  if (!(divergence_threshold > 0.0)) throw ContractError("divergence threshold must be > 0");
  if (t_opponent_final && !(*t_opponent_final > 0.0 && std::isfinite(*t_opponent_final))) {
    throw ContractError("final opponent temperature must be > 0");
  }
}

std::string metrics_csv_header() {
  return "iteration,kl,bootstrap_loss,q_loss,td_loss,regression_loss,outcome,delta_norm,plies";
}

std::string metrics_csv_row(const IterationMetrics& m) {
  std::ostringstream os;
  os << m.iteration << ',' << format_scalar(m.kl) << ',' << format_scalar(m.bootstrap_loss) << ','
     << format_scalar(m.q_loss) << ',' << format_scalar(m.td_loss) << ',' << format_scalar(m.regression_loss) << ','
     << format_scalar(m.outcome) << ',' << format_scalar(m.delta_norm) << ',' << m.plies;
  return os.str();
}

namespace {

nlohmann::json metrics_to_json(const IterationMetrics& m) {
  return {{"iteration", m.iteration}, {"kl", m.kl}, {"bootstrap_loss", m.bootstrap_loss},
          {"q_loss", m.q_loss}, {"td_loss", m.td_loss}, {"regression_loss", m.regression_loss},
          {"outcome", m.outcome}, {"delta_norm", m.delta_norm}, {"plies", m.plies}};
}

IterationMetrics metrics_from_json(const nlohmann::json& j) {
  IterationMetrics m;
  m.iteration = j.at("iteration").get<std::size_t>();
  m.kl = j.at("kl").get<double>();
  m.bootstrap_loss = j.at("bootstrap_loss").get<double>();
  m.q_loss = j.at("q_loss").get<double>();
  m.td_loss = j.at("td_loss").get<double>();
  m.regression_loss = j.at("regression_loss").get<double>();
  m.outcome = j.at("outcome").get<double>();
  m.delta_norm = j.at("delta_norm").get<double>();
  m.plies = j.at("plies").get<int>();
  return m;
}

std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void set_rng_state(Rng& rng, const std::string& state) {
  std::istringstream is(state);
  is >> rng;
  if (!is) throw FormatError("checkpoint: malformed rng state");
}

void check_divergence(const UpdateDelta& combined, std::initializer_list<double> losses, double threshold) {
  for (double loss : losses) {
    if (!std::isfinite(loss) || loss > threshold) {
      throw DivergenceError("training diverged: loss " + format_scalar(loss) + " exceeds " +
                            format_scalar(threshold) + "; lower the learning rate");
    }
  }
  if (!combined.delta.allFinite()) throw DivergenceError("training diverged: non-finite update");
}

// Bootstrap and Q targets collected along sampled backup paths, each path
// weighted by 1 / samples.
struct PathTerms {
  std::vector<BootstrapTarget> bootstrap;
  std::vector<QBootstrapSample> q;
};

void collect_path_terms(const SearchTree& tree, const SampledPath& path, PathTerms& terms) {
  for (const SampledStep& step : path.steps) {
    const SearchNode& n = tree.node(step.node);
    if (!n.terminal) terms.bootstrap.push_back({n.state, n.value});
    if (tree.is_agent_node(step.node)) terms.q.push_back({&tree, step.node, step.move});
  }
}

UpdateDelta scaled(UpdateDelta d, double k) {
  d.delta *= k;
  d.loss *= k;
  return d;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  save_weights(path, checkpoint.weights, checkpoint.game);
  nlohmann::json meta;
  meta["format"] = "mcss-checkpoint";
  meta["version"] = 1;
  meta["game"] = checkpoint.game;
  meta["mode"] = checkpoint.mode;
  meta["run_id"] = checkpoint.run_id;
  meta["iteration"] = checkpoint.iteration;
  meta["rng_state"] = checkpoint.rng_state;
  meta["history"] = nlohmann::json::array();
  for (const IterationMetrics& m : checkpoint.history) meta["history"].push_back(metrics_to_json(m));
  std::ofstream out(path + ".meta.json");
  if (!out) throw Error("cannot write checkpoint metadata " + path + ".meta.json");
  out << meta.dump(1) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  Checkpoint cp;
  WeightFile wf = load_weights(path);
  cp.weights = std::move(wf.weights);
  cp.game = wf.game;
  std::ifstream in(path + ".meta.json");
  if (!in) throw FormatError("missing checkpoint metadata " + path + ".meta.json");
  try {
    const nlohmann::json meta = nlohmann::json::parse(in);
    if (meta.at("format").get<std::string>() != "mcss-checkpoint" || meta.at("version").get<int>() != 1) {
      throw FormatError("unsupported checkpoint metadata");
    }
    if (meta.at("game").get<std::string>() != cp.game) throw FormatError("checkpoint game mismatch");
    cp.mode = meta.at("mode").get<std::string>();
    cp.run_id = meta.at("run_id").get<std::string>();
    cp.iteration = meta.at("iteration").get<std::size_t>();
    cp.rng_state = meta.at("rng_state").get<std::string>();
    for (const auto& m : meta.at("history")) cp.history.push_back(metrics_from_json(m));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint metadata: ") + e.what());
  }
  if (cp.history.size() != cp.iteration) throw FormatError("checkpoint history length mismatch");
  return cp;
}

std::vector<TeacherItem> parse_teacher_file(const Game& game, const std::string& text) {
  std::vector<TeacherItem> items;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    std::istringstream tokens(line);
    std::string seq;
    if (!(tokens >> seq) || seq.front() == '#') continue;
    const std::string where = "teacher file line " + std::to_string(lineno);
    GameState state;
    try {
      state = replay(game, parse_move_sequence(seq));
    } catch (const Error& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (game.is_terminal(state)) throw FormatError(where + ": position is terminal");
    std::vector<double> p;
    std::string tok;
    while (tokens >> tok) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(x) || x < 0.0) throw FormatError(where + ": bad probability " + tok);
      p.push_back(x);
    }
    if (p.size() != game.num_legal_moves(state)) {
      throw FormatError(where + ": expected " + std::to_string(game.num_legal_moves(state)) +
                        " probabilities (one per legal move)");
    }
    double sum = 0.0;
    for (double x : p) sum += x;
    if (std::abs(sum - 1.0) > 1e-9) throw FormatError(where + ": probabilities do not sum to 1");
    for (double& x : p) x /= sum;
    double resum = 0.0;
    for (double x : p) resum += x;
    if (std::abs(resum - 1.0) > kNormalizationTolerance) throw FormatError(where + ": cannot normalize");
    items.push_back({state, Distribution(std::move(p))});
  }
  return items;
}

std::string format_teacher_file(const Game& game, std::span<const std::vector<MoveId>> positions,
                                std::span<const Distribution> teachers) {
  if (positions.size() != teachers.size()) throw ContractError("teacher file: positions and teachers differ in count");
  std::ostringstream os;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const GameState s = replay(game, positions[i]);
    if (teachers[i].size() != game.num_legal_moves(s)) throw ContractError("teacher size does not match legal moves");
    os << format_move_sequence(positions[i]);
    for (double x : teachers[i]) os << ' ' << format_scalar(x);
    os << "\n";
  }
  return os.str();
}

TeacherTrainer::TeacherTrainer(const Game& game, const Evaluator& evaluator, TrainingConfig cfg,
                               std::vector<TeacherItem> dataset, WeightVector initial)
    : game_(&game), evaluator_(&evaluator), cfg_(std::move(cfg)), dataset_(std::move(dataset)),
      weights_(std::move(initial)), rng_(cfg_.seed) {
  cfg_.validate();
  if (dataset_.empty()) throw ContractError("teacher training needs a non-empty dataset");
  if (weights_.dim() != evaluator.dim()) throw ContractError("initial weights have the wrong dimension");
  for (const TeacherItem& item : dataset_) {
    if (item.state.player_to_move != 0) throw ContractError("teacher positions must have player 0 to move");
    if (item.teacher.size() != game.num_legal_moves(item.state)) {
      throw ContractError("teacher distribution does not match the legal moves");
    }
  }
}

SearchTree TeacherTrainer::search_position(const GameState& state, Rng& rng) const {
  return mcss_search(*game_, *evaluator_, weights_, state, cfg_.search, rng);
}

const IterationMetrics& TeacherTrainer::step() {
  const std::size_t it = history_.size();
  const TeacherItem& item = dataset_[it % dataset_.size()];
  const SearchTree tree = search_position(item.state, rng_);
  const SearchNode& root = tree.node(SearchTree::root());
  const LearningConfig& lc = cfg_.learning;
  const std::size_t dim = evaluator_->dim();
  const std::size_t k_paths = cfg_.samples_per_root;
  const double inv_k = 1.0 / static_cast<double>(k_paths);

  PathTerms terms;
  std::vector<Eigen::VectorXd> grad_q(root.children.size(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
  for (std::size_t a = 0; a < root.children.size(); ++a) {
    const NodeId v = root.children[a];
    for (std::size_t i = 0; i < k_paths; ++i) {
      const SampledPath path = sample_backup_path(tree, v, rng_, lc.gradient_options);
      collect_path_terms(tree, path, terms);
      const SearchNode& leaf = tree.node(path.leaf);
      if (!leaf.terminal && lc.gradient_mode == GradientMode::kMonteCarlo) {
        grad_q[a] += (path.correction_product * inv_k) * evaluator_->gradient(leaf.state, weights_);
      }
    }
    if (lc.gradient_mode == GradientMode::kExact) grad_q[a] = grad_move_value_exact(tree, SearchTree::root(), a);
  }

  const TeacherExample example{&tree, SearchTree::root(), item.teacher};
  UpdateDelta supervised = UpdateDelta::zero(dim, "supervised");
  supervised.loss = supervised_kl_loss(std::span(&example, 1));
  for (std::size_t a = 0; a < root.children.size(); ++a) {
    const double residual = item.teacher[a] - root.policy[a];
    if (residual != 0.0) supervised.delta += residual * grad_q[a];
  }
  supervised.delta *= lc.learning_rate / tree.backup().t_agent.value();

  const UpdateDelta boot = scaled(bootstrap_delta(terms.bootstrap, *evaluator_, weights_, lc), inv_k);
  const UpdateDelta q = scaled(q_learning_bootstrap_delta(terms.q, *evaluator_, weights_, lc), inv_k);

  const RuleCoefficients& c = cfg_.coefficients;
  const std::vector<UpdateDelta> parts{supervised, boot, q};
  const std::vector<double> coeffs{c.supervised, c.bootstrap, c.q_learning};
  const UpdateDelta combined = combine_deltas(parts, coeffs);
  check_divergence(combined, {supervised.loss, boot.loss, q.loss}, cfg_.divergence_threshold);
  weights_.apply(combined.delta);

  IterationMetrics m;
  m.iteration = it;
  m.kl = supervised.loss;
  m.bootstrap_loss = boot.loss;
  m.q_loss = q.loss;
  m.delta_norm = combined.delta.norm();
  history_.push_back(m);
  return history_.back();
}

void TeacherTrainer::run(std::size_t updates, const std::function<void(const IterationMetrics&)>& on_step) {
  for (std::size_t i = 0; i < updates; ++i) {
    const IterationMetrics& m = step();
    if (on_step) on_step(m);
  }
}

void TeacherTrainer::run_epochs(std::size_t epochs, const std::function<void(const IterationMetrics&)>& on_step) {
  run(epochs * dataset_.size(), on_step);
}

double TeacherTrainer::mean_kl() {
  Rng rng(derive_seed(cfg_.seed, 0x6b6cULL));
  double total = 0.0;
  for (const TeacherItem& item : dataset_) {
    const SearchTree tree = search_position(item.state, rng);
    const TeacherExample ex{&tree, SearchTree::root(), item.teacher};
    total += supervised_kl_loss(std::span(&ex, 1));
  }
  return total / static_cast<double>(dataset_.size());
}

Checkpoint TeacherTrainer::checkpoint(const std::string& run_id) const {
  return {weights_, game_->name(), "supervised", run_id, history_.size(), rng_state(rng_), history_};
}

void TeacherTrainer::restore(const Checkpoint& checkpoint) {
  if (checkpoint.game != game_->name()) throw ContractError("checkpoint is for another game");
  if (checkpoint.mode != "supervised") throw ContractError("checkpoint is not a supervised run");
  if (checkpoint.weights.dim() != evaluator_->dim()) throw ContractError("checkpoint weight dimension mismatch");
  weights_ = checkpoint.weights;
  history_ = checkpoint.history;
  set_rng_state(rng_, checkpoint.rng_state);
}

SelfPlayTrainer::SelfPlayTrainer(const Game& game, const Evaluator& evaluator, TrainingConfig cfg,
                                 WeightVector initial)
    : game_(&game), evaluator_(&evaluator), cfg_(std::move(cfg)), weights_(std::move(initial)), rng_(cfg_.seed) {
  cfg_.validate();
  if (weights_.dim() != evaluator.dim()) throw ContractError("initial weights have the wrong dimension");
}

SearchConfig SelfPlayTrainer::search_config_at(std::size_t game_index) const {
  SearchConfig sc = cfg_.search;
  if (cfg_.t_opponent_final) {
    const double t0 = cfg_.search.backup.t_opponent.value();
    const double span = cfg_.games > 1 ? static_cast<double>(cfg_.games - 1) : 1.0;
    const double frac = std::min(1.0, static_cast<double>(game_index) / span);
    sc.backup.t_opponent = Temperature(t0 + (*cfg_.t_opponent_final - t0) * frac);
  }
  return sc;
}

Trajectory SelfPlayTrainer::play_game(Rng& rng, std::vector<MoveId>* moves) const {
  const SearchConfig sc = search_config_at(history_.size());
  Trajectory traj;
  traj.game_id = static_cast<int>(history_.size());
  GameState state = game_->initial_state();
  while (!game_->is_terminal(state)) {
    auto tree = std::make_shared<SearchTree>(mcss_search(*game_, *evaluator_, weights_, state, sc, rng));
    const MoveId move = cfg_.self_play_policy == PlayPolicy::kSample ? sampled_move(*tree, rng) : greedy_move(*tree, rng);
    if (state.player_to_move == 0) {
      TurnRecord turn;
      turn.move_played = move.index;
      turn.value = tree->node(SearchTree::root()).value;
      turn.tree = std::move(tree);
      traj.turns.push_back(std::move(turn));
    }
    if (moves) moves->push_back(move);
    state = game_->apply_move(state, move);
  }
  const GameOutcome outcome = *game_->terminal_outcome(state);
  traj.outcome_reward = outcome.reward(0);
  traj.reward_signal = sc.backup.terminal_value(outcome);
  return traj;
}

const IterationMetrics& SelfPlayTrainer::step() {
  std::vector<MoveId> moves;
  Trajectory traj = play_game(rng_, &moves);
  const LearningConfig& lc = cfg_.learning;
  const std::size_t dim = evaluator_->dim();
  GradientEngine engine(lc.gradient_mode, lc.mc_samples, lc.gradient_options, rng_(), lc.workers);
  const double inv_k = 1.0 / static_cast<double>(cfg_.samples_per_root);

  PathTerms terms;
  for (TurnRecord& turn : traj.turns) {
    const SearchTree& tree = *turn.tree;
    for (std::size_t i = 0; i < cfg_.samples_per_root; ++i) {
      collect_path_terms(tree, sample_backup_path(tree, SearchTree::root(), rng_, lc.gradient_options), terms);
    }
    turn.value_gradient = engine.node_gradient(tree, SearchTree::root());
  }

  const UpdateDelta boot = scaled(bootstrap_delta(terms.bootstrap, *evaluator_, weights_, lc), inv_k);
  const UpdateDelta q = scaled(q_learning_bootstrap_delta(terms.q, *evaluator_, weights_, lc), inv_k);
  const UpdateDelta td = td_lambda_delta(traj, lc);
  const UpdateDelta pg = pg_expectation_delta(traj, lc, engine, /*node_form=*/true);
  const UpdateDelta reg = regression_delta(traj, lc);

  const RuleCoefficients& c = cfg_.coefficients;
  const std::vector<UpdateDelta> parts{td, pg, reg, boot, q};
  const std::vector<double> coeffs{c.td, c.pg, c.regression, c.bootstrap, c.q_learning};
  UpdateDelta combined = combine_deltas(parts, coeffs);
  if (combined.delta.size() != static_cast<Eigen::Index>(dim)) throw ContractError("self-play: dimension mismatch");
  check_divergence(combined, {td.loss, reg.loss, boot.loss, q.loss}, cfg_.divergence_threshold);
  weights_.apply(combined.delta);

  IterationMetrics m;
  m.iteration = history_.size();
  m.bootstrap_loss = boot.loss;
  m.q_loss = q.loss;
  m.td_loss = td.loss;
  m.regression_loss = reg.loss;
  m.outcome = *traj.outcome_reward;
  m.delta_norm = combined.delta.norm();
  m.plies = static_cast<int>(moves.size());
  history_.push_back(m);
  return history_.back();
}

void SelfPlayTrainer::run(std::size_t games, const std::function<void(const IterationMetrics&)>& on_step) {
  for (std::size_t i = 0; i < games; ++i) {
    const IterationMetrics& m = step();
    if (on_step) on_step(m);
  }
}

Checkpoint SelfPlayTrainer::checkpoint(const std::string& run_id) const {
  return {weights_, game_->name(), "selfplay", run_id, history_.size(), rng_state(rng_), history_};
}

void SelfPlayTrainer::restore(const Checkpoint& checkpoint) {
  if (checkpoint.game != game_->name()) throw ContractError("checkpoint is for another game");
  if (checkpoint.mode != "selfplay") throw ContractError("checkpoint is not a self-play run");
  if (checkpoint.weights.dim() != evaluator_->dim()) throw ContractError("checkpoint weight dimension mismatch");
  weights_ = checkpoint.weights;
  history_ = checkpoint.history;
  set_rng_state(rng_, checkpoint.rng_state);
}

WeightVector train_with_teacher(const Game& game, const Evaluator& evaluator, std::vector<TeacherItem> dataset,
                                const TrainingConfig& cfg, WeightVector initial) {
  TeacherTrainer trainer(game, evaluator, cfg, std::move(dataset), std::move(initial));
  trainer.run_epochs(cfg.epochs);
  return trainer.weights();
}

WeightVector train_selfplay(const Game& game, const Evaluator& evaluator, const TrainingConfig& cfg,
                            WeightVector initial) {
  SelfPlayTrainer trainer(game, evaluator, cfg, std::move(initial));
  trainer.run(cfg.games);
  return trainer.weights();
}

MoveId greedy_move(const SearchTree& tree, Rng& rng) {
  const std::vector<double> q = tree.move_values(SearchTree::root());
  if (q.empty()) throw ContractError("greedy move needs an expanded root");
  const double sign = tree.is_agent_node(SearchTree::root()) ? 1.0 : -1.0;
  double best = sign * q[0];
  for (double x : q) best = std::max(best, sign * x);
  std::vector<std::size_t> ties;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (sign * q[k] == best) ties.push_back(k);
  }
  const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(ties.size()));
  return MoveId{ties[std::min(pick, ties.size() - 1)]};
}

MoveId sampled_move(const SearchTree& tree, Rng& rng) {
  const SearchNode& root = tree.node(SearchTree::root());
  if (!root.expanded) throw ContractError("sampled move needs an expanded root");
  return select_move(Distribution(root.policy), rng);
}

MoveId choose_move(const Game& game, const Evaluator& evaluator, const AgentSpec& agent, const GameState& state,
                   Rng& rng) {
  if (agent.kind == AgentSpec::Kind::kRandom) {
    const std::size_t n = game.num_legal_moves(state);
    const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return MoveId{std::min(pick, n - 1)};
  }
  const SearchTree tree = mcss_search(game, evaluator, agent.weights, state, agent.search, rng);
  return greedy_move(tree, rng);
}

double two_proportion_z(double s1, double n1, double s2, double n2) {
  if (!(n1 > 0.0 && n2 > 0.0)) throw ContractError("two_proportion_z: empty sample");
  const double p1 = s1 / n1;
  const double p2 = s2 / n2;
  const double pooled = (s1 + s2) / (n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  if (se == 0.0) return p1 == p2 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), p1 - p2);
  return (p1 - p2) / se;
}

MatchStats evaluate_agents(const Game& game, const Evaluator& evaluator, const AgentSpec& a, const AgentSpec& b,
                           int n_games, std::uint64_t seed) {
  if (n_games < 1) throw ContractError("evaluate_agents: n_games must be >= 1");
  MatchStats stats;
  stats.games = n_games;
  for (int g = 0; g < n_games; ++g) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(g)));
    GameRecord rec;
    rec.game = g;
    rec.a_player = g % 2 == 0 ? 0 : 1;
    GameState state = game.initial_state();
    while (!game.is_terminal(state)) {
      const AgentSpec& mover = state.player_to_move == rec.a_player ? a : b;
      const MoveId m = choose_move(game, evaluator, mover, state, rng);
      rec.moves.push_back(m);
      state = game.apply_move(state, m);
    }
    const GameOutcome outcome = *game.terminal_outcome(state);
    rec.a_reward = outcome.reward(rec.a_player);
    if (outcome.is_draw()) {
      ++stats.draws;
    } else if (outcome.winner == rec.a_player) {
      ++stats.wins;
    } else {
      ++stats.losses;
    }
    stats.records.push_back(std::move(rec));
  }
  stats.z = two_proportion_z(stats.wins, n_games, stats.losses, n_games);
  return stats;
}

}  // namespace mcss
