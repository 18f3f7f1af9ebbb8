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

#include "mcss/cli.hpp"

#include "mcss/config.hpp"
#include "mcss/errors.hpp"
#include "mcss/gradients.hpp"
#include "mcss/training.hpp"
#include "mcss/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace mcss {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> mode;
  std::optional<std::size_t> games;
  std::string suite = "all";
  std::string position;
  std::string weights;
  std::string weights_a = "zero";
  std::string weights_b = "random";
  std::string dump_tree;
  bool log_games = false;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
}

RunConfig resolve_config(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.mode) cfg.train.mode = *o.mode;
  if (o.games) {
    cfg.games = *o.games;
    cfg.match.games = static_cast<int>(*o.games);
  }
  if (o.log_games) cfg.match.log_games = true;
  cfg.validate();
  return cfg;
}

// Echoes the resolved configuration: verbatim copy in the output directory,
// plus a run log with timestamps kept apart from the primary outputs.
class RunLog {
 public:
  RunLog(const RunConfig& cfg, const std::string& command, std::ostream& err)
      : dir_(cfg.out_dir), err_(err), start_(std::chrono::system_clock::now()) {
    fs::create_directories(dir_);
    const std::string echoed = config_to_json(cfg).dump(2) + "\n";
    write_file(dir_ / "config.json", echoed);
    log_ << "command " << command << "\n" << "started " << stamp(start_) << "\n" << "config\n" << echoed;
    err_ << "config\n" << echoed;
  }

  ~RunLog() {
    const auto end = std::chrono::system_clock::now();
    log_ << "finished " << stamp(end) << "\n"
         << "elapsed_seconds " << std::chrono::duration<double>(end - start_).count() << "\n";
    try {
      write_file(dir_ / "run.log", log_.str());
    } catch (const std::exception& e) {
      err_ << "warning: " << e.what() << "\n";
    }
  }

  void line(const std::string& text) { log_ << text << "\n"; }

 private:
  static std::string stamp(std::chrono::system_clock::time_point t) {
    return std::to_string(std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count());
  }

  fs::path dir_;
  std::ostream& err_;
  std::chrono::system_clock::time_point start_;
  std::ostringstream log_;
};

WeightVector load_checked(const std::string& path, const Game& game) {
  WeightFile wf = load_weights(path);
  if (wf.weights.dim() != game.feature_dim()) {
    throw FormatError("weights '" + path + "' have dimension " + std::to_string(wf.weights.dim()) + ", game '" +
                      game.name() + "' needs " + std::to_string(game.feature_dim()));
  }
  if (wf.game != game.name()) {
    throw FormatError("weights '" + path + "' are for game '" + wf.game + "', not '" + game.name() + "'");
  }
  return wf.weights;
}

WeightVector initial_weights(const std::string& path, const Game& game) {
  return path.empty() ? WeightVector(game.feature_dim()) : load_checked(path, game);
}

int cmd_search(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  const std::unique_ptr<Game> game = make_game(cfg.game);
  const LinearEvaluator ev(*game);
  const WeightVector w = initial_weights(o.weights, *game);
  const std::vector<MoveId> moves = parse_move_sequence(o.position);
  GameState root;
  try {
    root = replay(*game, moves);
  } catch (const ContractError& e) {
    throw FormatError("invalid position '" + o.position + "': " + e.what());
  }
  if (game->is_terminal(root)) throw FormatError("invalid position '" + o.position + "': game is over");
  RunLog log(cfg, "search", err);
  Rng rng(cfg.seed);
  const SearchTree tree = mcss_search(*game, ev, w, root, cfg.search, rng);
  const SearchNode& r = tree.node(SearchTree::root());
  out << "position " << (moves.empty() ? "-" : format_move_sequence(moves)) << "\n";
  out << "root_value " << format_scalar(r.value) << "\n";
  out << "nodes " << tree.size() << "\n";
  out << "root_complete " << (r.complete ? 1 : 0) << "\n";
  for (std::size_t k = 0; k < r.children.size(); ++k) {
    out << "move " << k << " Q " << format_scalar(tree.move_value(SearchTree::root(), k)) << " P "
        << format_scalar(r.policy.empty() ? 0.0 : r.policy[k]) << "\n";
  }
  const std::vector<MoveId> pv = principal_variation(tree);
  out << "pv " << (pv.empty() ? "-" : format_move_sequence(pv)) << "\n";
  if (!o.dump_tree.empty()) write_file(o.dump_tree, tree.dump());
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = o.seed.value_or(1);
  const std::vector<CheckResult> results = run_suite(o.suite, seed);
  bool ok = true;
  for (const CheckResult& r : results) {
    out << format_check(r) << "\n";
    err << r.suite << "/" << r.name << " seconds " << r.seconds << "\n";
    ok = ok && r.passed;
  }
  out << (ok ? "PASS" : "FAIL") << " " << o.suite << "\n";
  return ok ? kExitOk : kExitVerifyFailed;
}

template <typename Trainer>
int drive_training(Trainer& trainer, std::size_t total, const RunConfig& cfg, const Game& game, RunLog& log,
                   std::ostream& out) {
  const fs::path dir(cfg.out_dir);
  auto write_metrics = [&] {
    std::string csv = metrics_csv_header() + "\n";
    for (const IterationMetrics& m : trainer.history()) csv += metrics_csv_row(m) + "\n";
    write_file(dir / "metrics.csv", csv);
  };
  const std::size_t start = trainer.iteration();
  if (start > total) throw FormatError("checkpoint is past the configured run length");
  int status = kExitOk;
  try {
    for (std::size_t i = start; i < total; ++i) {
      trainer.step();
      const std::size_t done = trainer.iteration();
      if (cfg.train.checkpoint_every > 0 && done % cfg.train.checkpoint_every == 0 && done < total) {
        save_checkpoint((dir / ("checkpoint_" + std::to_string(done) + ".weights")).string(), trainer.checkpoint());
      }
    }
  } catch (const DivergenceError& e) {
    log.line(std::string("diverged: ") + e.what());
    out << "diverged " << e.what() << "\n";
    status = kExitDiverged;
  }
  write_metrics();
  save_checkpoint((dir / "final.weights").string(), trainer.checkpoint());
  out << "game " << game.name() << "\n";
  out << "iterations " << trainer.iteration() << "\n";
  out << "weights";
  for (Eigen::Index i = 0; i < trainer.weights().values().size(); ++i) {
    out << " " << format_scalar(trainer.weights().values()[i]);
  }
  out << "\n";
  return status;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  const std::unique_ptr<Game> game = make_game(cfg.game);
  const LinearEvaluator ev(*game);
  const TrainingConfig tc = cfg.training();
  std::optional<Checkpoint> resume;
  if (!cfg.train.resume.empty()) {
    resume = load_checkpoint(cfg.train.resume);
    if (resume->mode != cfg.train.mode) throw FormatError("checkpoint mode '" + resume->mode + "' differs from run");
  }
  if (cfg.train.mode == "supervised") {
    if (cfg.train.teacher_file.empty()) throw FormatError("supervised mode needs train.teacher_file");
    std::vector<TeacherItem> data = parse_teacher_file(*game, read_file(cfg.train.teacher_file));
    if (data.empty()) throw FormatError("teacher file '" + cfg.train.teacher_file + "' has no positions");
    const std::size_t total = cfg.epochs * data.size();
    RunLog log(cfg, "train", err);
    TeacherTrainer trainer(*game, ev, tc, std::move(data), initial_weights(cfg.train.initial_weights, *game));
    if (resume) trainer.restore(*resume);
    const int status = drive_training(trainer, total, cfg, *game, log, out);
    out << "mean_kl " << format_scalar(trainer.mean_kl()) << "\n";
    return status;
  }
  if (cfg.train.mode != "selfplay") throw FormatError("unknown training mode '" + cfg.train.mode + "'");
  RunLog log(cfg, "train", err);
  SelfPlayTrainer trainer(*game, ev, tc, initial_weights(cfg.train.initial_weights, *game));
  if (resume) trainer.restore(*resume);
  return drive_training(trainer, cfg.games, cfg, *game, log, out);
}

AgentSpec agent_from(const std::string& spec, const Game& game, const SearchConfig& search) {
  if (spec == "random") return AgentSpec::random_mover();
  if (spec == "zero") return AgentSpec::searcher(WeightVector(game.feature_dim()), search);
  return AgentSpec::searcher(load_checked(spec, game), search);
}

int cmd_play(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve_config(o);
  const std::unique_ptr<Game> game = make_game(cfg.game);
  const LinearEvaluator ev(*game);
  const AgentSpec a = agent_from(o.weights_a, *game, cfg.match.search);
  const AgentSpec b = agent_from(o.weights_b, *game, cfg.match.search);
  RunLog log(cfg, "play", err);
  const MatchStats s = evaluate_agents(*game, ev, a, b, cfg.match.games, cfg.seed);
  out << "games " << s.games << "\n";
  out << "wins " << s.wins << "\n";
  out << "draws " << s.draws << "\n";
  out << "losses " << s.losses << "\n";
  out << "win_or_draw_rate " << format_scalar(s.win_or_draw_rate()) << "\n";
  out << "z " << format_scalar(s.z) << "\n";
  if (cfg.match.log_games) {
    std::string csv = "game,a_player,a_reward,moves\n";
    for (const GameRecord& r : s.records) {
      csv += std::to_string(r.game) + "," + std::to_string(r.a_player) + "," + format_scalar(r.a_reward) + "," +
             (r.moves.empty() ? "-" : format_move_sequence(r.moves)) + "\n";
    }
    write_file(fs::path(cfg.out_dir) / "games.csv", csv);
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo softmax search and learning"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Global seed");
    sub->add_option("--workers", o.workers, "Worker threads for Monte Carlo gradients");
    sub->add_option("--out-dir", o.out_dir, "Directory for run outputs");
  };

  CLI::App* search = app.add_subcommand("search", "Run one search and print the root summary");
  common(search);
  search->add_option("--position", o.position, "Comma-separated move indices from the initial position");
  search->add_option("--weights", o.weights, "Weight file (default: zero weights)");
  search->add_option("--dump-tree", o.dump_tree, "Write the search tree to this file");

  CLI::App* verify = app.add_subcommand("verify", "Run oracle and invariant suites");
  verify->add_option("--suite", o.suite, "Suite name or 'all'");
  verify->add_option("--seed", o.seed, "Global seed");

  CLI::App* train = app.add_subcommand("train", "Train evaluation weights");
  common(train);
  train->add_option("--mode", o.mode, "selfplay or supervised");
  train->add_option("--games", o.games, "Self-play games");

  CLI::App* play = app.add_subcommand("play", "Play a match between two agents");
  common(play);
  play->add_option("--weights-a", o.weights_a, "Weight file, 'zero' or 'random'");
  play->add_option("--weights-b", o.weights_b, "Weight file, 'zero' or 'random'");
  play->add_option("--games", o.games, "Number of games");
  play->add_flag("--log-games", o.log_games, "Write per-game move logs to games.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (search->parsed()) return cmd_search(o, out, err);
    if (verify->parsed()) return cmd_verify(o, out, err);
    if (train->parsed()) return cmd_train(o, out, err);
    return cmd_play(o, out, err);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace mcss
