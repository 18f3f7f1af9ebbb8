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

#include "mcss/config.hpp"

#include "mcss/errors.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace mcss {

namespace {

using Json = nlohmann::json;
using Setter = std::function<void(const Json&)>;

void apply_section(const Json& j, const std::string& section, const std::map<std::string, Setter>& setters) {
  if (!j.is_object()) throw FormatError("config: '" + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw FormatError("config: unknown key '" + (section.empty() ? key : section + "." + key) + "'");
    }
    try {
      it->second(value);
    } catch (const Json::exception& e) {
      throw FormatError("config: bad value for '" + key + "': " + e.what());
    } catch (const ContractError& e) {
      throw FormatError("config: bad value for '" + key + "': " + e.what());
    }
  }
}

template <typename T>
Setter set(T& field) {
  return [&field](const Json& v) { field = v.get<T>(); };
}

Setter set_temperature(Temperature& field) {
  return [&field](const Json& v) { field = Temperature(v.get<double>()); };
}

void parse_search(const Json& j, const std::string& name, SearchConfig& s) {
  apply_section(j, name,
                {{"max_iterations", set(s.max_iterations)},
                 {"max_depth", set(s.max_depth)},
                 {"t_agent", set_temperature(s.backup.t_agent)},
                 {"t_opponent", set_temperature(s.backup.t_opponent)},
                 {"hard_max", set(s.backup.hard_max)},
                 {"terminal_scale", set(s.backup.terminal_scale)},
                 {"selection", [&](const Json& v) { s.selection = parse_selection_kind(v.get<std::string>()); }},
                 {"t_select", set_temperature(s.t_select)},
                 {"ucb_exploration", set(s.ucb_exploration)}});
}

Json search_to_json(const SearchConfig& s) {
  return {{"max_iterations", s.max_iterations},
          {"max_depth", s.max_depth},
          {"t_agent", s.backup.t_agent.value()},
          {"t_opponent", s.backup.t_opponent.value()},
          {"hard_max", s.backup.hard_max},
          {"terminal_scale", s.backup.terminal_scale},
          {"selection", to_string(s.selection)},
          {"t_select", s.t_select.value()},
          {"ucb_exploration", s.ucb_exploration}};
}

}  // namespace

MatchSection::MatchSection() {
  // Small budget: the root plus one reply subtree, so match results mostly
  // reflect the evaluation function rather than the search.
  search.max_iterations = 2;
  search.max_depth = 2;
}

TrainingConfig RunConfig::training() const {
  TrainingConfig t;
  t.search = search;
  t.learning = learning;
  t.learning.workers = workers;
  t.coefficients = coefficients;
  t.samples_per_root = samples_per_root;
  t.games = games;
  t.epochs = epochs;
  t.seed = seed;
  t.self_play_policy = self_play_policy;
  t.divergence_threshold = divergence_threshold;
  t.t_opponent_final = t_opponent_final;
  return t;
}

void RunConfig::validate() const {
  training().validate();
  match.search.validate();
  if (game.name != "tictactoe" && game.name != "synthetic") {
    throw ContractError("unknown game '" + game.name + "' (tictactoe, synthetic)");
  }
  if (!(game.draw_reward >= 0.0 && game.draw_reward <= 1.0)) throw ContractError("draw_reward must lie in [0, 1]");
  game.synthetic.validate();
  if (train.mode != "selfplay" && train.mode != "supervised") {
    throw ContractError("unknown training mode '" + train.mode + "' (selfplay, supervised)");
  }
  if (match.games < 1) throw ContractError("match.games must be >= 1");
  if (workers < 1) throw ContractError("workers must be >= 1");
}

RunConfig parse_config(const Json& j) {
  RunConfig c;
  apply_section(
      j, "",
      {{"game",
        [&](const Json& g) {
          apply_section(g, "game",
                        {{"name", set(c.game.name)},
                         {"draw_reward", set(c.game.draw_reward)},
                         {"synthetic", [&](const Json& v) {
                            try {
                              c.game.synthetic = v.get<SyntheticTreeSpec>();
                            } catch (const Error& e) {
                              throw FormatError(std::string("config: game.synthetic: ") + e.what());
                            }
                          }}});
        }},
       {"search", [&](const Json& v) { parse_search(v, "search", c.search); }},
       {"learning",
        [&](const Json& l) {
          apply_section(
              l, "learning",
              {{"learning_rate", set(c.learning.learning_rate)},
               {"gamma", set(c.learning.gamma)},
               {"lambda", set(c.learning.lambda)},
               {"sigmoid_temperature", set(c.learning.sigmoid_temperature)},
               {"gradient_mode",
                [&](const Json& v) { c.learning.gradient_mode = parse_gradient_mode(v.get<std::string>()); }},
               {"mc_samples", set(c.learning.mc_samples)},
               {"gradient_clip", set(c.learning.gradient_options.clip)},
               {"clip_enabled", set(c.learning.gradient_options.clip_enabled)}});
        }},
       {"coefficients",
        [&](const Json& k) {
          apply_section(k, "coefficients",
                        {{"supervised", set(c.coefficients.supervised)},
                         {"bootstrap", set(c.coefficients.bootstrap)},
                         {"q_learning", set(c.coefficients.q_learning)},
                         {"td", set(c.coefficients.td)},
                         {"pg", set(c.coefficients.pg)},
                         {"regression", set(c.coefficients.regression)}});
        }},
       {"training",
        [&](const Json& t) {
          apply_section(
              t, "training",
              {{"mode", set(c.train.mode)},
               {"games", set(c.games)},
               {"epochs", set(c.epochs)},
               {"samples_per_root", set(c.samples_per_root)},
               {"self_play_policy",
                [&](const Json& v) { c.self_play_policy = parse_play_policy(v.get<std::string>()); }},
               {"divergence_threshold", set(c.divergence_threshold)},
               {"t_opponent_final",
                [&](const Json& v) {
                  if (v.is_null()) {
                    c.t_opponent_final.reset();
                  } else {
                    c.t_opponent_final = v.get<double>();
                  }
                }},
               {"teacher_file", set(c.train.teacher_file)},
               {"checkpoint_every", set(c.train.checkpoint_every)},
               {"initial_weights", set(c.train.initial_weights)},
               {"resume", set(c.train.resume)}});
        }},
       {"match",
        [&](const Json& m) {
          apply_section(m, "match",
                        {{"games", set(c.match.games)},
                         {"search", [&](const Json& v) { parse_search(v, "match.search", c.match.search); }},
                         {"log_games", set(c.match.log_games)}});
        }},
       {"seed", set(c.seed)},
       {"workers", set(c.workers)},
       {"out_dir", set(c.out_dir)}});
  try {
    c.validate();
  } catch (const ContractError& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

Json config_to_json(const RunConfig& c) {
  Json synthetic = c.game.synthetic;
  return {{"game", {{"name", c.game.name}, {"draw_reward", c.game.draw_reward}, {"synthetic", synthetic}}},
          {"search", search_to_json(c.search)},
          {"learning",
           {{"learning_rate", c.learning.learning_rate},
            {"gamma", c.learning.gamma},
            {"lambda", c.learning.lambda},
            {"sigmoid_temperature", c.learning.sigmoid_temperature},
            {"gradient_mode", to_string(c.learning.gradient_mode)},
            {"mc_samples", c.learning.mc_samples},
            {"gradient_clip", c.learning.gradient_options.clip},
            {"clip_enabled", c.learning.gradient_options.clip_enabled}}},
          {"coefficients",
           {{"supervised", c.coefficients.supervised},
            {"bootstrap", c.coefficients.bootstrap},
            {"q_learning", c.coefficients.q_learning},
            {"td", c.coefficients.td},
            {"pg", c.coefficients.pg},
            {"regression", c.coefficients.regression}}},
          {"training",
           {{"mode", c.train.mode},
            {"games", c.games},
            {"epochs", c.epochs},
            {"samples_per_root", c.samples_per_root},
            {"self_play_policy", to_string(c.self_play_policy)},
            {"divergence_threshold", c.divergence_threshold},
            {"t_opponent_final", c.t_opponent_final ? Json(*c.t_opponent_final) : Json(nullptr)},
            {"teacher_file", c.train.teacher_file},
            {"checkpoint_every", c.train.checkpoint_every},
            {"initial_weights", c.train.initial_weights},
            {"resume", c.train.resume}}},
          {"match", {{"games", c.match.games}, {"search", search_to_json(c.match.search)}, {"log_games", c.match.log_games}}},
          {"seed", c.seed},
          {"workers", c.workers},
          {"out_dir", c.out_dir}};
}

std::unique_ptr<Game> make_game(const GameConfig& cfg) {
  if (cfg.name == "tictactoe") return std::make_unique<TicTacToe>(cfg.draw_reward);
  if (cfg.name == "synthetic") return std::make_unique<SyntheticGame>(cfg.synthetic);
  throw ContractError("unknown game '" + cfg.name + "'");
}

}  // namespace mcss
