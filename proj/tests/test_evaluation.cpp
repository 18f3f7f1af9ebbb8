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
#include "mcss/evaluation.hpp"
#include "mcss/games.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace mcss;

TEST_CASE("linear evaluation is the feature dot product") {
  TicTacToe g;
  LinearEvaluator ev(g);
  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(18, -1.0, 1.0);
  GameState s = g.apply_move(g.initial_state(), MoveId{4});
  s = g.apply_move(s, MoveId{0});
  const WeightVector weights(w);
  CHECK(ev.evaluate(s, weights) == doctest::Approx(w[4] + w[9]));
  CHECK(ev.gradient(s, weights) == g.features(s));
  CHECK_THROWS_AS(ev.evaluate(s, WeightVector(3)), ContractError);
}

TEST_CASE("weight updates bump the version") {
  WeightVector w(2);
  CHECK(w.version() == 0);
  w.apply(Eigen::Vector2d(0.5, -1.0));
  CHECK(w.version() == 1);
  CHECK(w[1] == -1.0);
  CHECK_THROWS_AS(w.apply(Eigen::Vector3d::Zero()), ContractError);
  Eigen::VectorXd bad(2);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS(w.apply(bad), DivergenceError);
  CHECK(w[0] == 0.5);
}

TEST_CASE("weight files round trip bit for bit") {
  Eigen::VectorXd v(3);
  v << 0.1, -1.0 / 3.0, 1e-300;
  const std::string text = format_weights(WeightVector(v), "tictactoe");
  CHECK(text.rfind("MCSS-WEIGHTS\nversion 1\ndim 3\ngame tictactoe\n", 0) == 0);
  const WeightFile wf = parse_weights(text);
  CHECK(wf.game == "tictactoe");
  CHECK(wf.weights.values() == v);
  CHECK(format_scalar(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_scalar(-1.0 / 3.0)) == -1.0 / 3.0);
}

TEST_CASE("corrupted weight files fail cleanly") {
  const std::string good = format_weights(WeightVector(Eigen::Vector2d(1.0, 2.0)), "synthetic");
  CHECK_THROWS_AS(parse_weights("garbage\n"), FormatError);
  CHECK_THROWS_AS(parse_weights(good.substr(0, good.size() - 3)), FormatError);
  std::string wrong_version = good;
  wrong_version.replace(wrong_version.find("version 1"), 9, "version 9");
  CHECK_THROWS_AS(parse_weights(wrong_version), FormatError);
  std::string bad_number = good;
  bad_number.replace(bad_number.rfind('2'), 1, "x");
  CHECK_THROWS_AS(parse_weights(bad_number), FormatError);
  CHECK_THROWS_AS(load_weights("/nonexistent/weights"), FormatError);
}

TEST_CASE("weight files save and load") {
  const auto path = std::filesystem::temp_directory_path() / "mcss_test_weights.txt";
  save_weights(path, WeightVector(Eigen::Vector2d(0.25, -4.0)), "synthetic");
  const WeightFile wf = load_weights(path);
  CHECK(wf.weights.values() == Eigen::Vector2d(0.25, -4.0));
  std::filesystem::remove(path);
}
