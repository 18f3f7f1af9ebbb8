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

#include "mcss/game.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>

namespace mcss {

// Parameter vector of the evaluation function. Every update is checked for
// finiteness and bumps the version counter.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::size_t dim) : values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))) {}
  explicit WeightVector(Eigen::VectorXd values);

  std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  std::uint64_t version() const { return version_; }

  // values += delta. Throws DivergenceError if the result is not finite; the
  // weights are left untouched in that case.
  void apply(const Eigen::VectorXd& delta);

 private:
  Eigen::VectorXd values_;
  std::uint64_t version_ = 0;
};

// Positional evaluation H(s; w), always scored from player 0's point of view
// whatever the player to move.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual std::size_t dim() const = 0;
  virtual double evaluate(const GameState& state, const WeightVector& weights) const = 0;
  virtual FeatureVector gradient(const GameState& state, const WeightVector& weights) const = 0;
};

// H(s; w) = features(s) . w
class LinearEvaluator final : public Evaluator {
 public:
  explicit LinearEvaluator(const Game& game) : game_(&game) {}

  std::size_t dim() const override { return game_->feature_dim(); }
  double evaluate(const GameState& state, const WeightVector& weights) const override;
  FeatureVector gradient(const GameState& state, const WeightVector& weights) const override;

  const Game& game() const { return *game_; }

 private:
  void check_dim(const WeightVector& weights) const;

  const Game* game_;
};

// Weight checkpoint:
//   MCSS-WEIGHTS
//   version 1
//   dim <F>
//   game <name>
//   <F lines, one scalar each, 17 significant digits>
struct WeightFile {
  WeightVector weights;
  std::string game;
};

inline constexpr int kWeightFormatVersion = 1;

std::string format_weights(const WeightVector& weights, const std::string& game);
WeightFile parse_weights(const std::string& text);
void save_weights(const std::filesystem::path& path, const WeightVector& weights, const std::string& game);
// Throws FormatError on any malformed or truncated file.
WeightFile load_weights(const std::filesystem::path& path);

// Shortest round-trip decimal (17 significant digits).
std::string format_scalar(double value);

}  // namespace mcss
