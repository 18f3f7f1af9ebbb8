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
#include "mcss/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mcss {

// Strictly positive temperature. The T -> 0 limit is the hard-max mode and
// never a division by zero.
class Temperature {
 public:
  Temperature() = default;
  explicit Temperature(double value);
  double value() const { return value_; }
  friend bool operator==(const Temperature&, const Temperature&) = default;

 private:
  double value_ = 1.0;
};

// Normalized probability vector aligned with a node's legal-move list.
class Distribution {
 public:
  Distribution() = default;
  // Throws ContractError unless all entries are >= 0 and sum to 1 within 1e-12.
  explicit Distribution(std::vector<double> probabilities);

  static Distribution uniform(std::size_t n);
  static Distribution one_hot(std::size_t n, std::size_t index);

  std::size_t size() const { return p_.size(); }
  bool empty() const { return p_.empty(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probabilities() const { return p_; }
  auto begin() const { return p_.begin(); }
  auto end() const { return p_.end(); }

  // Expectation of `values` under this distribution, clamped to the range of
  // the values with positive probability.
  double expectation(std::span<const double> values) const;

 private:
  std::vector<double> p_;
};

inline constexpr double kNormalizationTolerance = 1e-12;

// p_i proportional to exp(E_i / T), max-shifted.
Distribution boltzmann(std::span<const double> values, Temperature temperature);

// Probability 1 on the argmax, split uniformly across exact ties.
Distribution hardmax(std::span<const double> values);

// P_a: maximizing Boltzmann over move values.
Distribution backup_policy_agent(std::span<const double> move_values, Temperature t_agent);
// P_b: minimizing Boltzmann, exp(-Q / T_b).
Distribution backup_policy_opponent(std::span<const double> move_values, Temperature t_opponent);

// Samples an index from `dist`. Consumes exactly one draw from `rng`.
MoveId select_move(const Distribution& dist, Rng& rng);
// Same draw on an already normalized probability vector.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

struct BanditStats {
  std::vector<double> mean_payoff;   // X_a
  std::vector<int> visits;           // n_a
  double exploration = 1.0;          // c

  int parent_visits() const;         // n_s = sum n_a
};

// Unvisited children first (lowest index), then argmax of
// X_a + c * sqrt(2 ln n_s / n_a) with lowest-index tie-break.
MoveId ucb1_select(const BanditStats& stats);

double ucb1_index(double mean, int visits, int parent_visits, double exploration);

// -sum p ln p with 0 ln 0 = 0.
double entropy(const Distribution& dist);

}  // namespace mcss
