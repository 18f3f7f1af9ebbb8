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

#include "mcss/policies.hpp"

#include "mcss/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcss {

Temperature::Temperature(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ContractError("temperature must be a finite positive number");
  }
}

Distribution::Distribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
  double sum = 0.0;
  for (double x : p_) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ContractError("probabilities must be finite and non-negative");
    sum += x;
  }
  if (p_.empty() || std::abs(sum - 1.0) > kNormalizationTolerance) {
    throw ContractError("probabilities must sum to 1");
  }
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw ContractError("uniform distribution over zero moves");
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::one_hot(std::size_t n, std::size_t index) {
  if (index >= n) throw ContractError("one-hot index out of range");
  std::vector<double> p(n, 0.0);
  p[index] = 1.0;
  return Distribution(std::move(p));
}

double Distribution::expectation(std::span<const double> values) const {
  if (values.size() != p_.size()) throw ContractError("expectation: size mismatch");
  double acc = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    acc += p_[i] * values[i];
    if (p_[i] > 0.0) {
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
  }
  return std::clamp(acc, lo, hi);
}

namespace {

void check_values(std::span<const double> values) {
  if (values.empty()) throw ContractError("policy over an empty move list");
  for (double v : values) {
    if (!std::isfinite(v)) throw ContractError("policy input contains a non-finite value");
  }
}

// Normalizes exp(sign * (v_i - best) / T) where best is the extreme value.
Distribution shifted_boltzmann(std::span<const double> values, double sign, double t) {
  check_values(values);
  double best = -std::numeric_limits<double>::infinity();
  for (double v : values) best = std::max(best, sign * v);
  std::vector<double> p(values.size());
  double z = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    p[i] = std::exp((sign * values[i] - best) / t);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return Distribution(std::move(p));
}

}  // namespace

Distribution boltzmann(std::span<const double> values, Temperature temperature) {
  return shifted_boltzmann(values, 1.0, temperature.value());
}

Distribution hardmax(std::span<const double> values) {
  check_values(values);
  const double best = *std::max_element(values.begin(), values.end());
  const auto ties = static_cast<double>(std::count(values.begin(), values.end(), best));
  std::vector<double> p(values.size(), 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == best) p[i] = 1.0 / ties;
  }
  return Distribution(std::move(p));
}

Distribution backup_policy_agent(std::span<const double> move_values, Temperature t_agent) {
  return shifted_boltzmann(move_values, 1.0, t_agent.value());
}

Distribution backup_policy_opponent(std::span<const double> move_values, Temperature t_opponent) {
  return shifted_boltzmann(move_values, -1.0, t_opponent.value());
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_positive = i;
    acc += probabilities[i];
    if (u < acc) return i;
  }
  // Rounding left acc slightly below 1.
  return last_positive;
}

MoveId select_move(const Distribution& dist, Rng& rng) { return MoveId{sample_index(dist.probabilities(), rng)}; }

int BanditStats::parent_visits() const {
  int n = 0;
  for (int v : visits) n += v;
  return n;
}

double ucb1_index(double mean, int visits, int parent_visits, double exploration) {
  return mean + exploration * std::sqrt(2.0 * std::log(static_cast<double>(parent_visits)) / visits);
}

MoveId ucb1_select(const BanditStats& stats) {
  if (stats.visits.empty() || stats.visits.size() != stats.mean_payoff.size()) {
    throw ContractError("ucb1_select: inconsistent bandit statistics");
  }
  for (std::size_t i = 0; i < stats.visits.size(); ++i) {
    if (stats.visits[i] < 0) throw ContractError("ucb1_select: negative visit count");
    if (stats.visits[i] == 0) return MoveId{i};
  }
  const int n_s = stats.parent_visits();
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < stats.visits.size(); ++i) {
    const double index = ucb1_index(stats.mean_payoff[i], stats.visits[i], n_s, stats.exploration);
    if (index > best_index) {
      best_index = index;
      best = i;
    }
  }
  return MoveId{best};
}

double entropy(const Distribution& dist) {
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace mcss
