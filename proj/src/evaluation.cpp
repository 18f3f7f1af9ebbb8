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

#include "mcss/evaluation.hpp"

#include "mcss/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mcss {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

WeightVector::WeightVector(Eigen::VectorXd values) : values_(std::move(values)) {
  if (!all_finite(values_)) throw DivergenceError("weights must be finite");
}

void WeightVector::apply(const Eigen::VectorXd& delta) {
  if (delta.size() != values_.size()) {
    throw ContractError("delta dimension " + std::to_string(delta.size()) + " != weight dimension " +
                        std::to_string(values_.size()));
  }
  Eigen::VectorXd next = values_ + delta;
  if (!all_finite(next)) throw DivergenceError("weight update produced a non-finite component");
  values_ = std::move(next);
  ++version_;
}

void LinearEvaluator::check_dim(const WeightVector& weights) const {
  if (weights.dim() != game_->feature_dim()) {
    throw ContractError("weight dimension " + std::to_string(weights.dim()) + " != feature dimension " +
                        std::to_string(game_->feature_dim()));
  }
}

double LinearEvaluator::evaluate(const GameState& state, const WeightVector& weights) const {
  check_dim(weights);
  return game_->features(state).dot(weights.values());
}

FeatureVector LinearEvaluator::gradient(const GameState& state, const WeightVector& weights) const {
  check_dim(weights);
  return game_->features(state);
}

std::string format_scalar(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_weights(const WeightVector& weights, const std::string& game) {
  std::ostringstream os;
  os << "MCSS-WEIGHTS\n"
     << "version " << kWeightFormatVersion << "\n"
     << "dim " << weights.dim() << "\n"
     << "game " << game << "\n";
  for (std::size_t i = 0; i < weights.dim(); ++i) os << format_scalar(weights[i]) << "\n";
  return os.str();
}

WeightFile parse_weights(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(is, line)) throw FormatError(std::string("weight file truncated before ") + what);
    return line;
  };
  if (next_line("magic") != "MCSS-WEIGHTS") throw FormatError("weight file: bad magic string");

  auto keyed = [&](const std::string& key) {
    const std::string l = next_line(key.c_str());
    if (l.rfind(key + " ", 0) != 0) throw FormatError("weight file: expected '" + key + "' line");
    return l.substr(key.size() + 1);
  };
  std::size_t pos = 0;
  int version = 0;
  long long dim = 0;
  try {
    const std::string v = keyed("version");
    version = std::stoi(v, &pos);
    if (pos != v.size()) throw FormatError("weight file: bad version");
    const std::string d = keyed("dim");
    dim = std::stoll(d, &pos);
    if (pos != d.size() || dim < 0) throw FormatError("weight file: bad dimension");
  } catch (const std::logic_error&) {
    throw FormatError("weight file: unparsable header");
  }
  if (version != kWeightFormatVersion) throw FormatError("weight file: unsupported version " + std::to_string(version));
  WeightFile out;
  out.game = keyed("game");

  Eigen::VectorXd values(dim);
  for (long long i = 0; i < dim; ++i) {
    const std::string l = next_line("all weights were read");
    double x = 0.0;
    try {
      x = std::stod(l, &pos);
    } catch (const std::logic_error&) {
      throw FormatError("weight file: bad scalar on line " + std::to_string(i + 5));
    }
    if (pos != l.size() || !std::isfinite(x)) {
      throw FormatError("weight file: bad scalar on line " + std::to_string(i + 5));
    }
    values[i] = x;
  }
  while (std::getline(is, line)) {
    if (!line.empty()) throw FormatError("weight file: trailing data");
  }
  out.weights = WeightVector(std::move(values));
  return out;
}

void save_weights(const std::filesystem::path& path, const WeightVector& weights, const std::string& game) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << format_weights(weights, game);
  if (!os) throw Error("write failed for " + path.string());
}

WeightFile load_weights(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open weight file " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_weights(buf.str());
}

}  // namespace mcss
