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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace mcss;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mcss");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mcss_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"fly"}).code == kExitUsage);
  CHECK(cli({"search", "--bogus"}).code == kExitUsage);
  const Run r = cli({"verify", "--suite", "nope"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("gradients") != std::string::npos);
}

TEST_CASE("search prints the root summary") {
  const fs::path dir = scratch("search");
  const Run r = cli({"search", "--position", "4", "--out-dir", dir.string(), "--dump-tree", (dir / "t.txt").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("position 4\nroot_value ", 0) == 0);
  CHECK(r.out.find("\nmove 7 Q ") != std::string::npos);
  CHECK(r.out.find("\nmove 8 Q ") == std::string::npos);
  CHECK(r.out.find("\npv ") != std::string::npos);
  CHECK(slurp(dir / "t.txt").rfind("# mcss-tree nodes ", 0) == 0);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(cli({"search", "--position", "4", "--out-dir", dir.string()}).out == r.out);
  CHECK(cli({"search", "--position", "9", "--out-dir", dir.string()}).code == kExitUsage);
  CHECK(cli({"search", "--position", "x", "--out-dir", dir.string()}).code == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("verify reports each check") {
  const Run r = cli({"verify", "--suite", "td_traces"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "PASS td_traces/recursive_equals_unrolled trajectories=100 max_diff=" +
                     r.out.substr(r.out.find("max_diff=") + 9, 9) + " tol=1e-12\nPASS td_traces\n");
}

TEST_CASE("train writes metrics and resumes") {
  const fs::path dir = scratch("train");
  fs::create_directories(dir);
  {
    std::ofstream c(dir / "c.json");
    c << R"({"search": {"max_iterations": 20}, "samples_per_root": 2, "training": {"games": 6, "checkpoint_every": 3}})";
    c.close();
  }
  // samples_per_root belongs to the training section.
  CHECK(cli({"train", "--config", (dir / "c.json").string(), "--out-dir", (dir / "x").string()}).code == kExitUsage);
  {
    std::ofstream c(dir / "c.json");
    c << R"({"search": {"max_iterations": 20}, "training": {"games": 6, "checkpoint_every": 3, "samples_per_root": 2}})";
  }
  const Run full = cli({"train", "--config", (dir / "c.json").string(), "--out-dir", (dir / "full").string()});
  REQUIRE(full.code == kExitOk);
  const std::string csv = slurp(dir / "full" / "metrics.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(fs::exists(dir / "full" / "checkpoint_3.weights"));
  CHECK(fs::exists(dir / "full" / "final.weights.meta.json"));
  CHECK(cli({"train", "--config", (dir / "c.json").string(), "--out-dir", (dir / "again").string()}).out == full.out);
  CHECK(slurp(dir / "again" / "metrics.csv") == csv);
  {
    std::ofstream c(dir / "r.json");
    c << R"({"search": {"max_iterations": 20}, "training": {"games": 6, "samples_per_root": 2, "resume": ")"
      << (dir / "full" / "checkpoint_3.weights").string() << R"("}})";
  }
  const Run resumed = cli({"train", "--config", (dir / "r.json").string(), "--out-dir", (dir / "res").string()});
  REQUIRE(resumed.code == kExitOk);
  CHECK(resumed.out == full.out);
  CHECK(slurp(dir / "res" / "metrics.csv") == csv);
  CHECK(slurp(dir / "res" / "final.weights") == slurp(dir / "full" / "final.weights"));
  CHECK(cli({"train", "--mode", "supervised", "--out-dir", (dir / "s").string()}).code == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("training divergence exits with its own code") {
  const fs::path dir = scratch("diverge");
  fs::create_directories(dir);
  {
    std::ofstream c(dir / "c.json");
    c << R"({"search": {"max_iterations": 20}, "training": {"games": 3, "divergence_threshold": 1e-12}})";
  }
  const Run r = cli({"train", "--config", (dir / "c.json").string(), "--out-dir", (dir / "o").string()});
  CHECK(r.code == kExitDiverged);
  fs::remove_all(dir);
}

TEST_CASE("play reports a match") {
  const fs::path dir = scratch("play");
  const Run r = cli({"play", "--games", "12", "--log-games", "--weights-a", "random", "--weights-b", "random",
                     "--out-dir", dir.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("games 12\nwins ", 0) == 0);
  const std::string games = slurp(dir / "games.csv");
  CHECK(std::count(games.begin(), games.end(), '\n') == 13);
  {
    std::ofstream w(dir / "short.weights");
    w << "MCSS-WEIGHTS\nversion 1\ndim 2\ngame tictactoe\n1\n2\n";
  }
  CHECK(cli({"play", "--weights-a", (dir / "short.weights").string(), "--out-dir", dir.string()}).code == kExitUsage);
  {
    std::ofstream w(dir / "bad.weights");
    w << "MCSS-WEIGHTS\nversion 1\ndim 18\n";
  }
  const Run bad = cli({"play", "--weights-a", (dir / "bad.weights").string(), "--out-dir", dir.string()});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("error:") != std::string::npos);
  fs::remove_all(dir);
}
