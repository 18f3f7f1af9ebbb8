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
#include "mcss/verify.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace mcss;

namespace {

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<std::vector<CheckResult>()> run;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// stdout plus every output file except the timestamped run log.
std::string invoke(std::vector<std::string> args, const fs::path& out_dir) {
  fs::remove_all(out_dir);
  args.insert(args.begin(), "mcss");
  args.push_back("--out-dir");
  args.push_back(out_dir.string());
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  std::string record = "exit " + std::to_string(code) + "\n" + out.str();
  if (fs::exists(out_dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(out_dir)) {
      if (e.is_regular_file() && e.path().filename() != "run.log") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) record += "== " + fs::relative(f, out_dir).string() + "\n" + slurp(f);
  }
  return record;
}

std::vector<CheckResult> determinism() {
  const fs::path root = fs::temp_directory_path() / "mcss_acceptance_determinism";
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"search", {"search", "--position", "0,3", "--seed", "7", "--workers", "1"}},
      {"train", {"train", "--games", "10", "--seed", "7", "--workers", "1"}},
      {"play", {"play", "--games", "40", "--log-games", "--weights-a", "zero", "--weights-b", "random", "--seed", "7"}},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, args] : commands) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string a = invoke(args, root / name);
    const std::string b = invoke(args, root / name);
    const bool ok = a == b && a.rfind("exit 0\n", 0) == 0;
    out.push_back({"determinism", name, ok, "bytes=" + std::to_string(a.size()) + (a == b ? " identical" : " differ"),
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> args{"mcss", "verify", "--suite", "td_traces", "--seed", "7"};
    std::vector<const char*> argv;
    for (const std::string& s : args) argv.push_back(s.c_str());
    std::ostringstream o1, o2, e;
    const int c1 = run_cli(static_cast<int>(argv.size()), argv.data(), o1, e);
    const int c2 = run_cli(static_cast<int>(argv.size()), argv.data(), o2, e);
    out.push_back({"determinism", "verify", c1 == 0 && c2 == 0 && o1.str() == o2.str(),
                   o1.str() == o2.str() ? "identical" : "differ",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  }
  fs::remove_all(root);
  return out;
}

}  // namespace

int main() {
  const std::uint64_t seed = 1;
  const std::vector<Criterion> criteria{
      {1, "softmax-minimax bound and PV", 10.0, [&] { return std::vector{check_softmax_minimax(seed)}; }},
      {2, "exact gradients vs finite differences; move-gradient identity", 30.0,
       [&] { return std::vector{check_gradients_fd(seed), check_move_gradient_identity(seed)}; }},
      {3, "backup-probability normalization and expectation", 5.0,
       [&] { return std::vector{check_backup_probability(seed)}; }},
      {4, "Monte Carlo gradient convergence", 60.0,
       [&] { return std::vector{check_mc_within_se(seed), check_mc_rate(seed)}; }},
      {5, "loss gradients vs finite differences", 30.0, [&] { return std::vector{check_loss_gradients(seed)}; }},
      {6, "TD(lambda) trace identity", 1.0, [&] { return std::vector{check_td_traces(seed)}; }},
      {7, "realizable-teacher learning", 120.0, [&] { return std::vector{check_teacher_learning(seed)}; }},
      {8, "self-play improvement over the zero-weight agent", 300.0,
       [&] { return std::vector{check_selfplay_improvement(seed)}; }},
      {9, "n-player reduction", 5.0, [&] { return std::vector{check_nplayer(seed)}; }},
      {10, "CLI determinism", 300.0, [&] { return determinism(); }},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<CheckResult> results = c.run();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = seconds <= c.budget_seconds;
    std::string detail;
    for (const CheckResult& r : results) {
      ok = ok && r.passed;
      detail += " [" + r.name + (r.passed ? " ok: " : " FAILED: ") + r.detail + "]";
    }
    char timing[64];
    std::snprintf(timing, sizeof timing, " time=%.2fs budget=%.0fs", seconds, c.budget_seconds);
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << detail << timing << std::endl;
    failed += ok ? 0 : 1;
  }
  std::cout << (failed == 0 ? "PASS" : "FAIL") << " acceptance: " << (criteria.size() - failed) << "/"
            << criteria.size() << " criteria" << std::endl;
  return failed == 0 ? 0 : 1;
}
