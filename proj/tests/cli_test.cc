/*
 * Copyright 2026 The rdtrans Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rdtrans/decision.h"
#include "rdtrans/ingest.h"
#include "test_support.h"

namespace rdtrans {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;
using testing::Direct;
using testing::PublishedCubic;
using testing::Rng;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult Run(const std::string& args) {
  const std::string cmd =
      std::string("\"") + RDTRANS_CLI_PATH + "\" " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class TempDir {
 public:
  TempDir() {
    Rng rng(static_cast<uint64_t>(::getpid()));
    path_ = fs::temp_directory_path() /
            ("rdtrans_cli_" + std::to_string(rng.Next() % 1000000007));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string Write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string Path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string ReadAll(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTierNames[] = {"360p", "540p", "720p", "1080p"};

// One row per default-grid bitrate for each (gop, cluster) at 1080p.
std::string CurveFile(const std::vector<std::pair<std::string, int>>& gops) {
  std::ostringstream text;
  text.precision(17);
  text << kMeasurementHeader << "\n";
  const BitrateGrid grid = BitrateGrid::Default();
  for (const auto& [id, cluster] : gops) {
    const Cubic c = PublishedCubic(cluster, testing::kTier1080);
    for (double r : grid.bitrates()) {
      text << id << ",1080p," << r << "," << Direct(c, r) << "\n";
    }
  }
  return text.str();
}

// 60 GOPs, ten per cluster, every tier, uniform noise of at most 0.1 dB.
std::string NoisyTrainingFile(uint64_t seed) {
  Rng rng(seed);
  std::ostringstream text;
  text.precision(17);
  text << kMeasurementHeader << "\n";
  const BitrateGrid grid = BitrateGrid::Default();
  for (int g = 0; g < 60; ++g) {
    const int cluster = g % 6 + 1;
    for (int t = 0; t < 4; ++t) {
      for (double r : grid.bitrates()) {
        text << "train/" << g << "," << kTierNames[t] << "," << r << ","
             << Direct(PublishedCubic(cluster, t), r) + rng.Uniform(-0.1, 0.1)
             << "\n";
      }
    }
  }
  return text.str();
}

TEST_CASE("verify-paper passes and reports the known discrepancies") {
  const RunResult human = Run("verify-paper");
  CHECK(human.exit_code == 0);
  CHECK(human.out.find("verification passed") != std::string::npos);
  CHECK(human.out.find("DISCREPANCY") != std::string::npos);

  const RunResult json = Run("verify-paper --format json");
  CHECK(json.exit_code == 0);
  const Json doc = Json::parse(json.out);
  CHECK(doc["passed"] == true);
  int flagged = 0;
  for (const Json& row : doc["rows"]) {
    if (row["criterion"] == 10) {
      CHECK(row["status"] == "DISCREPANCY");
      ++flagged;
    }
  }
  CHECK(flagged >= 2);
}

TEST_CASE("recommend reproduces a visually-lossless savings column") {
  TempDir dir;
  std::vector<std::pair<std::string, int>> gops;
  const int clusters[] = {6, 6, 6, 6, 6, 4, 1, 1, 1, 1};
  for (int i = 0; i < 10; ++i) {
    gops.push_back({"Test_2/gop" + std::to_string(i + 1), clusters[i]});
  }
  const std::string input = dir.Write("t2.csv", CurveFile(gops));
  const RunResult run = Run("recommend --paper-model --input " + input +
                            " --target-bitrate 3.0 --modes vl --format json");
  REQUIRE(run.exit_code == 0);
  const Json doc = Json::parse(run.out);
  REQUIRE(doc["recommendations"].size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(doc["recommendations"][i]["cluster"] == clusters[i]);
  }
  const Json& video = doc["savings"]["videos"][0];
  CHECK(video["video"] == "Test_2");
  CHECK(std::fabs(video["total_proposed_mbps"].get<double>() - 16.09) < 0.02);
  CHECK(std::fabs(video["saving_percent"].get<double>() - 46.36) < 0.1);

  const RunResult csv = Run("recommend --paper-model --input " + input +
                            " --target-bitrate 3.0 --modes vl --format csv");
  REQUIRE(csv.exit_code == 0);
  std::istringstream lines(csv.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("gop_id,status,cluster", 0) == 0);
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(line.find(",ok,") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 10);

  CHECK(Run("recommend --paper-model --input " + input +
            " --target-bitrate 3.0 --modes vl")
            .exit_code == 0);
}

TEST_CASE("recommend trans-sizes cluster-3 GOPs at 0.2 Mbps to 360p") {
  TempDir dir;
  const std::string input = dir.Write(
      "t4.csv", CurveFile({{"Test_4/a", 3}, {"Test_4/b", 3}, {"Test_4/c", 3}}));
  const RunResult run = Run("recommend --paper-model --input " + input +
                            " --target-bitrate 0.2 --modes trans_size --format json");
  REQUIRE(run.exit_code == 0);
  const Json doc = Json::parse(run.out);
  for (const Json& rec : doc["recommendations"]) {
    CHECK(rec["cluster"] == 3);
    CHECK(rec["chosen_tier"] == "360p");
  }
}

TEST_CASE("recommend reports per-GOP errors without aborting") {
  TempDir dir;
  // A 1080p-only model cannot place a GOP measured at 720p.
  const std::string train =
      dir.Write("train.csv", CurveFile({{"a", 1}, {"b", 3}, {"c", 6}}));
  const std::string model = dir.Path("m.json");
  REQUIRE(Run("train --k 3 --input " + train + " --out " + model).exit_code == 0);
  const std::string input = dir.Write(
      "mixed.csv", CurveFile({{"v/first", 6}}) + "v/odd,720p,1,35\nv/odd,720p,2,38\n" +
                       CurveFile({{"v/last", 1}}).substr(kMeasurementHeader.size() + 1));
  const RunResult run = Run("recommend --model " + model + " --input " + input +
                            " --target-bitrate 2 --modes vl --format json");
  REQUIRE(run.exit_code == 0);
  const Json doc = Json::parse(run.out);
  REQUIRE(doc["recommendations"].size() == 3);
  CHECK(doc["recommendations"][0]["status"] == "ok");
  CHECK(doc["recommendations"][1]["gop_id"] == "v/odd");
  CHECK(doc["recommendations"][1]["status"] == "error");
  CHECK(doc["recommendations"][2]["gop_id"] == "v/last");
  CHECK(doc["recommendations"][2]["status"] == "ok");
  CHECK(doc["savings"]["videos"][0]["gops"] == 2);
}

TEST_CASE("recommend input errors exit 1") {
  TempDir dir;
  const std::string empty = dir.Write("empty.csv", "");
  CHECK(Run("recommend --paper-model --input " + empty +
            " --target-bitrate 1 --modes vl")
            .exit_code == 1);
  const std::string header = dir.Write("header.csv", std::string(kMeasurementHeader) + "\n");
  CHECK(Run("recommend --paper-model --input " + header +
            " --target-bitrate 1 --modes vl")
            .exit_code == 1);
  const std::string ok = dir.Write("ok.csv", CurveFile({{"g", 2}}));
  CHECK(Run("recommend --input " + ok + " --target-bitrate 1 --modes vl")
            .exit_code == 1);
  CHECK(Run("recommend --paper-model --model x.json --input " + ok +
            " --target-bitrate 1 --modes vl")
            .exit_code == 1);
  CHECK(Run("recommend --paper-model --input " + ok +
            " --target-bitrate 1 --modes warp")
            .exit_code == 1);
  CHECK(Run("recommend --paper-model --input " + ok + " --modes vl").exit_code ==
        1);
  CHECK(Run("recommend --paper-model --input " + dir.Path("missing.csv") +
            " --target-bitrate 1 --modes vl")
            .exit_code == 1);
}

TEST_CASE("train is deterministic and recovers the published ladders") {
  TempDir dir;
  const std::string input = dir.Write("train.csv", NoisyTrainingFile(99));
  const std::string a = dir.Path("a.json");
  const std::string b = dir.Path("b.json");
  REQUIRE(Run("train --input " + input + " --out " + a).exit_code == 0);
  REQUIRE(Run("train --input " + input + " --out " + b).exit_code == 0);
  const std::string text = ReadAll(a);
  CHECK(!text.empty());
  CHECK(text == ReadAll(b));

  const DecisionEngine trained(LoadModel(text), DecisionConfig{});
  const DecisionEngine paper(BuiltinPaperModel(), DecisionConfig{});
  for (int c = 1; c <= 6; ++c) {
    const ResolutionLadder& got = trained.Ladder(c);
    const ResolutionLadder& want = paper.Ladder(c);
    CHECK(got.tiers == want.tiers);
    REQUIRE(got.breakpoints.size() == want.breakpoints.size());
    for (size_t i = 0; i < got.breakpoints.size(); ++i) {
      CHECK(std::fabs(got.breakpoints[i] - want.breakpoints[i]) < 0.05);
    }
  }

  const RunResult recommend = Run("recommend --model " + a + " --input " +
                                  input + " --target-bitrate 2 --modes vl");
  CHECK(recommend.exit_code == 0);
}

TEST_CASE("train errors exit 1") {
  TempDir dir;
  const std::string input = dir.Write("few.csv", CurveFile({{"a", 1}, {"b", 2}}));
  CHECK(Run("train --input " + input + " --out " + dir.Path("m.json")).exit_code ==
        1);
  CHECK(Run("train --input " + input + " --k 2 --grid 0.2,1,2 --out " +
            dir.Path("m.json"))
            .exit_code == 1);
  CHECK(Run("train --input " + input + " --k 2 --out " + dir.Path("m.json"))
            .exit_code == 0);
}

TEST_CASE("plotdata emits curves and annotations") {
  const RunResult run = Run("plotdata --paper-model --cluster 6");
  REQUIRE(run.exit_code == 0);
  std::istringstream lines(run.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "kind,cluster,tier,bitrate_mbps,psnr_db,label");
  std::map<std::string, std::vector<double>> curves;
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f[0] == "curve") curves[f[2]].push_back(std::stod(f[4]));
  }
  REQUIRE(curves.size() == 4);
  const size_t expected = static_cast<size_t>(std::floor(5.8 / 0.05 + 1e-9)) + 1;
  for (const auto& [tier, psnr] : curves) CHECK(psnr.size() == expected);
  for (size_t i = 0; i < expected; ++i) {
    for (const char* tier : {"360p", "540p", "720p"}) {
      CHECK(curves["1080p"][i] > curves[tier][i]);
    }
  }

  const RunResult c2 = Run("plotdata --paper-model --cluster 2");
  REQUIRE(c2.exit_code == 0);
  const size_t knee = c2.out.find("\nknee,2,1080p,");
  REQUIRE(knee != std::string::npos);
  const double at = std::stod(c2.out.substr(knee + 14));
  CHECK(std::fabs(at - 1.499) < 0.005);

  CHECK(Run("plotdata --paper-model --cluster 7").exit_code == 1);
  CHECK(Run("plotdata --paper-model --cluster all").exit_code == 0);
}

TEST_CASE("unknown subcommands and flags exit 1") {
  CHECK(Run("frobnicate").exit_code == 1);
  CHECK(Run("verify-paper --format yaml").exit_code == 1);
}

}  // namespace
}  // namespace rdtrans
