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

// rdtrans command-line front end: train, verify-paper, recommend, plotdata,
// serve.

#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdtrans/clustering.h"
#include "rdtrans/decision.h"
#include "rdtrans/error.h"
#include "rdtrans/ingest.h"
#include "rdtrans/service.h"
#include "rdtrans/verify.h"

namespace {

using rdtrans::Error;
using rdtrans::ErrorKind;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;
constexpr int kExitVerification = 3;

constexpr double kPlotStep = 0.05;

struct ModelSource {
  std::string path;
  bool paper = false;
};

struct DecisionOverrides {
  double vl_psnr = 40.0;
  double nzs_slope = 0.1;
  std::string operating_range;
  std::string vl_search_range;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInput, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw Error(ErrorKind::kInput, "cannot write '" + path + "'");
  }
}

std::vector<double> ParseList(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInput, std::string(what) + ": '" + item +
                                         "' is not a number");
    }
  }
  return values;
}

rdtrans::BitrateRange ParseRange(const std::string& text, const char* what) {
  const std::vector<double> v = ParseList(text, what);
  if (v.size() != 2) {
    throw Error(ErrorKind::kInput, std::string(what) + " must be 'lo,hi'");
  }
  return {v[0], v[1]};
}

rdtrans::ClusterModelSet LoadModelSource(const ModelSource& source) {
  if (source.paper) return rdtrans::BuiltinPaperModel();
  return rdtrans::LoadModel(ReadFile(source.path));
}

rdtrans::DecisionConfig MakeConfig(const DecisionOverrides& o) {
  rdtrans::DecisionConfig cfg;
  cfg.vl_psnr = o.vl_psnr;
  cfg.nzs_slope = o.nzs_slope;
  if (!o.operating_range.empty()) {
    cfg.operating_range = ParseRange(o.operating_range, "--operating-range");
  }
  if (!o.vl_search_range.empty()) {
    cfg.vl_search_range = ParseRange(o.vl_search_range, "--vl-search-range");
  }
  cfg.Validate();
  return cfg;
}

std::string Fixed(double x, int digits = 3) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

void AddModelSourceOptions(CLI::App* cmd, ModelSource* source) {
  auto* model = cmd->add_option("--model", source->path, "Model file (JSON)");
  auto* paper = cmd->add_flag("--paper-model", source->paper,
                              "Use the built-in published coefficient table");
  model->excludes(paper);
  paper->excludes(model);
}

void RequireModelSource(const ModelSource& source) {
  if (source.path.empty() && !source.paper) {
    throw Error(ErrorKind::kInput, "one of --model or --paper-model is required");
  }
}

void AddDecisionOptions(CLI::App* cmd, DecisionOverrides* o) {
  cmd->add_option("--vl-psnr", o->vl_psnr, "Visually-lossless PSNR (dB)");
  cmd->add_option("--nzs-slope", o->nzs_slope,
                  "Near-zero slope threshold (dB/Mbps)");
  cmd->add_option("--operating-range", o->operating_range,
                  "Ladder and NZS range 'lo,hi' in Mbps");
  cmd->add_option("--vl-search-range", o->vl_search_range,
                  "Threshold search range 'lo,hi' in Mbps");
}

// train ---------------------------------------------------------------------

int RunTrain(const std::string& input, int k, uint64_t seed,
             const std::string& grid_text, const std::string& out_path) {
  const rdtrans::MeasurementSet set =
      rdtrans::ParseMeasurements(ReadFile(input), input);
  if (set.empty()) {
    throw Error(ErrorKind::kInput, "'" + input + "' contains no measurements");
  }
  const rdtrans::BitrateGrid grid =
      grid_text.empty() ? rdtrans::BitrateGrid::Default()
                        : rdtrans::BitrateGrid(ParseList(grid_text, "--grid"));
  const rdtrans::TrainResult result =
      rdtrans::Train(rdtrans::BuildTrainingVectors(set, grid), grid, k, seed);
  WriteFile(out_path, rdtrans::SaveModel(result.model));

  std::cout << "trained k=" << k << " seed=" << seed << " on "
            << set.row_count << " rows -> " << out_path << "\n";
  for (const auto& report : result.reports) {
    std::cout << report.tier.name() << ": " << report.labels.size()
              << " curves, inertia " << Fixed(report.inertia, 4) << " dB^2, "
              << report.iterations << " iterations\n";
    for (size_t c = 0; c < report.fit_reports.size(); ++c) {
      const rdtrans::FitReport& fit = report.fit_reports[c];
      std::cout << "  cluster " << c + 1 << " mse";
      for (int f = 0; f < 4; ++f) {
        const auto family = static_cast<rdtrans::FitFamily>(f);
        const auto mse = fit.Mse(family);
        std::cout << " " << rdtrans::FitFamilyName(family) << "="
                  << (mse ? Fixed(*mse, 4) : std::string("n/a"));
      }
      std::cout << " best=" << rdtrans::FitFamilyName(fit.chosen) << "\n";
    }
  }
  return kExitOk;
}

// verify-paper --------------------------------------------------------------

int RunVerify(const std::string& format) {
  const std::vector<rdtrans::VerifyRow> rows = rdtrans::RunPaperVerification();
  const bool passed = rdtrans::VerificationPassed(rows);
  if (format == "json") {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      doc.push_back({{"criterion", row.criterion},
                     {"group", row.group},
                     {"label", row.label},
                     {"computed", row.computed},
                     {"reference", row.reference},
                     {"tolerance", row.tolerance},
                     {"status", rdtrans::VerifyStatusName(row.status)},
                     {"note", row.note}});
    }
    std::cout << nlohmann::ordered_json{{"passed", passed}, {"rows", doc}}
                     .dump(2)
              << "\n";
  } else {
    for (const auto& row : rows) {
      char line[256];
      std::snprintf(line, sizeof(line), "%-12s %-4s %-11s %-20s %-26s %-26s %s",
                    rdtrans::VerifyStatusName(row.status),
                    row.acceptance() ? ("A" + std::to_string(row.criterion))
                                           .c_str()
                                     : "-",
                    row.group.c_str(), row.label.c_str(),
                    row.computed.c_str(), row.reference.c_str(),
                    row.tolerance.c_str());
      std::cout << line;
      if (!row.note.empty()) std::cout << "  # " << row.note;
      std::cout << "\n";
    }
    std::cout << (passed ? "verification passed" : "verification FAILED")
              << "\n";
  }
  return passed ? kExitOk : kExitVerification;
}

// recommend -----------------------------------------------------------------

std::string VideoOf(const std::string& gop_id) {
  const size_t slash = gop_id.find('/');
  return slash == std::string::npos ? "all" : gop_id.substr(0, slash);
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

int RunRecommend(const ModelSource& source, const DecisionOverrides& overrides,
                 const std::string& input, double target,
                 const std::string& modes_text, const std::string& format) {
  RequireModelSource(source);
  const rdtrans::Modes modes = rdtrans::Modes::Parse(modes_text);
  if (!modes.any()) {
    throw Error(ErrorKind::kInput, "--modes must enable at least one mode");
  }
  if (!(target > 0.0)) {
    throw Error(ErrorKind::kInput, "--target-bitrate must be positive");
  }
  const rdtrans::DecisionEngine engine(LoadModelSource(source),
                                       MakeConfig(overrides));
  const rdtrans::MeasurementSet set =
      rdtrans::ParseMeasurements(ReadFile(input), input);
  if (set.empty()) {
    throw Error(ErrorKind::kInput, "'" + input + "' contains no measurements");
  }

  struct Row {
    std::string gop_id;
    std::optional<rdtrans::Recommendation> rec;
    std::string error;
  };
  std::vector<Row> rows;
  std::vector<rdtrans::VideoSavingsInput> videos;
  for (const std::string& gop_id : set.GopIds()) {
    Row row{gop_id, std::nullopt, {}};
    try {
      const auto key = set.NativeKey(gop_id);
      row.rec = engine.Recommend({gop_id, key.second, set.Points(key)}, modes,
                                 target);
      const std::string video = VideoOf(gop_id);
      auto it = std::find_if(videos.begin(), videos.end(),
                             [&](const auto& v) { return v.video == video; });
      if (it == videos.end()) {
        videos.push_back({video, {}});
        it = videos.end() - 1;
      }
      it->rows.push_back({row.rec->target_bitrate, row.rec->proposed_bitrate});
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  std::optional<rdtrans::SavingsReport> savings;
  if (!videos.empty()) savings = rdtrans::ComputeSavings(videos);

  if (format == "json") {
    nlohmann::ordered_json recs = nlohmann::ordered_json::array();
    for (const Row& row : rows) {
      if (row.rec) {
        recs.push_back(rdtrans::RecommendationToJson(*row.rec));
      } else {
        recs.push_back({{"gop_id", row.gop_id},
                        {"status", "error"},
                        {"error", {{"message", row.error}}}});
      }
    }
    nlohmann::ordered_json doc{{"modes", modes.ToString()},
                               {"recommendations", recs}};
    doc["savings"] = savings ? rdtrans::SavingsToJson(*savings)
                             : nlohmann::ordered_json(nullptr);
    std::cout << doc.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "gop_id,status,cluster,native_tier,chosen_tier,target_mbps,"
                 "proposed_mbps,predicted_psnr_db,modes_applied,message\n";
    for (const Row& row : rows) {
      if (!row.rec) {
        std::cout << CsvField(row.gop_id) << ",error,,,,,,,,"
                  << CsvField(row.error) << "\n";
        continue;
      }
      const rdtrans::Recommendation& r = *row.rec;
      rdtrans::Modes applied{r.trans_sized, r.vl_capped, r.nzs_reduced};
      std::cout << CsvField(r.gop_id) << ",ok," << r.cluster << ","
                << r.native_tier.name() << "," << r.chosen_tier.name() << ","
                << Fixed(r.target_bitrate, 6) << ","
                << Fixed(r.proposed_bitrate, 6) << ","
                << Fixed(r.predicted_psnr, 4) << ","
                << CsvField(applied.ToString()) << ",\n";
    }
  } else {
    char line[256];
    std::snprintf(line, sizeof(line), "%-16s %-7s %-6s %-6s %9s %9s %9s  %s\n",
                  "gop", "cluster", "native", "tier", "target", "proposed",
                  "psnr", "rationale");
    std::cout << line;
    for (const Row& row : rows) {
      if (!row.rec) {
        std::cout << row.gop_id << "  ERROR: " << row.error << "\n";
        continue;
      }
      const rdtrans::Recommendation& r = *row.rec;
      std::snprintf(line, sizeof(line), "%-16s %-7d %-6s %-6s %9.3f %9.3f %9.2f  ",
                    r.gop_id.c_str(), r.cluster, r.native_tier.name().c_str(),
                    r.chosen_tier.name().c_str(), r.target_bitrate,
                    r.proposed_bitrate, r.predicted_psnr);
      std::cout << line << r.rationale << "\n";
    }
    if (savings) {
      for (const auto& v : savings->videos) {
        std::cout << "video " << v.video << ": total target "
                  << Fixed(v.total_target, 3) << " Mbps, proposed "
                  << Fixed(v.total_proposed, 3) << " Mbps, saving "
                  << Fixed(v.saving_percent, 2) << "%\n";
      }
      std::cout << "overall saving " << Fixed(savings->saving_percent, 2)
                << "%\n";
    }
  }
  for (const Row& row : rows) {
    if (!row.rec) std::cerr << "gop " << row.gop_id << ": " << row.error << "\n";
  }
  return kExitOk;
}

// plotdata ------------------------------------------------------------------

int RunPlotData(const ModelSource& source, const DecisionOverrides& overrides,
                const std::string& cluster_text) {
  RequireModelSource(source);
  const rdtrans::DecisionEngine engine(LoadModelSource(source),
                                       MakeConfig(overrides));
  const rdtrans::ClusterModelSet& model = engine.model();
  std::vector<int> clusters;
  if (cluster_text == "all") {
    for (int c = 1; c <= model.k(); ++c) clusters.push_back(c);
  } else {
    int c = 0;
    try {
      size_t used = 0;
      c = std::stoi(cluster_text, &used);
      if (used != cluster_text.size()) c = 0;
    } catch (const std::exception&) {
      c = 0;
    }
    if (c < 1 || c > model.k()) {
      throw Error(ErrorKind::kInput, "unknown cluster '" + cluster_text +
                                         "' (expected 1.." +
                                         std::to_string(model.k()) + " or all)");
    }
    clusters.push_back(c);
  }

  const rdtrans::BitrateRange range = engine.config().operating_range;
  const int steps =
      static_cast<int>(std::floor(range.width() / kPlotStep + 1e-9)) + 1;
  std::cout << "kind,cluster,tier,bitrate_mbps,psnr_db,label\n";
  for (int c : clusters) {
    for (rdtrans::ResolutionTier tier : model.tiers()) {
      const rdtrans::CubicRD& fit = model.Fit(c, tier);
      for (int i = 0; i < steps; ++i) {
        const double r = range.lo + i * kPlotStep;
        std::cout << "curve," << c << "," << tier.name() << "," << Fixed(r, 4)
                  << "," << Fixed(rdtrans::EvalCubic(fit, r), 6) << ",\n";
      }
    }
    const rdtrans::ResolutionLadder& ladder = engine.Ladder(c);
    for (size_t b = 0; b < ladder.breakpoints.size(); ++b) {
      const double r = ladder.breakpoints[b];
      const rdtrans::ResolutionTier upper = ladder.tiers[b + 1];
      std::cout << "knee," << c << "," << upper.name() << "," << Fixed(r, 4)
                << "," << Fixed(rdtrans::EvalCubic(model.Fit(c, upper), r), 6)
                << "," << ladder.tiers[b].name() << "->" << upper.name()
                << "\n";
    }
    for (rdtrans::ResolutionTier tier : model.tiers()) {
      const rdtrans::CubicRD& fit = model.Fit(c, tier);
      if (const auto& vl = engine.VL(c, tier)) {
        std::cout << "vl," << c << "," << tier.name() << ","
                  << Fixed(vl->bitrate, 4) << ","
                  << Fixed(rdtrans::EvalCubic(fit, vl->bitrate), 6) << ","
                  << (vl->extrapolated ? "visually_lossless(extrapolated)"
                                       : "visually_lossless")
                  << "\n";
      }
      if (const auto& nzs = engine.NZS(c, tier)) {
        std::cout << "nzs_lo," << c << "," << tier.name() << ","
                  << Fixed(nzs->lo, 4) << ","
                  << Fixed(rdtrans::EvalCubic(fit, nzs->lo), 6)
                  << ",near_zero_slope_start\n";
        std::cout << "nzs_hi," << c << "," << tier.name() << ","
                  << Fixed(nzs->hi, 4) << ","
                  << Fixed(rdtrans::EvalCubic(fit, nzs->hi), 6)
                  << ",near_zero_slope_end\n";
      }
    }
  }
  return kExitOk;
}

// serve ---------------------------------------------------------------------

rdtrans::AdvisoryServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

int RunServe(const ModelSource& source, const DecisionOverrides& overrides,
             const std::string& bind) {
  RequireModelSource(source);
  const auto [host, port] = rdtrans::ParseBindAddress(bind);
  auto engine = std::make_shared<const rdtrans::DecisionEngine>(
      LoadModelSource(source), MakeConfig(overrides));
  rdtrans::AdvisoryServer server(engine);
  const int bound = server.Bind(host, port);
  std::cout << "listening on http://" << host << ":" << bound
            << rdtrans::kAdvisoryRoute << std::endl;
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  server.Listen();
  g_server = nullptr;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate-distortion transcoding model: clustering, ladders, "
               "visually-lossless and near-zero-slope bitrate decisions"};
  app.require_subcommand(1);

  std::string input;
  std::string out_path;
  std::string grid_text;
  std::string format = "human";
  std::string modes_text;
  std::string cluster_text = "all";
  std::string bind = "127.0.0.1:8080";
  int k = rdtrans::kDefaultClusterCount;
  uint64_t seed = rdtrans::kDefaultSeed;
  double target = 0.0;
  ModelSource source;
  DecisionOverrides overrides;

  auto* train = app.add_subcommand("train", "Cluster measured R-D curves and "
                                            "fit per-cluster cubic models");
  train->add_option("--input", input, "Measurement CSV")->required();
  train->add_option("--out", out_path, "Model file to write")->required();
  train->add_option("--k", k, "Cluster count")->check(CLI::PositiveNumber);
  train->add_option("--seed", seed, "k-means++ seed");
  train->add_option("--grid", grid_text,
                    "Comma-separated bitrate grid (Mbps)");

  auto* verify = app.add_subcommand(
      "verify-paper", "Recompute published knee points, thresholds, "
                      "intervals and savings from the built-in model");
  verify->add_option("--format", format)->check(CLI::IsMember({"human", "json"}));

  auto* recommend = app.add_subcommand(
      "recommend", "Per-GOP tier and bitrate recommendations");
  AddModelSourceOptions(recommend, &source);
  AddDecisionOptions(recommend, &overrides);
  recommend->add_option("--input", input, "Measurement CSV")->required();
  recommend->add_option("--target-bitrate", target, "Target bitrate (Mbps)")
      ->required();
  recommend->add_option("--modes", modes_text, "trans_size,vl,nzs")->required();
  recommend->add_option("--format", format)
      ->check(CLI::IsMember({"human", "json", "csv"}));

  auto* plot = app.add_subcommand(
      "plotdata", "Sampled model curves with knee/threshold annotations");
  AddModelSourceOptions(plot, &source);
  AddDecisionOptions(plot, &overrides);
  plot->add_option("--cluster", cluster_text, "Cluster index or 'all'");

  auto* serve = app.add_subcommand("serve", "HTTP advisory endpoint");
  AddModelSourceOptions(serve, &source);
  AddDecisionOptions(serve, &overrides);
  serve->add_option("--bind", bind, "[host:]port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*train) return RunTrain(input, k, seed, grid_text, out_path);
    if (*verify) return RunVerify(format);
    if (*recommend) {
      return RunRecommend(source, overrides, input, target, modes_text, format);
    }
    if (*plot) return RunPlotData(source, overrides, cluster_text);
    if (*serve) return RunServe(source, overrides, bind);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
