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

#include "rdtrans/ingest.h"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "doctest.h"
#include "rdtrans/decision.h"
#include "rdtrans/error.h"
#include "test_support.h"

namespace rdtrans {
namespace {

using testing::Direct;
using testing::kPublished;
using testing::kTier1080;
using testing::PublishedCubic;
using testing::Rng;

const std::string kHeader(kMeasurementHeader);

Error CaughtError(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an Error");
  return Error(ErrorKind::kInput, "");
}

uint64_t Fnv1a(std::string_view text) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

TEST_CASE("ParseMeasurements accepts a single row") {
  const MeasurementSet set =
      ParseMeasurements(kHeader + "\nv/1,720p,1.5,35.2\n", "one.csv");
  CHECK(set.sample_count() == 1);
  CHECK(set.row_count == 1);
  CHECK(set.source_name == "one.csv");
  REQUIRE(set.keys().size() == 1);
  CHECK(set.keys()[0].first == "v/1");
  CHECK(set.keys()[0].second == ResolutionTier::k720p());
  const RDSample& s = set.Samples(set.keys()[0])[0];
  CHECK(s.bitrate == 1.5);
  CHECK(s.psnr == 35.2);
  CHECK(s.row == 2);
}

TEST_CASE("ParseMeasurements skips comments, blank lines and a BOM") {
  const std::string text = "\xEF\xBB\xBF# produced by harness\n\n" + kHeader +
                           "\r\n# note\ng,360p,0.2,30\r\n\ng,360p,1,33\n";
  const MeasurementSet set = ParseMeasurements(text);
  CHECK(set.sample_count() == 2);
}

TEST_CASE("ParseMeasurements errors name the row") {
  const Error neg =
      CaughtError([&] { ParseMeasurements(kHeader + "\ng,720p,-1,30\n"); });
  CHECK(neg.kind() == ErrorKind::kValidation);
  CHECK(std::string(neg.what()).find("row 2") != std::string::npos);

  const Error psnr = CaughtError(
      [&] { ParseMeasurements(kHeader + "\ng,720p,1,30\ng,720p,2,130\n"); });
  CHECK(psnr.kind() == ErrorKind::kValidation);
  CHECK(std::string(psnr.what()).find("row 3") != std::string::npos);

  const Error fields =
      CaughtError([&] { ParseMeasurements(kHeader + "\ng,720p,1\n"); });
  CHECK(fields.kind() == ErrorKind::kParse);
  CHECK(std::string(fields.what()).find("row 2") != std::string::npos);

  const Error number =
      CaughtError([&] { ParseMeasurements(kHeader + "\ng,720p,abc,30\n"); });
  CHECK(number.kind() == ErrorKind::kParse);

  const Error tier =
      CaughtError([&] { ParseMeasurements(kHeader + "\ng,4k,1,30\n"); });
  CHECK(std::string(tier.what()).find("row 2") != std::string::npos);

  const Error conflict = CaughtError([&] {
    ParseMeasurements(kHeader + "\ng,720p,1,30\ng,720p,1,31\n");
  });
  CHECK(conflict.kind() == ErrorKind::kConflict);
  CHECK(std::string(conflict.what()).find("row 3") != std::string::npos);

  CHECK_NOTHROW(ParseMeasurements(kHeader + "\ng,720p,1,30\ng,720p,1,30\n"));
  CHECK_THROWS_AS(ParseMeasurements("g,720p,1,30\n"), Error);
  CHECK_THROWS_AS(ParseMeasurements(""), Error);
}

TEST_CASE("parse, serialize, parse is idempotent") {
  Rng rng(4);
  std::ostringstream text;
  text << kHeader << "\n";
  const char* tiers[] = {"360p", "540p", "720p", "1080p"};
  for (int i = 0; i < 200; ++i) {
    text << "vid" << i % 7 << "/" << i % 3 << "," << tiers[i % 4] << ","
         << rng.Uniform(0.1, 8.0) << "," << rng.Uniform(20.0, 60.0) << "\n";
  }
  const MeasurementSet first = ParseMeasurements(text.str());
  const std::string once = SerializeMeasurements(first);
  const MeasurementSet second = ParseMeasurements(once);
  CHECK(SerializeMeasurements(second) == once);
  CHECK(second.sample_count() == first.sample_count());
  CHECK(second.keys() == first.keys());
}

TEST_CASE("MeasurementSet groups and sorts") {
  const MeasurementSet set = ParseMeasurements(
      kHeader + "\nb,720p,3,34\na,360p,1,30\nb,1080p,2,33\nb,720p,1,30\n");
  CHECK(set.GopIds() == std::vector<std::string>{"b", "a"});
  const auto pts = set.Points({"b", ResolutionTier::k720p()});
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].bitrate == 1.0);
  CHECK(set.NativeKey("b").second == ResolutionTier::k1080p());
  CHECK_THROWS_AS(set.NativeKey("zzz"), Error);
}

TEST_CASE("synthetic cluster-4 file resamples as identity and assigns 4") {
  const BitrateGrid grid = BitrateGrid::Default();
  const Cubic c = PublishedCubic(4, kTier1080);
  std::ostringstream text;
  text.precision(17);
  text << kHeader << "\n";
  for (double r : grid.bitrates()) text << "g4,1080p," << r << "," << Direct(c, r) << "\n";
  const MeasurementSet set = ParseMeasurements(text.str());
  const auto vectors = BuildTrainingVectors(set, grid);
  const RDVector& v = vectors.at(ResolutionTier::k1080p()).at(0);
  for (size_t i = 0; i < grid.size(); ++i) CHECK(v.psnr[i] == Direct(c, grid[i]));
  const GopAssignment a = AssignClusterMulti(
      set.Points(set.keys()[0]), BuiltinPaperModel(), ResolutionTier::k1080p());
  CHECK(a.cluster == 4);
}

TEST_CASE("BuiltinPaperModel matches the published table") {
  const ClusterModelSet model = BuiltinPaperModel();
  CHECK(model.k() == 6);
  CHECK(model.provenance() == "paper-table-2");
  REQUIRE(model.tiers() == ResolutionTier::StandardTiers());
  int count = 0;
  for (int c = 1; c <= 6; ++c) {
    for (size_t t = 0; t < 4; ++t) {
      const CubicRD& fit = model.Fit(c, model.tiers()[t]);
      for (int i = 0; i < 4; ++i) CHECK(fit.coeffs()[i] == kPublished[c - 1][t][i]);
      CHECK(fit.valid_range().lo == 0.2);
      CHECK(fit.valid_range().hi == 6.0);
      ++count;
    }
  }
  CHECK(count == 24);
  const CubicRD& c1 = model.Fit(1, ResolutionTier::k1080p());
  CHECK(c1.c1() == 7.627);
  CHECK(c1.c2() == -1.643);
  CHECK(c1.c3() == 0.133);
  CHECK(c1.c0() == 15.749);
  CHECK(EvalCubic(model.Fit(6, ResolutionTier::k1080p()), 0.0) == 33.335);
}

TEST_CASE("BuiltinPaperModel serialization is frozen") {
  const std::string text = SaveModel(BuiltinPaperModel());
  CHECK(text == SaveModel(BuiltinPaperModel()));
  CHECK(Fnv1a(text) == 3850079797383323312ULL);
}

TEST_CASE("SaveModel and LoadModel round-trip") {
  const ClusterModelSet model = BuiltinPaperModel();
  const ClusterModelSet loaded = LoadModel(SaveModel(model));
  CHECK(loaded.k() == model.k());
  REQUIRE(loaded.grid().size() == model.grid().size());
  for (size_t i = 0; i < model.grid().size(); ++i) {
    CHECK(loaded.grid()[i] == RoundSignificant12(model.grid()[i]));
  }
  CHECK(loaded.tiers() == model.tiers());
  CHECK(loaded.seed() == model.seed());
  CHECK(loaded.provenance() == model.provenance());
  for (int c = 1; c <= 6; ++c) {
    for (ResolutionTier t : model.tiers()) {
      CHECK(loaded.Fit(c, t).coeffs() == model.Fit(c, t).coeffs());
      for (size_t i = 0; i < model.grid().size(); ++i) {
        CHECK(loaded.At(c, t).centroid[i] ==
              RoundSignificant12(model.At(c, t).centroid[i]));
      }
    }
  }
  CHECK(SaveModel(loaded) == SaveModel(model));
}

TEST_CASE("LoadModel errors") {
  std::string text = SaveModel(BuiltinPaperModel());
  const std::string key = "\"schema_version\": 1";
  REQUIRE(text.find(key) != std::string::npos);
  std::string v99 = text;
  v99.replace(v99.find(key), key.size(), "\"schema_version\": \"99\"");
  CHECK(CaughtError([&] { LoadModel(v99); }).kind() == ErrorKind::kVersion);

  for (size_t cut : {size_t{0}, size_t{10}, text.size() / 2, text.size() - 3}) {
    const Error e = CaughtError([&] { LoadModel(text.substr(0, cut)); });
    CHECK(e.kind() == ErrorKind::kParse);
  }

  std::string missing = text;
  missing.replace(missing.find("\"provenance\""), 12, "\"origin\"");
  const Error e = CaughtError([&] { LoadModel(missing); });
  CHECK(e.kind() == ErrorKind::kParse);
  CHECK(std::string(e.what()).find("provenance") != std::string::npos);
}

TEST_CASE("trained model round-trip keeps decisions") {
  const BitrateGrid grid = BitrateGrid::Default();
  Rng rng(12);
  std::map<ResolutionTier, std::vector<RDVector>> by_tier;
  const auto tiers = ResolutionTier::StandardTiers();
  for (int i = 0; i < 30; ++i) {
    const int cluster = i % 6 + 1;
    for (size_t t = 0; t < tiers.size(); ++t) {
      std::vector<double> psnr;
      for (double r : grid.bitrates()) {
        psnr.push_back(Direct(PublishedCubic(cluster, static_cast<int>(t)), r) +
                       rng.Uniform(-0.1, 0.1));
      }
      by_tier[tiers[t]].push_back({std::to_string(i), tiers[t], psnr});
    }
  }
  const ClusterModelSet trained = Train(by_tier, grid, 6, 42).model;
  const ClusterModelSet loaded = LoadModel(SaveModel(trained));
  const DecisionEngine a(trained, DecisionConfig{});
  const DecisionEngine b(loaded, DecisionConfig{});
  for (int c = 1; c <= 6; ++c) {
    CHECK(a.Ladder(c).tiers == b.Ladder(c).tiers);
    REQUIRE(a.Ladder(c).breakpoints.size() == b.Ladder(c).breakpoints.size());
    for (size_t i = 0; i < a.Ladder(c).breakpoints.size(); ++i) {
      CHECK(a.Ladder(c).breakpoints[i] ==
            doctest::Approx(b.Ladder(c).breakpoints[i]).epsilon(1e-9));
    }
    for (ResolutionTier t : tiers) {
      REQUIRE(a.VL(c, t).has_value() == b.VL(c, t).has_value());
      if (a.VL(c, t)) {
        CHECK(a.VL(c, t)->bitrate ==
              doctest::Approx(b.VL(c, t)->bitrate).epsilon(1e-9));
      }
      REQUIRE(a.NZS(c, t).has_value() == b.NZS(c, t).has_value());
      if (a.NZS(c, t)) {
        CHECK(a.NZS(c, t)->lo == doctest::Approx(b.NZS(c, t)->lo).epsilon(1e-9));
        CHECK(a.NZS(c, t)->hi == doctest::Approx(b.NZS(c, t)->hi).epsilon(1e-9));
      }
    }
  }
}

}  // namespace
}  // namespace rdtrans
