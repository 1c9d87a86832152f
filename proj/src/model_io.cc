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

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "json.hpp"

#include "rdtrans/error.h"
#include "rdtrans/ingest.h"

namespace rdtrans {

using nlohmann::json;

namespace {

[[noreturn]] void SchemaError(const std::string& pointer,
                              const std::string& what) {
  throw Error(ErrorKind::kParse, "model file " + pointer + ": " + what);
}

const json& Field(const json& obj, const char* name,
                  const std::string& pointer) {
  if (!obj.is_object()) SchemaError(pointer, "expected an object");
  auto it = obj.find(name);
  if (it == obj.end()) {
    SchemaError(pointer, std::string("missing field '") + name + "'");
  }
  return *it;
}

double Number(const json& j, const std::string& pointer) {
  if (!j.is_number()) SchemaError(pointer, "expected a number");
  return j.get<double>();
}

std::vector<double> NumberArray(const json& j, const std::string& pointer) {
  if (!j.is_array()) SchemaError(pointer, "expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(Number(j[i], pointer + "/" + std::to_string(i)));
  }
  return out;
}

ResolutionTier Tier(const json& j, const std::string& pointer) {
  if (!j.is_string()) SchemaError(pointer, "expected a tier name");
  const auto tier = ResolutionTier::Parse(j.get<std::string>());
  if (!tier) SchemaError(pointer, "unknown tier '" + j.get<std::string>() + "'");
  return *tier;
}

nlohmann::ordered_json Rounded(const std::vector<double>& values) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (double v : values) out.push_back(RoundSignificant12(v));
  return out;
}

}  // namespace

double RoundSignificant12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string SaveModel(const ClusterModelSet& model) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["k"] = model.k();
  doc["grid"] = Rounded(model.grid().bitrates());
  nlohmann::ordered_json tiers = nlohmann::ordered_json::array();
  for (ResolutionTier tier : model.tiers()) tiers.push_back(tier.name());
  doc["tiers"] = tiers;
  nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
  for (int c = 1; c <= model.k(); ++c) {
    nlohmann::ordered_json tier_entries = nlohmann::ordered_json::array();
    for (ResolutionTier tier : model.tiers()) {
      const TierModel& tm = model.At(c, tier);
      const CubicRD& fit = tm.fit;
      tier_entries.push_back({
          {"tier", tier.name()},
          {"coeffs", Rounded({fit.c0(), fit.c1(), fit.c2(), fit.c3()})},
          {"valid_range",
           Rounded({fit.valid_range().lo, fit.valid_range().hi})},
          {"centroid", Rounded(tm.centroid)},
      });
    }
    clusters.push_back({{"index", c}, {"tiers", tier_entries}});
  }
  doc["clusters"] = clusters;
  doc["seed"] = model.seed();
  doc["provenance"] = model.provenance();
  return doc.dump(2) + "\n";
}

ClusterModelSet LoadModel(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse,
                "model file is not valid JSON at byte " +
                    std::to_string(e.byte) + ": " + e.what());
  }
  const json& version = Field(doc, "schema_version", "");
  int v = -1;
  if (version.is_number_integer()) {
    v = version.get<int>();
  } else if (version.is_string()) {
    const std::string s = version.get<std::string>();
    char* end = nullptr;
    const long parsed = std::strtol(s.c_str(), &end, 10);
    v = (!s.empty() && *end == '\0') ? static_cast<int>(parsed) : -1;
  } else {
    SchemaError("/schema_version", "expected an integer");
  }
  if (v != kModelSchemaVersion) {
    throw Error(ErrorKind::kVersion,
                "unsupported model schema version " + version.dump() +
                    " (expected " + std::to_string(kModelSchemaVersion) + ")");
  }

  const json& k_json = Field(doc, "k", "");
  if (!k_json.is_number_integer() || k_json.get<int>() < 1) {
    SchemaError("/k", "expected a positive integer");
  }
  const int k = k_json.get<int>();
  std::vector<double> grid_values = NumberArray(Field(doc, "grid", ""), "/grid");
  std::vector<ResolutionTier> tiers;
  const json& tiers_json = Field(doc, "tiers", "");
  if (!tiers_json.is_array()) SchemaError("/tiers", "expected an array");
  for (size_t i = 0; i < tiers_json.size(); ++i) {
    tiers.push_back(Tier(tiers_json[i], "/tiers/" + std::to_string(i)));
  }
  const json& seed_json = Field(doc, "seed", "");
  if (!seed_json.is_number_unsigned() && !seed_json.is_number_integer()) {
    SchemaError("/seed", "expected a non-negative integer");
  }
  const json& provenance = Field(doc, "provenance", "");
  if (!provenance.is_string()) SchemaError("/provenance", "expected a string");

  const json& clusters = Field(doc, "clusters", "");
  if (!clusters.is_array() || clusters.size() != static_cast<size_t>(k)) {
    SchemaError("/clusters", "expected an array of k=" + std::to_string(k) +
                                 " clusters");
  }
  std::vector<std::vector<TierModel>> models(k);
  std::vector<bool> seen(k, false);
  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    const std::string cp = "/clusters/" + std::to_string(ci);
    const json& index_json = Field(clusters[ci], "index", cp);
    if (!index_json.is_number_integer()) {
      SchemaError(cp + "/index", "expected an integer");
    }
    const int index = index_json.get<int>();
    if (index < 1 || index > k || seen[index - 1]) {
      SchemaError(cp + "/index", "index " + std::to_string(index) +
                                     " is out of range or repeated");
    }
    seen[index - 1] = true;
    const json& entries = Field(clusters[ci], "tiers", cp);
    if (!entries.is_array() || entries.size() != tiers.size()) {
      SchemaError(cp + "/tiers", "expected one entry per model tier");
    }
    for (size_t ti = 0; ti < entries.size(); ++ti) {
      const std::string tp = cp + "/tiers/" + std::to_string(ti);
      const json& entry = entries[ti];
      const ResolutionTier tier = Tier(Field(entry, "tier", tp), tp + "/tier");
      const std::vector<double> coeffs =
          NumberArray(Field(entry, "coeffs", tp), tp + "/coeffs");
      const std::vector<double> range =
          NumberArray(Field(entry, "valid_range", tp), tp + "/valid_range");
      std::vector<double> centroid =
          NumberArray(Field(entry, "centroid", tp), tp + "/centroid");
      if (coeffs.size() != 4) SchemaError(tp + "/coeffs", "expected 4 numbers");
      if (range.size() != 2) {
        SchemaError(tp + "/valid_range", "expected 2 numbers");
      }
      try {
        CubicRD fit({coeffs[0], coeffs[1], coeffs[2], coeffs[3]},
                    {range[0], range[1]});
        models[index - 1].push_back({tier, fit, std::move(centroid)});
      } catch (const Error& e) {
        SchemaError(tp, e.what());
      }
    }
  }
  try {
    return ClusterModelSet(k, BitrateGrid(std::move(grid_values)),
                           std::move(tiers), std::move(models),
                           seed_json.get<uint64_t>(),
                           provenance.get<std::string>());
  } catch (const Error& e) {
    SchemaError("", e.what());
  }
}

}  // namespace rdtrans
