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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "rdtrans/error.h"
#include "rdtrans/ingest.h"

namespace rdtrans {

namespace {

constexpr double kMaxPsnr = 100.0;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      return fields;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

[[noreturn]] void Fail(ErrorKind kind, int row, const std::string& what) {
  throw Error(kind, "row " + std::to_string(row) + ": " + what);
}

double ParseNumber(std::string_view field, int row, const char* name) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    Fail(ErrorKind::kParse, row,
         std::string(name) + " '" + std::string(field) + "' is not a number");
  }
  return value;
}

std::string FormatNumber(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace

const std::vector<RDSample>& MeasurementSet::Samples(const Key& key) const {
  auto it = groups_.find(key);
  if (it == groups_.end()) {
    throw Error(ErrorKind::kInput, "no samples for gop '" + key.first +
                                       "' at " + key.second.name());
  }
  return it->second;
}

std::vector<RDPoint> MeasurementSet::Points(const Key& key) const {
  std::vector<RDPoint> points;
  for (const RDSample& s : Samples(key)) points.push_back({s.bitrate, s.psnr});
  return points;
}

std::vector<std::string> MeasurementSet::GopIds() const {
  std::vector<std::string> ids;
  for (const Key& key : keys_) {
    if (std::find(ids.begin(), ids.end(), key.first) == ids.end()) {
      ids.push_back(key.first);
    }
  }
  return ids;
}

MeasurementSet::Key MeasurementSet::NativeKey(
    const std::string& gop_id) const {
  const Key* best = nullptr;
  for (const Key& key : keys_) {
    if (key.first == gop_id && (best == nullptr || best->second < key.second)) {
      best = &key;
    }
  }
  if (best == nullptr) {
    throw Error(ErrorKind::kInput, "unknown gop '" + gop_id + "'");
  }
  return *best;
}

size_t MeasurementSet::sample_count() const {
  size_t n = 0;
  for (const auto& [key, samples] : groups_) n += samples.size();
  return n;
}

void MeasurementSet::Add(const RDSample& sample) {
  const Key key{sample.gop_id, sample.tier};
  auto [it, inserted] = groups_.try_emplace(key);
  if (inserted) keys_.push_back(key);
  std::vector<RDSample>& samples = it->second;
  auto pos = std::lower_bound(
      samples.begin(), samples.end(), sample.bitrate,
      [](const RDSample& s, double r) { return s.bitrate < r; });
  if (pos != samples.end() && pos->bitrate == sample.bitrate) {
    if (pos->psnr != sample.psnr) {
      std::ostringstream msg;
      msg << "gop '" << sample.gop_id << "' " << sample.tier.name()
          << " bitrate " << sample.bitrate << " has PSNR " << sample.psnr
          << " conflicting with row " << pos->row << " (" << pos->psnr << ")";
      Fail(ErrorKind::kConflict, sample.row, msg.str());
    }
    return;
  }
  samples.insert(pos, sample);
}

MeasurementSet ParseMeasurements(std::string_view text,
                                 std::string source_name) {
  MeasurementSet set;
  set.source_name = std::move(source_name);
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  bool seen_header = false;
  int row = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = Trim(text.substr(start, end - start));
    start = end + 1;
    ++row;
    if (line.empty() || line.front() == '#') continue;

    const std::vector<std::string_view> fields = SplitFields(line);
    if (!seen_header) {
      std::string normalized;
      for (size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) normalized += ',';
        normalized += fields[i];
      }
      if (normalized != kMeasurementHeader) {
        Fail(ErrorKind::kParse, row,
             "expected header '" + std::string(kMeasurementHeader) + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != 4) {
      Fail(ErrorKind::kParse, row,
           "expected 4 fields, got " + std::to_string(fields.size()));
    }
    RDSample sample;
    sample.row = row;
    sample.gop_id = std::string(fields[0]);
    if (sample.gop_id.empty()) Fail(ErrorKind::kParse, row, "empty gop_id");
    const auto tier = ResolutionTier::Parse(fields[1]);
    if (!tier) {
      Fail(ErrorKind::kValidation, row,
           "resolution '" + std::string(fields[1]) +
               "' is not one of 360p, 540p, 720p, 1080p");
    }
    sample.tier = *tier;
    sample.bitrate = ParseNumber(fields[2], row, "bitrate_mbps");
    sample.psnr = ParseNumber(fields[3], row, "psnr_db");
    if (!std::isfinite(sample.bitrate) || sample.bitrate <= 0.0) {
      Fail(ErrorKind::kValidation, row,
           "bitrate_mbps must be finite and > 0, got " +
               std::string(fields[2]));
    }
    if (!std::isfinite(sample.psnr) || sample.psnr <= 0.0 ||
        sample.psnr > kMaxPsnr) {
      Fail(ErrorKind::kValidation, row,
           "psnr_db must be in (0, 100], got " + std::string(fields[3]));
    }
    set.Add(sample);
    ++set.row_count;
  }
  if (!seen_header) {
    throw Error(ErrorKind::kInput, "measurement input '" + set.source_name +
                                       "' has no header or data");
  }
  return set;
}

std::string SerializeMeasurements(const MeasurementSet& set) {
  std::string out(kMeasurementHeader);
  out += '\n';
  for (const auto& key : set.keys()) {
    for (const RDSample& s : set.Samples(key)) {
      out += s.gop_id + ',' + s.tier.name() + ',' + FormatNumber(s.bitrate) +
             ',' + FormatNumber(s.psnr) + '\n';
    }
  }
  return out;
}

std::map<ResolutionTier, std::vector<RDVector>> BuildTrainingVectors(
    const MeasurementSet& set, const BitrateGrid& grid) {
  std::map<ResolutionTier, std::vector<RDVector>> by_tier;
  for (const auto& key : set.keys()) {
    by_tier[key.second].push_back(
        ResampleToGrid(set.Points(key), grid, key.first, key.second));
  }
  return by_tier;
}

}  // namespace rdtrans
