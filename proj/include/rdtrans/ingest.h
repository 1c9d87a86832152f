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

#ifndef RDTRANS_INGEST_H_
#define RDTRANS_INGEST_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rdtrans/clustering.h"
#include "rdtrans/rd_model.h"
#include "rdtrans/resolution.h"

namespace rdtrans {

// One measured (GOP, tier, bitrate, PSNR) row. |row| is the 1-based line
// number in the source file, 0 when synthesized.
struct RDSample {
  std::string gop_id;
  ResolutionTier tier;
  double bitrate = 0.0;
  double psnr = 0.0;
  int row = 0;
};

inline constexpr std::string_view kMeasurementHeader =
    "gop_id,resolution,bitrate_mbps,psnr_db";

// Samples grouped by (gop, tier) and sorted by bitrate. GOPs keep the
// order in which they first appear in the file.
class MeasurementSet {
 public:
  using Key = std::pair<std::string, ResolutionTier>;

  const std::vector<Key>& keys() const { return keys_; }
  const std::vector<RDSample>& Samples(const Key& key) const;
  std::vector<RDPoint> Points(const Key& key) const;
  // GOP ids in first-appearance order.
  std::vector<std::string> GopIds() const;
  // The samples of |gop_id| at its highest measured tier.
  Key NativeKey(const std::string& gop_id) const;

  bool empty() const { return keys_.empty(); }
  size_t sample_count() const;

  std::string source_name;
  int row_count = 0;  // data rows accepted

  // Inserts a validated sample. Throws kConflict for a duplicate
  // (gop, tier, bitrate) with a different PSNR; an exact duplicate is
  // ignored.
  void Add(const RDSample& sample);

 private:
  std::vector<Key> keys_;
  std::map<Key, std::vector<RDSample>> groups_;
};

// Parses the comma-delimited measurement format. Blank lines and lines
// starting with '#' are skipped; the first other line must be the header.
// Throws kParse for a malformed row, kValidation for out-of-range values,
// and kConflict for contradictory duplicates, each naming the row.
MeasurementSet ParseMeasurements(std::string_view text,
                                 std::string source_name = "<input>");

// Canonical text form: header then one row per sample in key order.
std::string SerializeMeasurements(const MeasurementSet& set);

// Resamples every (gop, tier) group onto |grid|, grouped by tier.
std::map<ResolutionTier, std::vector<RDVector>> BuildTrainingVectors(
    const MeasurementSet& set, const BitrateGrid& grid);

// The published six-cluster, four-tier coefficient table.
ClusterModelSet BuiltinPaperModel();

inline constexpr int kModelSchemaVersion = 1;

// JSON document with every number rounded to 12 significant digits.
std::string SaveModel(const ClusterModelSet& model);

// Throws kVersion for an unknown schema version and kParse (with a byte
// offset or JSON pointer) for anything malformed.
ClusterModelSet LoadModel(std::string_view text);

// |x| rounded to 12 significant digits, as stored in model files.
double RoundSignificant12(double x);

}  // namespace rdtrans

#endif  // RDTRANS_INGEST_H_
