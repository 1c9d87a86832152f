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

#ifndef RDTRANS_DECISION_H_
#define RDTRANS_DECISION_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdtrans/clustering.h"
#include "rdtrans/polynomial.h"
#include "rdtrans/rd_model.h"
#include "rdtrans/resolution.h"

namespace rdtrans {

struct DecisionConfig {
  double vl_psnr = 40.0;    // visually-lossless quality, dB
  double nzs_slope = 0.1;   // near-zero slope, dB per Mbps
  BitrateRange operating_range{0.2, 6.0};
  BitrateRange vl_search_range{0.2, 12.0};
  double tolerance = 1e-9;  // Mbps

  // Throws kInput unless thresholds are positive and ranges satisfy
  // 0 < lo < hi.
  void Validate() const;
};

struct IntersectionResult {
  std::vector<RealRoot> roots;  // ascending, inside the range
  bool identical = false;       // the curves are coefficient-wise equal
};

// Bitrates in |range| where the two curves meet, from the exact roots of
// their difference polynomial. Tangential meetings are kept and flagged by
// RealRoot::tangential(). Throws kInput for a malformed range.
IntersectionResult CurveIntersections(const CubicRD& a, const CubicRD& b,
                                      BitrateRange range);

// Best tier per bitrate for one cluster. Segment i covers
// (breakpoints[i-1], breakpoints[i]]; the first segment starts at
// range.lo inclusive and the last ends at range.hi.
struct ResolutionLadder {
  int cluster = 0;
  BitrateRange range;
  std::vector<double> breakpoints;   // strictly increasing, interior
  std::vector<ResolutionTier> tiers; // breakpoints.size() + 1 entries

  ResolutionTier TierAt(double r) const;
};

ResolutionLadder BuildLadder(const ClusterModelSet& model, int cluster,
                             const DecisionConfig& cfg);

struct VLThreshold {
  double bitrate = 0.0;
  bool extrapolated = false;  // outside the model's trained range
  bool at_range_min = false;  // curve already lossless at the search floor
};

// Smallest bitrate in cfg.vl_search_range reaching cfg.vl_psnr on an
// increasing branch, or the search floor when the curve starts above it.
std::optional<VLThreshold> FindVLThreshold(const CubicRD& model,
                                           const DecisionConfig& cfg);

struct NZSInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_clamped = false;
  bool hi_clamped = false;
};

// Interval where Q'(R) < cfg.nzs_slope, clamped to cfg.operating_range.
// Absent unless the derivative dips below the slope between two real roots.
std::optional<NZSInterval> FindNZSInterval(const CubicRD& model,
                                           const DecisionConfig& cfg);

struct ResolutionChoice {
  ResolutionTier tier;
  bool clamped = false;  // target was outside the ladder's range
};

ResolutionChoice RecommendResolution(const ResolutionLadder& ladder,
                                     double target);

struct Modes {
  bool trans_size = false;
  bool vl = false;
  bool nzs = false;

  bool any() const { return trans_size || vl || nzs; }
  // Comma-separated subset of {trans_size, vl, nzs}; throws kInput.
  static Modes Parse(std::string_view text);
  std::string ToString() const;
};

// Measurements of one GOP at its native tier.
struct GopMeasurement {
  std::string gop_id;
  ResolutionTier tier;
  std::vector<RDPoint> points;
};

struct Recommendation {
  std::string gop_id;
  int cluster = 0;
  double assignment_distance = 0.0;
  ResolutionTier native_tier;
  ResolutionTier chosen_tier;
  double target_bitrate = 0.0;
  double proposed_bitrate = 0.0;
  bool trans_sized = false;  // chosen tier differs from native
  bool vl_capped = false;
  bool nzs_reduced = false;
  bool target_clamped = false;  // target outside the ladder range
  bool extrapolated = false;    // proposed bitrate outside the fit range
  double predicted_psnr = 0.0;         // chosen tier at proposed bitrate
  double predicted_native_psnr = 0.0;  // native tier at target bitrate
  std::string rationale;
};

// Ladders, thresholds and intervals for every (cluster, tier) of a model,
// computed once. Immutable and safe to share across threads.
class DecisionEngine {
 public:
  DecisionEngine(ClusterModelSet model, DecisionConfig cfg);

  const ClusterModelSet& model() const { return model_; }
  const DecisionConfig& config() const { return cfg_; }

  const ResolutionLadder& Ladder(int cluster) const;
  const std::optional<VLThreshold>& VL(int cluster, ResolutionTier tier) const;
  const std::optional<NZSInterval>& NZS(int cluster,
                                        ResolutionTier tier) const;

  // Target unchanged unless a threshold exists below it.
  double RecommendBitrateVL(int cluster, ResolutionTier tier,
                            double target) const;
  // Lower interval end when lo <= target <= hi, else the target.
  double RecommendBitrateNZS(int cluster, ResolutionTier tier,
                             double target) const;

  // Assign the cluster, then (per |modes|) choose the tier from the ladder,
  // cap at the visually-lossless threshold, and drop to the near-zero-slope
  // floor. Throws kInput when no mode is enabled or target <= 0, and
  // propagates assignment errors.
  Recommendation Recommend(const GopMeasurement& gop, Modes modes,
                           double target) const;

 private:
  void CheckCluster(int cluster) const;

  ClusterModelSet model_;
  DecisionConfig cfg_;
  std::vector<ResolutionLadder> ladders_;
  std::vector<std::vector<std::optional<VLThreshold>>> vl_;
  std::vector<std::vector<std::optional<NZSInterval>>> nzs_;
};

struct SavingsRow {
  double target = 0.0;
  double proposed = 0.0;
};

struct VideoSavingsInput {
  std::string video;
  std::vector<SavingsRow> rows;
};

struct VideoSavings {
  std::string video;
  std::vector<SavingsRow> rows;
  double total_target = 0.0;
  double total_proposed = 0.0;
  double saving_percent = 0.0;
};

struct SavingsReport {
  std::vector<VideoSavings> videos;
  double total_target = 0.0;
  double total_proposed = 0.0;
  double saving_percent = 0.0;
};

// saving = (sum target - sum proposed) / sum target * 100, per video and
// overall. Throws kInput on empty input, non-positive values, or a proposed
// bitrate above its target.
SavingsReport ComputeSavings(const std::vector<VideoSavingsInput>& videos);

}  // namespace rdtrans

#endif  // RDTRANS_DECISION_H_
