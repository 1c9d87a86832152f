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

#include "rdtrans/decision.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rdtrans/error.h"

namespace rdtrans {

namespace {

// Ladder tiers within this many dB at a segment midpoint count as tied.
constexpr double kTierTieDb = 1e-9;

void CheckRange(BitrateRange range, std::string_view what) {
  if (!(range.lo > 0.0) || !(range.lo < range.hi) ||
      !std::isfinite(range.hi)) {
    std::ostringstream msg;
    msg << what << " must satisfy 0 < lo < hi, got [" << range.lo << ", "
        << range.hi << "]";
    throw Error(ErrorKind::kInput, msg.str());
  }
}

std::string Mbps(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", r);
  return buf;
}

}  // namespace

void DecisionConfig::Validate() const {
  if (!(vl_psnr > 0.0) || !std::isfinite(vl_psnr)) {
    throw Error(ErrorKind::kInput, "vl_psnr must be positive");
  }
  if (!(nzs_slope > 0.0) || !std::isfinite(nzs_slope)) {
    throw Error(ErrorKind::kInput, "nzs_slope must be positive");
  }
  if (!(tolerance > 0.0)) {
    throw Error(ErrorKind::kInput, "tolerance must be positive");
  }
  CheckRange(operating_range, "operating range");
  CheckRange(vl_search_range, "visually-lossless search range");
}

IntersectionResult CurveIntersections(const CubicRD& a, const CubicRD& b,
                                      BitrateRange range) {
  CheckRange(range, "intersection range");
  IntersectionResult result;
  if (a.coeffs() == b.coeffs()) {
    result.identical = true;
    return result;
  }
  Cubic diff;
  for (int i = 0; i < 4; ++i) diff[i] = a.coeffs()[i] - b.coeffs()[i];
  for (const RealRoot& root : SolveCubicReal(diff)) {
    if (range.Contains(root.value)) result.roots.push_back(root);
  }
  return result;
}

ResolutionTier ResolutionLadder::TierAt(double r) const {
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), r);
  return tiers[static_cast<size_t>(it - breakpoints.begin())];
}

ResolutionLadder BuildLadder(const ClusterModelSet& model, int cluster,
                             const DecisionConfig& cfg) {
  const BitrateRange range = cfg.operating_range;
  CheckRange(range, "operating range");
  const auto& tiers = model.tiers();

  std::vector<double> cuts;
  for (size_t i = 0; i < tiers.size(); ++i) {
    for (size_t j = i + 1; j < tiers.size(); ++j) {
      const IntersectionResult x = CurveIntersections(
          model.Fit(cluster, tiers[i]), model.Fit(cluster, tiers[j]), range);
      for (const RealRoot& root : x.roots) {
        // The argmax cannot change across a tangential meeting.
        if (root.tangential()) continue;
        if (root.value <= range.lo || root.value >= range.hi) continue;
        cuts.push_back(root.value);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> unique_cuts;
  for (double c : cuts) {
    if (unique_cuts.empty() || c - unique_cuts.back() > cfg.tolerance) {
      unique_cuts.push_back(c);
    }
  }

  auto best_tier_at = [&](double r) {
    ResolutionTier best = tiers.front();
    double best_q = EvalCubic(model.Fit(cluster, best), r);
    for (size_t t = 1; t < tiers.size(); ++t) {
      const double q = EvalCubic(model.Fit(cluster, tiers[t]), r);
      if (q >= best_q - kTierTieDb) {
        best = tiers[t];
        best_q = std::max(q, best_q);
      }
    }
    return best;
  };

  ResolutionLadder ladder;
  ladder.cluster = cluster;
  ladder.range = range;
  double left = range.lo;
  for (size_t s = 0; s <= unique_cuts.size(); ++s) {
    const double right = s < unique_cuts.size() ? unique_cuts[s] : range.hi;
    const ResolutionTier tier = best_tier_at(0.5 * (left + right));
    if (!ladder.tiers.empty() && ladder.tiers.back() == tier) {
      // Merge with the previous segment: its right edge is not a knee.
      ladder.breakpoints.pop_back();
    } else {
      ladder.tiers.push_back(tier);
    }
    if (s < unique_cuts.size()) ladder.breakpoints.push_back(right);
    left = right;
  }
  return ladder;
}

std::optional<VLThreshold> FindVLThreshold(const CubicRD& model,
                                           const DecisionConfig& cfg) {
  const BitrateRange range = cfg.vl_search_range;
  CheckRange(range, "visually-lossless search range");
  if (EvalCubic(model, range.lo) >= cfg.vl_psnr) {
    return VLThreshold{range.lo, model.IsExtrapolation(range.lo), true};
  }
  Cubic shifted = model.coeffs();
  shifted[0] -= cfg.vl_psnr;
  for (const RealRoot& root : SolveCubicReal(shifted)) {
    if (!range.Contains(root.value) || root.tangential()) continue;
    if (EvalDerivative(model, root.value) > 0.0) {
      return VLThreshold{root.value, model.IsExtrapolation(root.value), false};
    }
  }
  return std::nullopt;
}

std::optional<NZSInterval> FindNZSInterval(const CubicRD& model,
                                           const DecisionConfig& cfg) {
  const BitrateRange range = cfg.operating_range;
  CheckRange(range, "operating range");
  // Q'(R) - s is an upward parabola only when c3 > 0; otherwise the region
  // below the slope is not bounded by two roots.
  if (!(model.c3() > 0.0)) return std::nullopt;
  const Cubic slope_gap{model.c1() - cfg.nzs_slope, 2.0 * model.c2(),
                        3.0 * model.c3(), 0.0};
  const std::vector<RealRoot> roots = SolveCubicReal(slope_gap);
  if (roots.size() != 2) return std::nullopt;
  NZSInterval interval;
  interval.lo = std::max(roots[0].value, range.lo);
  interval.hi = std::min(roots[1].value, range.hi);
  interval.lo_clamped = roots[0].value < range.lo;
  interval.hi_clamped = roots[1].value > range.hi;
  if (!(interval.lo < interval.hi)) return std::nullopt;
  return interval;
}

ResolutionChoice RecommendResolution(const ResolutionLadder& ladder,
                                     double target) {
  ResolutionChoice choice;
  double r = target;
  if (r < ladder.range.lo || r > ladder.range.hi) {
    r = std::clamp(r, ladder.range.lo, ladder.range.hi);
    choice.clamped = true;
  }
  choice.tier = ladder.TierAt(r);
  return choice;
}

Modes Modes::Parse(std::string_view text) {
  Modes modes;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (token == "trans_size") {
      modes.trans_size = true;
    } else if (token == "vl") {
      modes.vl = true;
    } else if (token == "nzs") {
      modes.nzs = true;
    } else if (!token.empty()) {
      throw Error(ErrorKind::kInput,
                  "unknown mode '" + std::string(token) +
                      "' (expected trans_size, vl, nzs)");
    }
    start = end + 1;
  }
  return modes;
}

std::string Modes::ToString() const {
  std::string out;
  auto add = [&out](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(trans_size, "trans_size");
  add(vl, "vl");
  add(nzs, "nzs");
  return out;
}

DecisionEngine::DecisionEngine(ClusterModelSet model, DecisionConfig cfg)
    : model_(std::move(model)), cfg_(cfg) {
  cfg_.Validate();
  const auto& tiers = model_.tiers();
  for (int c = 1; c <= model_.k(); ++c) {
    ladders_.push_back(BuildLadder(model_, c, cfg_));
    std::vector<std::optional<VLThreshold>> vl_row;
    std::vector<std::optional<NZSInterval>> nzs_row;
    for (ResolutionTier tier : tiers) {
      vl_row.push_back(FindVLThreshold(model_.Fit(c, tier), cfg_));
      nzs_row.push_back(FindNZSInterval(model_.Fit(c, tier), cfg_));
    }
    vl_.push_back(std::move(vl_row));
    nzs_.push_back(std::move(nzs_row));
  }
}

void DecisionEngine::CheckCluster(int cluster) const {
  if (cluster < 1 || cluster > model_.k()) {
    throw Error(ErrorKind::kModel, "cluster index " + std::to_string(cluster) +
                                       " outside [1, " +
                                       std::to_string(model_.k()) + "]");
  }
}

const ResolutionLadder& DecisionEngine::Ladder(int cluster) const {
  CheckCluster(cluster);
  return ladders_[cluster - 1];
}

const std::optional<VLThreshold>& DecisionEngine::VL(
    int cluster, ResolutionTier tier) const {
  CheckCluster(cluster);
  return vl_[cluster - 1][model_.TierIndex(tier)];
}

const std::optional<NZSInterval>& DecisionEngine::NZS(
    int cluster, ResolutionTier tier) const {
  CheckCluster(cluster);
  return nzs_[cluster - 1][model_.TierIndex(tier)];
}

double DecisionEngine::RecommendBitrateVL(int cluster, ResolutionTier tier,
                                          double target) const {
  const auto& threshold = VL(cluster, tier);
  if (threshold && target > threshold->bitrate) return threshold->bitrate;
  return target;
}

double DecisionEngine::RecommendBitrateNZS(int cluster, ResolutionTier tier,
                                           double target) const {
  const auto& interval = NZS(cluster, tier);
  if (interval && target >= interval->lo && target <= interval->hi) {
    return interval->lo;
  }
  return target;
}

Recommendation DecisionEngine::Recommend(const GopMeasurement& gop,
                                         Modes modes, double target) const {
  if (!modes.any()) {
    throw Error(ErrorKind::kInput, "at least one mode must be enabled");
  }
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw Error(ErrorKind::kInput, "target bitrate must be positive");
  }
  const GopAssignment assignment =
      AssignClusterMulti(gop.points, model_, gop.tier, gop.gop_id);

  Recommendation rec;
  rec.gop_id = gop.gop_id;
  rec.cluster = assignment.cluster;
  rec.assignment_distance = assignment.distance;
  rec.native_tier = gop.tier;
  rec.chosen_tier = gop.tier;
  rec.target_bitrate = target;
  rec.proposed_bitrate = target;

  std::ostringstream why;
  why << "cluster " << rec.cluster << " (distance "
      << Mbps(assignment.distance) << " dB)";
  if (modes.trans_size) {
    const ResolutionChoice choice =
        RecommendResolution(Ladder(rec.cluster), target);
    rec.chosen_tier = choice.tier;
    rec.target_clamped = choice.clamped;
    rec.trans_sized = choice.tier != gop.tier;
    why << "; " << choice.tier.name()
        << (rec.trans_sized ? " is best at " : " kept at ") << Mbps(target)
        << " Mbps";
    if (choice.clamped) why << " (target outside ladder range)";
  }
  if (modes.vl) {
    const double capped =
        RecommendBitrateVL(rec.cluster, rec.chosen_tier, rec.proposed_bitrate);
    if (capped < rec.proposed_bitrate) {
      rec.vl_capped = true;
      why << "; capped to visually-lossless threshold " << Mbps(capped)
          << " Mbps";
    } else {
      why << "; visually-lossless threshold not binding";
    }
    rec.proposed_bitrate = capped;
  }
  if (modes.nzs) {
    const double reduced =
        RecommendBitrateNZS(rec.cluster, rec.chosen_tier, rec.proposed_bitrate);
    if (reduced < rec.proposed_bitrate) {
      rec.nzs_reduced = true;
      why << "; reduced to near-zero-slope floor " << Mbps(reduced) << " Mbps";
    } else {
      why << "; outside near-zero-slope interval";
    }
    rec.proposed_bitrate = reduced;
  }

  const CubicRD& chosen = model_.Fit(rec.cluster, rec.chosen_tier);
  rec.extrapolated = chosen.IsExtrapolation(rec.proposed_bitrate);
  rec.predicted_psnr = EvalCubic(chosen, rec.proposed_bitrate);
  rec.predicted_native_psnr =
      EvalCubic(model_.Fit(rec.cluster, rec.native_tier), target);
  if (rec.extrapolated) why << "; outside fitted bitrate range";
  rec.rationale = why.str();
  return rec;
}

SavingsReport ComputeSavings(const std::vector<VideoSavingsInput>& videos) {
  if (videos.empty()) throw Error(ErrorKind::kInput, "no videos to report");
  SavingsReport report;
  for (const VideoSavingsInput& in : videos) {
    if (in.rows.empty()) {
      throw Error(ErrorKind::kInput, "video '" + in.video + "' has no GOPs");
    }
    VideoSavings out{in.video, in.rows, 0.0, 0.0, 0.0};
    for (const SavingsRow& row : in.rows) {
      if (!(row.target > 0.0) || !(row.proposed > 0.0)) {
        throw Error(ErrorKind::kInput,
                    "video '" + in.video + "' has a non-positive bitrate");
      }
      if (row.proposed > row.target) {
        throw Error(ErrorKind::kInput, "video '" + in.video +
                                           "' proposes more than its target");
      }
      out.total_target += row.target;
      out.total_proposed += row.proposed;
    }
    out.saving_percent =
        (out.total_target - out.total_proposed) / out.total_target * 100.0;
    report.total_target += out.total_target;
    report.total_proposed += out.total_proposed;
    report.videos.push_back(std::move(out));
  }
  report.saving_percent = (report.total_target - report.total_proposed) /
                          report.total_target * 100.0;
  return report;
}

}  // namespace rdtrans
