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

#ifndef RDTRANS_CLUSTERING_H_
#define RDTRANS_CLUSTERING_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rdtrans/rd_model.h"
#include "rdtrans/resolution.h"

namespace rdtrans {

// Strictly increasing positive bitrates (Mbps), at least four of them.
class BitrateGrid {
 public:
  // Throws kInput when the invariants do not hold.
  explicit BitrateGrid(std::vector<double> bitrates);

  // Ten evenly spaced bitrates from 0.2 to 6.0 Mbps inclusive.
  static BitrateGrid Default();
  static BitrateGrid Linspace(double lo, double hi, int count);

  const std::vector<double>& bitrates() const { return bitrates_; }
  size_t size() const { return bitrates_.size(); }
  double min() const { return bitrates_.front(); }
  double max() const { return bitrates_.back(); }
  double operator[](size_t i) const { return bitrates_[i]; }

  friend bool operator==(const BitrateGrid&, const BitrateGrid&) = default;

 private:
  std::vector<double> bitrates_;
};

// A GOP's PSNR curve sampled on a BitrateGrid, index-aligned with it.
struct RDVector {
  std::string gop_id;
  ResolutionTier tier;
  std::vector<double> psnr;
};

// Throws kInput if |v| does not match |grid| or carries a PSNR outside
// (0, 100].
void ValidateRDVector(const RDVector& v, const BitrateGrid& grid);

// Piecewise-linear interpolation of |samples| (one GOP at one tier) at each
// grid bitrate. Samples need not be sorted. Duplicate bitrates with equal
// PSNR collapse; differing PSNR is a kAmbiguity error. A grid bitrate
// outside the sample span is a kCoverage error; there is no extrapolation.
RDVector ResampleToGrid(std::span<const RDPoint> samples,
                        const BitrateGrid& grid, const std::string& gop_id,
                        ResolutionTier tier);

struct KMeansResult {
  std::vector<int> labels;                     // 0-based, one per vector
  std::vector<std::vector<double>> centroids;  // k of them
  std::vector<double> inertia_history;         // one entry per assignment
  int iterations = 0;
  bool converged = false;

  double inertia() const { return inertia_history.back(); }
};

inline constexpr int kKMeansMaxIterations = 300;
inline constexpr double kKMeansTolerance = 1e-6;  // max centroid shift, dB

// Lloyd's algorithm with k-means++ seeding from |seed|, Euclidean distance
// in PSNR space. Stops when no centroid moves by kKMeansTolerance or after
// kKMeansMaxIterations. A cluster left empty is re-seeded at the vector
// farthest from its own assigned centroid. Deterministic for a fixed seed.
//
// Throws kInsufficientData when there are fewer vectors than |k| and kInput
// when the vectors differ in length or |k| < 1.
KMeansResult KMeans(std::span<const std::vector<double>> vectors, int k,
                    uint64_t seed);

// Centroid curve and fitted cubic for one cluster at one tier.
struct TierModel {
  ResolutionTier tier;
  CubicRD fit;
  std::vector<double> centroid;
};

// k clusters x |tiers| tiers of fitted R-D models. Cluster indices are
// 1-based throughout the public API.
class ClusterModelSet {
 public:
  // |models[c][t]| is cluster c+1 at tiers[t]. Throws kModel when the shape
  // does not match k x |tiers| or a centroid does not match the grid.
  ClusterModelSet(int k, BitrateGrid grid, std::vector<ResolutionTier> tiers,
                  std::vector<std::vector<TierModel>> models, uint64_t seed,
                  std::string provenance);

  int k() const { return k_; }
  const BitrateGrid& grid() const { return grid_; }
  const std::vector<ResolutionTier>& tiers() const { return tiers_; }
  uint64_t seed() const { return seed_; }
  const std::string& provenance() const { return provenance_; }

  bool HasTier(ResolutionTier tier) const;
  // Index of |tier| in tiers(); throws kModel when absent.
  size_t TierIndex(ResolutionTier tier) const;
  // Throws kModel for an out-of-range cluster or absent tier.
  const TierModel& At(int cluster, ResolutionTier tier) const;
  const CubicRD& Fit(int cluster, ResolutionTier tier) const {
    return At(cluster, tier).fit;
  }

 private:
  int k_;
  BitrateGrid grid_;
  std::vector<ResolutionTier> tiers_;  // ascending
  std::vector<std::vector<TierModel>> models_;
  uint64_t seed_;
  std::string provenance_;
};

inline constexpr int kDefaultClusterCount = 6;
inline constexpr uint64_t kDefaultSeed = 42;

struct TierTrainingReport {
  ResolutionTier tier;
  double inertia = 0.0;
  int iterations = 0;
  // labels[i] is the 1-based cluster of the i-th input vector of this tier.
  std::vector<int> labels;
  std::vector<FitReport> fit_reports;  // per cluster, 1-based order
};

struct TrainResult {
  ClusterModelSet model;
  std::vector<TierTrainingReport> reports;  // ascending tier order
};

// Clusters every tier independently, fits a cubic to each centroid, and
// aligns cluster indices across tiers. The highest tier is the reference:
// its clusters are numbered by ascending mean centroid PSNR, and every other
// tier's centroids are matched one-to-one by mean PSNR.
//
// Throws kInsufficientData when a tier has fewer than |k| vectors and
// kInput when a vector does not match |grid|.
TrainResult Train(const std::map<ResolutionTier, std::vector<RDVector>>& by_tier,
                  const BitrateGrid& grid, int k, uint64_t seed);

struct GopAssignment {
  std::string gop_id;
  int cluster = 0;  // 1-based
  double distance = 0.0;  // dB
  ResolutionTier tier;
};

// Nearest cluster by |psnr - Q_c(bitrate)| on the fitted cubics of |tier|.
// Ties go to the lower cluster index. Throws kModel when |tier| is absent
// and kInput for a non-positive bitrate.
GopAssignment AssignCluster(RDPoint point, const ClusterModelSet& model,
                            ResolutionTier tier, std::string gop_id = {});

// As AssignCluster, minimizing the RMS of per-point distances. Throws
// kInput for an empty list.
GopAssignment AssignClusterMulti(std::span<const RDPoint> points,
                                 const ClusterModelSet& model,
                                 ResolutionTier tier, std::string gop_id = {});

}  // namespace rdtrans

#endif  // RDTRANS_CLUSTERING_H_
