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

#include "rdtrans/clustering.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "rdtrans/error.h"

namespace rdtrans {

namespace {

constexpr double kMaxPsnr = 100.0;
// Slack when testing grid coverage, to absorb decimal round-off in files.
constexpr double kCoverageSlack = 1e-9;

double SquaredDistance(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

// Uniform double in [0, 1) from the top 53 bits, so sequences do not depend
// on the standard library's distribution implementation.
double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::vector<double>> SeedPlusPlus(
    std::span<const std::vector<double>> vectors, int k, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const size_t n = vectors.size();
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  size_t first = std::min(n - 1, static_cast<size_t>(UniformUnit(rng) * n));
  centroids.push_back(vectors[first]);

  std::vector<double> nearest(n);
  for (size_t i = 0; i < n; ++i) {
    nearest[i] = SquaredDistance(vectors[i], centroids[0]);
  }
  while (static_cast<int>(centroids.size()) < k) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    size_t pick = 0;
    if (total > 0.0) {
      const double target = UniformUnit(rng) * total;
      double running = 0.0;
      pick = n - 1;
      for (size_t i = 0; i < n; ++i) {
        running += nearest[i];
        if (running > target && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      // Every vector coincides with a chosen centroid.
      pick = static_cast<size_t>(UniformUnit(rng) * n);
      pick = std::min(pick, n - 1);
    }
    centroids.push_back(vectors[pick]);
    for (size_t i = 0; i < n; ++i) {
      nearest[i] =
          std::min(nearest[i], SquaredDistance(vectors[i], centroids.back()));
    }
  }
  return centroids;
}

// Assigns every vector to its nearest centroid (ties to the lower index) and
// returns the inertia.
double AssignAll(std::span<const std::vector<double>> vectors,
                 const std::vector<std::vector<double>>& centroids,
                 std::vector<int>* labels) {
  double inertia = 0.0;
  for (size_t i = 0; i < vectors.size(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < centroids.size(); ++c) {
      const double d = SquaredDistance(vectors[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    (*labels)[i] = best;
    inertia += best_d;
  }
  return inertia;
}

double MeanOf(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

struct TierClustering {
  ResolutionTier tier;
  KMeansResult kmeans;
};

}  // namespace

BitrateGrid::BitrateGrid(std::vector<double> bitrates)
    : bitrates_(std::move(bitrates)) {
  if (bitrates_.size() < 4) {
    throw Error(ErrorKind::kInput, "bitrate grid needs at least 4 points");
  }
  for (size_t i = 0; i < bitrates_.size(); ++i) {
    const double r = bitrates_[i];
    if (!std::isfinite(r) || r <= 0.0 ||
        (i > 0 && !(r > bitrates_[i - 1]))) {
      throw Error(ErrorKind::kInput,
                  "bitrate grid must be positive and strictly increasing");
    }
  }
}

BitrateGrid BitrateGrid::Default() { return Linspace(0.2, 6.0, 10); }

BitrateGrid BitrateGrid::Linspace(double lo, double hi, int count) {
  if (count < 2) throw Error(ErrorKind::kInput, "grid count must be >= 2");
  std::vector<double> r(count);
  for (int i = 0; i < count; ++i) {
    r[i] = lo + (hi - lo) * i / (count - 1);
  }
  r.back() = hi;
  return BitrateGrid(std::move(r));
}

void ValidateRDVector(const RDVector& v, const BitrateGrid& grid) {
  if (v.psnr.size() != grid.size()) {
    throw Error(ErrorKind::kInput,
                "R-D vector for gop '" + v.gop_id + "' has " +
                    std::to_string(v.psnr.size()) + " values, grid has " +
                    std::to_string(grid.size()));
  }
  for (double q : v.psnr) {
    if (!std::isfinite(q) || q <= 0.0 || q > kMaxPsnr) {
      std::ostringstream msg;
      msg << "R-D vector for gop '" << v.gop_id
          << "' has PSNR outside (0, 100]: " << q;
      throw Error(ErrorKind::kInput, msg.str());
    }
  }
}

RDVector ResampleToGrid(std::span<const RDPoint> samples,
                        const BitrateGrid& grid, const std::string& gop_id,
                        ResolutionTier tier) {
  std::vector<RDPoint> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const RDPoint& a, const RDPoint& b) {
              return a.bitrate < b.bitrate;
            });
  std::vector<RDPoint> unique;
  for (const RDPoint& p : sorted) {
    if (!unique.empty() && unique.back().bitrate == p.bitrate) {
      if (unique.back().psnr != p.psnr) {
        std::ostringstream msg;
        msg << "gop '" << gop_id << "' " << tier.name()
            << " has conflicting PSNR at bitrate " << p.bitrate;
        throw Error(ErrorKind::kAmbiguity, msg.str());
      }
      continue;
    }
    unique.push_back(p);
  }
  if (unique.size() < 2) {
    throw Error(ErrorKind::kCoverage, "gop '" + gop_id + "' " + tier.name() +
                                          " needs at least 2 distinct samples");
  }

  RDVector out{gop_id, tier, {}};
  out.psnr.reserve(grid.size());
  const double lo = unique.front().bitrate;
  const double hi = unique.back().bitrate;
  for (double r : grid.bitrates()) {
    const double slack = kCoverageSlack * std::max(1.0, r);
    if (r < lo - slack || r > hi + slack) {
      std::ostringstream msg;
      msg << "gop '" << gop_id << "' " << tier.name()
          << " samples span [" << lo << ", " << hi
          << "] Mbps and do not cover grid bitrate " << r;
      throw Error(ErrorKind::kCoverage, msg.str());
    }
    const double x = std::clamp(r, lo, hi);
    auto upper = std::lower_bound(
        unique.begin(), unique.end(), x,
        [](const RDPoint& p, double v) { return p.bitrate < v; });
    if (upper->bitrate == x) {
      out.psnr.push_back(upper->psnr);
      continue;
    }
    const RDPoint& right = *upper;
    const RDPoint& left = *(upper - 1);
    const double t = (x - left.bitrate) / (right.bitrate - left.bitrate);
    out.psnr.push_back(left.psnr + t * (right.psnr - left.psnr));
  }
  return out;
}

KMeansResult KMeans(std::span<const std::vector<double>> vectors, int k,
                    uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::kInput, "k must be >= 1");
  if (vectors.size() < static_cast<size_t>(k)) {
    throw Error(ErrorKind::kInsufficientData,
                "k-means needs at least k=" + std::to_string(k) +
                    " vectors, got " + std::to_string(vectors.size()));
  }
  const size_t dim = vectors[0].size();
  for (const auto& v : vectors) {
    if (v.size() != dim) {
      throw Error(ErrorKind::kInput, "k-means vectors differ in length");
    }
  }

  KMeansResult result;
  result.centroids = SeedPlusPlus(vectors, k, seed);
  result.labels.assign(vectors.size(), 0);
  const size_t n = vectors.size();

  for (int iter = 1; iter <= kKMeansMaxIterations; ++iter) {
    result.iterations = iter;
    result.inertia_history.push_back(
        AssignAll(vectors, result.centroids, &result.labels));

    std::vector<size_t> counts(k, 0);
    for (int label : result.labels) ++counts[label];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      size_t far = 0;
      double far_d = -1.0;
      for (size_t i = 0; i < n; ++i) {
        if (counts[result.labels[i]] <= 1) continue;
        const double d =
            SquaredDistance(vectors[i], result.centroids[result.labels[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d < 0.0) continue;
      --counts[result.labels[far]];
      result.labels[far] = c;
      counts[c] = 1;
      result.centroids[c] = vectors[far];
    }

    std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
    for (size_t i = 0; i < n; ++i) {
      auto& acc = next[result.labels[i]];
      for (size_t j = 0; j < dim; ++j) acc[j] += vectors[i][j];
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        next[c] = result.centroids[c];
        continue;
      }
      for (size_t j = 0; j < dim; ++j) {
        next[c][j] /= static_cast<double>(counts[c]);
        shift = std::max(shift, std::fabs(next[c][j] - result.centroids[c][j]));
      }
    }
    result.centroids = std::move(next);
    if (shift < kKMeansTolerance) {
      result.converged = true;
      break;
    }
  }
  result.inertia_history.push_back(
      AssignAll(vectors, result.centroids, &result.labels));
  return result;
}

ClusterModelSet::ClusterModelSet(int k, BitrateGrid grid,
                                 std::vector<ResolutionTier> tiers,
                                 std::vector<std::vector<TierModel>> models,
                                 uint64_t seed, std::string provenance)
    : k_(k),
      grid_(std::move(grid)),
      tiers_(std::move(tiers)),
      models_(std::move(models)),
      seed_(seed),
      provenance_(std::move(provenance)) {
  if (k_ < 1) throw Error(ErrorKind::kModel, "model needs k >= 1");
  if (tiers_.empty()) throw Error(ErrorKind::kModel, "model has no tiers");
  for (size_t t = 1; t < tiers_.size(); ++t) {
    if (!(tiers_[t - 1] < tiers_[t])) {
      throw Error(ErrorKind::kModel,
                  "model tiers must be distinct and ascending");
    }
  }
  if (models_.size() != static_cast<size_t>(k_)) {
    throw Error(ErrorKind::kModel, "model has " +
                                       std::to_string(models_.size()) +
                                       " clusters, expected " +
                                       std::to_string(k_));
  }
  for (size_t c = 0; c < models_.size(); ++c) {
    if (models_[c].size() != tiers_.size()) {
      throw Error(ErrorKind::kModel, "cluster " + std::to_string(c + 1) +
                                         " does not cover every tier");
    }
    for (size_t t = 0; t < tiers_.size(); ++t) {
      if (models_[c][t].tier != tiers_[t]) {
        throw Error(ErrorKind::kModel, "cluster " + std::to_string(c + 1) +
                                           " tiers out of order");
      }
      if (models_[c][t].centroid.size() != grid_.size()) {
        throw Error(ErrorKind::kModel,
                    "centroid length does not match grid for cluster " +
                        std::to_string(c + 1) + " " + tiers_[t].name());
      }
    }
  }
}

bool ClusterModelSet::HasTier(ResolutionTier tier) const {
  return std::find(tiers_.begin(), tiers_.end(), tier) != tiers_.end();
}

size_t ClusterModelSet::TierIndex(ResolutionTier tier) const {
  auto it = std::find(tiers_.begin(), tiers_.end(), tier);
  if (it == tiers_.end()) {
    throw Error(ErrorKind::kModel, "model has no tier " + tier.name());
  }
  return static_cast<size_t>(it - tiers_.begin());
}

const TierModel& ClusterModelSet::At(int cluster, ResolutionTier tier) const {
  if (cluster < 1 || cluster > k_) {
    throw Error(ErrorKind::kModel, "cluster index " + std::to_string(cluster) +
                                       " outside [1, " + std::to_string(k_) +
                                       "]");
  }
  return models_[cluster - 1][TierIndex(tier)];
}

TrainResult Train(
    const std::map<ResolutionTier, std::vector<RDVector>>& by_tier,
    const BitrateGrid& grid, int k, uint64_t seed) {
  if (by_tier.empty()) throw Error(ErrorKind::kInput, "no training vectors");
  for (const auto& [tier, vectors] : by_tier) {
    if (vectors.size() < static_cast<size_t>(k)) {
      throw Error(ErrorKind::kInsufficientData,
                  tier.name() + " has " + std::to_string(vectors.size()) +
                      " GOP curves, fewer than k=" + std::to_string(k));
    }
    for (const RDVector& v : vectors) ValidateRDVector(v, grid);
  }

  // Tiers are independent; cluster them concurrently.
  std::vector<std::future<TierClustering>> jobs;
  for (const auto& [tier_key, vectors_ref] : by_tier) {
    const ResolutionTier tier = tier_key;
    const std::vector<RDVector>* vectors = &vectors_ref;
    jobs.push_back(std::async(std::launch::async, [tier, vectors, k, seed] {
      std::vector<std::vector<double>> data;
      data.reserve(vectors->size());
      for (const RDVector& v : *vectors) data.push_back(v.psnr);
      return TierClustering{tier, KMeans(data, k, seed)};
    }));
  }
  std::vector<TierClustering> clustered;
  for (auto& job : jobs) clustered.push_back(job.get());

  std::vector<ResolutionTier> tiers;
  std::vector<std::vector<TierModel>> models(k);
  std::vector<TierTrainingReport> reports;
  for (const TierClustering& tc : clustered) {
    tiers.push_back(tc.tier);
    const auto& centroids = tc.kmeans.centroids;

    // Rank by mean PSNR. In one dimension, pairing ranks is the optimal
    // one-to-one matching to the reference tier's (also rank-ordered)
    // clusters.
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return MeanOf(centroids[a]) < MeanOf(centroids[b]);
    });
    std::vector<int> index_of_label(k);
    for (int rank = 0; rank < k; ++rank) index_of_label[order[rank]] = rank + 1;

    TierTrainingReport report;
    report.tier = tc.tier;
    report.inertia = tc.kmeans.inertia();
    report.iterations = tc.kmeans.iterations;
    for (int label : tc.kmeans.labels) {
      report.labels.push_back(index_of_label[label]);
    }
    for (int rank = 0; rank < k; ++rank) {
      const std::vector<double>& centroid = centroids[order[rank]];
      std::vector<RDPoint> points;
      for (size_t i = 0; i < grid.size(); ++i) {
        points.push_back({grid[i], centroid[i]});
      }
      models[rank].push_back({tc.tier, FitPolynomial(points, 3), centroid});
      report.fit_reports.push_back(CompareFits(points));
    }
    reports.push_back(std::move(report));
  }
  ClusterModelSet model(k, grid, std::move(tiers), std::move(models), seed,
                        "trained");
  return {std::move(model), std::move(reports)};
}

GopAssignment AssignCluster(RDPoint point, const ClusterModelSet& model,
                            ResolutionTier tier, std::string gop_id) {
  return AssignClusterMulti(std::span<const RDPoint>(&point, 1), model, tier,
                            std::move(gop_id));
}

GopAssignment AssignClusterMulti(std::span<const RDPoint> points,
                                 const ClusterModelSet& model,
                                 ResolutionTier tier, std::string gop_id) {
  if (points.empty()) {
    throw Error(ErrorKind::kInput,
                "gop '" + gop_id + "' has no measurements to assign");
  }
  for (const RDPoint& p : points) {
    if (!(p.bitrate > 0.0) || !std::isfinite(p.bitrate) ||
        !std::isfinite(p.psnr)) {
      std::ostringstream msg;
      msg << "gop '" << gop_id << "' has invalid point (" << p.bitrate << ", "
          << p.psnr << ")";
      throw Error(ErrorKind::kInput, msg.str());
    }
  }
  model.TierIndex(tier);

  GopAssignment best{std::move(gop_id), 0,
                     std::numeric_limits<double>::infinity(), tier};
  for (int c = 1; c <= model.k(); ++c) {
    const CubicRD& fit = model.Fit(c, tier);
    double sum = 0.0;
    for (const RDPoint& p : points) {
      const double d = p.psnr - EvalCubic(fit, p.bitrate);
      sum += d * d;
    }
    const double rms =
        points.size() == 1
            ? std::fabs(points[0].psnr - EvalCubic(fit, points[0].bitrate))
            : std::sqrt(sum / static_cast<double>(points.size()));
    if (rms < best.distance) {
      best.distance = rms;
      best.cluster = c;
    }
  }
  return best;
}

}  // namespace rdtrans
