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

namespace rdtrans {

namespace {

// {c0, c1, c2, c3} per cluster, tiers 360p, 540p, 720p, 1080p.
constexpr double kTable[6][4][4] = {
    {{16.857, 6.307, -1.554, 0.129},
     {17.382, 5.932, -1.571, 0.133},
     {17.034, 6.274, -1.499, 0.123},
     {15.749, 7.627, -1.643, 0.133}},
    {{20.253, 7.171, -1.880, 0.158},
     {20.245, 7.419, -1.840, 0.152},
     {20.290, 7.799, -1.857, 0.152},
     {18.596, 9.071, -1.958, 0.156}},
    {{22.660, 10.014, -2.867, 0.252},
     {22.494, 10.715, -2.904, 0.250},
     {22.166, 11.467, -2.987, 0.254},
     {20.103, 12.650, -2.915, 0.236}},
    {{22.210, 13.527, -3.578, 0.297},
     {22.658, 12.318, -2.880, 0.223},
     {22.410, 12.845, -2.985, 0.231},
     {22.564, 14.786, -3.571, 0.294}},
    {{29.598, 7.619, -1.888, 0.161},
     {29.483, 9.405, -2.604, 0.234},
     {28.743, 10.075, -2.700, 0.239},
     {27.468, 15.563, -4.010, 0.341}},
    {{30.278, 14.048, -3.814, 0.327},
     {30.229, 14.374, -3.801, 0.323},
     {30.558, 13.695, -3.644, 0.311},
     {33.335, 17.415, -4.521, 0.383}},
};

}  // namespace

ClusterModelSet BuiltinPaperModel() {
  const BitrateGrid grid = BitrateGrid::Default();
  const std::vector<ResolutionTier> tiers = ResolutionTier::StandardTiers();
  std::vector<std::vector<TierModel>> models;
  for (const auto& cluster : kTable) {
    std::vector<TierModel> row;
    for (size_t t = 0; t < tiers.size(); ++t) {
      const Cubic coeffs{cluster[t][0], cluster[t][1], cluster[t][2],
                         cluster[t][3]};
      CubicRD fit(coeffs, {0.2, 6.0});
      std::vector<double> centroid;
      for (double r : grid.bitrates()) centroid.push_back(EvalCubic(fit, r));
      row.push_back({tiers[t], fit, std::move(centroid)});
    }
    models.push_back(std::move(row));
  }
  return ClusterModelSet(6, grid, tiers, std::move(models), 0,
                         "paper-table-2");
}

}  // namespace rdtrans
