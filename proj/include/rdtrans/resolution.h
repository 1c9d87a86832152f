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

#ifndef RDTRANS_RESOLUTION_H_
#define RDTRANS_RESOLUTION_H_

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rdtrans {

// A spatial resolution tier. Tiers are ordered by vertical resolution only;
// two tiers with the same height are the same tier.
class ResolutionTier {
 public:
  constexpr ResolutionTier() = default;
  constexpr ResolutionTier(int width, int height)
      : width_(width), height_(height) {}

  static constexpr ResolutionTier k360p() { return {640, 360}; }
  static constexpr ResolutionTier k540p() { return {960, 540}; }
  static constexpr ResolutionTier k720p() { return {1280, 720}; }
  static constexpr ResolutionTier k1080p() { return {1920, 1080}; }

  // 360p, 540p, 720p, 1080p in ascending order.
  static std::vector<ResolutionTier> StandardTiers();

  // Parses "<height>p" against |known| (StandardTiers() when empty).
  static std::optional<ResolutionTier> Parse(
      std::string_view name, const std::vector<ResolutionTier>& known = {});

  constexpr int width() const { return width_; }
  constexpr int height() const { return height_; }
  std::string name() const;

  friend constexpr bool operator==(ResolutionTier a, ResolutionTier b) {
    return a.height_ == b.height_;
  }
  friend constexpr std::strong_ordering operator<=>(ResolutionTier a,
                                                    ResolutionTier b) {
    return a.height_ <=> b.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
};

}  // namespace rdtrans

#endif  // RDTRANS_RESOLUTION_H_
