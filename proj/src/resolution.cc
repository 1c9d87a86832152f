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

#include "rdtrans/resolution.h"

#include <charconv>

#include "rdtrans/error.h"

namespace rdtrans {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput: return "input_error";
    case ErrorKind::kDegenerateInput: return "degenerate_input";
    case ErrorKind::kConditioning: return "conditioning_error";
    case ErrorKind::kDomain: return "domain_error";
    case ErrorKind::kCoverage: return "coverage_error";
    case ErrorKind::kAmbiguity: return "ambiguity_error";
    case ErrorKind::kInsufficientData: return "insufficient_data";
    case ErrorKind::kModel: return "model_error";
    case ErrorKind::kValidation: return "validation_error";
    case ErrorKind::kConflict: return "conflict_error";
    case ErrorKind::kVersion: return "version_error";
    case ErrorKind::kParse: return "parse_error";
  }
  return "error";
}

std::vector<ResolutionTier> ResolutionTier::StandardTiers() {
  return {k360p(), k540p(), k720p(), k1080p()};
}

std::optional<ResolutionTier> ResolutionTier::Parse(
    std::string_view name, const std::vector<ResolutionTier>& known) {
  if (name.size() < 2 || name.back() != 'p') return std::nullopt;
  int height = 0;
  const char* first = name.data();
  const char* last = name.data() + name.size() - 1;
  auto [ptr, ec] = std::from_chars(first, last, height);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  const std::vector<ResolutionTier>& tiers =
      known.empty() ? StandardTiers() : known;
  for (ResolutionTier tier : tiers) {
    if (tier.height() == height) return tier;
  }
  return std::nullopt;
}

std::string ResolutionTier::name() const {
  return std::to_string(height_) + "p";
}

}  // namespace rdtrans
