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

#ifndef RDTRANS_VERIFY_H_
#define RDTRANS_VERIFY_H_

#include <string>
#include <vector>

namespace rdtrans {

enum class VerifyStatus { kPass, kFail, kDiscrepancy };

// One recomputed quantity against its published reference value.
struct VerifyRow {
  int criterion = 0;    // acceptance criterion number, 0 if informational
  std::string group;    // knee, ladder, vl, nzs, trans_size, savings_vl, ...
  std::string label;
  std::string computed;
  std::string reference;
  std::string tolerance;
  VerifyStatus status = VerifyStatus::kPass;
  std::string note;

  bool acceptance() const { return criterion != 0; }
};

// Recomputes knee points, ladders, visually-lossless thresholds,
// near-zero-slope intervals, trans-sizing choices and both savings
// scenarios from the built-in coefficient table. Values known not to be
// derivable from the rounded coefficients come back as kDiscrepancy.
std::vector<VerifyRow> RunPaperVerification();

// True when no acceptance row failed.
bool VerificationPassed(const std::vector<VerifyRow>& rows);

const char* VerifyStatusName(VerifyStatus status);

}  // namespace rdtrans

#endif  // RDTRANS_VERIFY_H_
