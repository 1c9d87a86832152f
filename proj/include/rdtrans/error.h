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

#ifndef RDTRANS_ERROR_H_
#define RDTRANS_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdtrans {

enum class ErrorKind {
  kInput,             // malformed or out-of-contract argument
  kDegenerateInput,   // too few distinct points for the requested fit
  kConditioning,      // numerically singular least-squares system
  kDomain,            // argument outside a function's mathematical domain
  kCoverage,          // resampling grid not covered by the measurements
  kAmbiguity,         // duplicate bitrate with conflicting PSNR
  kInsufficientData,  // fewer vectors than clusters
  kModel,             // request does not match the loaded model
  kValidation,        // measurement row fails a bounds check
  kConflict,          // duplicate (gop, tier, bitrate) with differing PSNR
  kVersion,           // unknown model-file schema version
  kParse,             // model file is not well-formed
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported through this type. what() carries a
// one-line human-readable cause.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rdtrans

#endif  // RDTRANS_ERROR_H_
